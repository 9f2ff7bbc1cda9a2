#include <atomic>
#include <cstdlib>
#include <string_view>

#include "csjl/simd/kernels.hpp"

namespace csjl::simd {

const KernelTable* avx2_kernels_impl();

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* detect() {
    if (const char* env = std::getenv("CONSENSUS_JL_SIMD")) {
        if (std::string_view(env) == "scalar") return &scalar_kernels();
    }
    if (const KernelTable* t = avx2_kernels()) return t;
    return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> s{detect()};
    return s;
}

}  // namespace

const KernelTable* avx2_kernels() {
    static const KernelTable* t = cpu_has_avx2() ? avx2_kernels_impl() : nullptr;
    return t;
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void force(Isa isa) {
    const KernelTable* t = &scalar_kernels();
    if (isa == Isa::kAvx2 && avx2_kernels() != nullptr) t = avx2_kernels();
    slot().store(t, std::memory_order_release);
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::kScalar:
            return "scalar";
        case Isa::kAvx2:
            return "avx2";
    }
    return "unknown";
}

}  // namespace csjl::simd
