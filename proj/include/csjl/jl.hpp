#pragma once
// Johnson–Lindenstrauss projections: random generators, weak/strong property
// checks, sample-count and target-dimension estimators.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csjl/agent_vectors.hpp"
#include "csjl/model.hpp"

namespace csjl {

enum class ProjectionFamily {
    kGaussian,          // i.i.d. N(0, 1/k)
    kBernoulli,         // i.i.d. +-1/sqrt(k)
    kScaledProjection,  // sqrt(d/k) times a random orthogonal projection
    kIdentity,          // k = d identity
    kCustom,            // built by hand
};

std::string_view family_name(ProjectionFamily f);
ProjectionFamily parse_family(std::string_view name);

/// k x d real matrix, row-major.
class ProjectionMatrix {
  public:
    ProjectionMatrix(std::size_t k, std::size_t d, std::vector<double> entries, ProjectionFamily family,
                     std::uint64_t seed);

    static ProjectionMatrix identity(std::size_t d);

    std::size_t rows() const { return k_; }  // k
    std::size_t cols() const { return d_; }  // d
    ProjectionFamily family() const { return family_; }
    std::uint64_t seed() const { return seed_; }

    double operator()(std::size_t r, std::size_t c) const { return entries_[r * d_ + c]; }
    const std::vector<double>& entries() const { return entries_; }

    std::vector<double> apply(std::span<const double> x) const;
    void apply(std::span<const double> x, std::span<double> out) const;
    AgentVectors apply(const AgentVectors& vectors) const;

  private:
    std::size_t k_;
    std::size_t d_;
    std::vector<double> entries_;
    ProjectionFamily family_;
    std::uint64_t seed_;
};

/// Deterministic in (family, k, d, seed). Throws if k > d or k == 0.
ProjectionMatrix generate(ProjectionFamily family, std::size_t k, std::size_t d, std::uint64_t seed);

/// Largest singular value by power iteration on M^T M.
double operator_norm(const ProjectionMatrix& m, double rel_tol = 1e-14, int max_iter = 10000);

struct DistortionReport {
    double max_expand = 0.0;  // max |Mx|/|x| - 1
    double max_shrink = 0.0;  // max 1 - |Mx|/|x| over |x| > delta
    std::size_t points = 0;
    std::size_t weak_violations = 0;    // neither clause holds
    std::size_t strong_violations = 0;  // quasi-isometry clause fails
    std::size_t delta_bucket = 0;       // rescued by the small-norm clause

    bool weak_holds() const { return weak_violations == 0; }
    bool strong_holds() const { return strong_violations == 0; }
};

/// Classifies each point against (1-eps)|x| <= |Mx| <= (1+eps)|x| and the
/// small clause |x| <= delta, |Mx| <= delta. delta = 0 gives the strong check.
DistortionReport check_weak_jl(const ProjectionMatrix& m, const std::vector<std::vector<double>>& points, double eps,
                               double delta);

/// ceil(4 L (sqrt(d) + 2) / (delta eps)): samples per unit time that carry the
/// weak property along a curve with Lipschitz constant L.
std::uint64_t curve_sample_count(double lipschitz, std::size_t d, double delta, double eps);

/// Point counts behind the target-dimension estimate. Counts are reported as
/// natural logarithms because they overflow doubles for realistic inputs.
struct DimensionEstimate {
    double branching_exponent = 0.0;  // floor(T/tau) + 1
    double log_paths = 0.0;           // ln P
    double log_n1 = 0.0;              // trajectory difference samples
    double log_n2 = 0.0;              // velocity perp samples at switching times
    double log_n3 = 0.0;              // ln(2N)
    double log_total = 0.0;
    double k0 = 0.0;                  // ceil(eps^-2 ln N_total), may exceed any integer type
    double proportionality = 1.0;     // constant in k ~ eps^-2 log N
};

DimensionEstimate dimension_estimate(const ModelParams& params, double horizon, double eps, double delta,
                                     double initial_velocity_spread);

/// |1 - V(0)/W(0)| with W(0) computed from M v_i^perp(0). 0 when both vanish,
/// +inf when only W(0) vanishes.
double exactness_at_zero(const ProjectionMatrix& m, const AgentVectors& v0);

enum class LemmaStatus { kPass, kHypothesisViolated, kConclusionViolated };

struct LemmaVerdict {
    LemmaStatus status = LemmaStatus::kPass;
    std::string detail;             // the violated inequality, empty on pass
    std::size_t max_index = 0;      // smallest index maximizing |b_i|
    double mean_sq_a = 0.0;         // A
    double mean_sq_b = 0.0;         // B
    bool large_branch = false;      // sqrt(B) >= 2 Delta
};

/// Checks the norm-ordering lemma for a_i in R^d, b_i in R^k: hypotheses (weak
/// JL with eps = 1/2, delta = Delta at each a_i; |M a_i - b_i| <= Delta), then
/// the conclusions with c = 1/sqrt(289) and C = sqrt(72).
LemmaVerdict technical_lemma_check(const AgentVectors& a, const AgentVectors& b, const ProjectionMatrix& m,
                                   double delta);

inline constexpr double kOrderingConstant = 1.0 / 17.0;  // c = 1/sqrt(289)
inline constexpr double kSpreadConstant = 8.4852813742385702;  // C = sqrt(72)

}  // namespace csjl
