#include "csjl/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "csjl/rng.hpp"

namespace csjl {

const std::vector<std::string>& config_names() {
    static const std::vector<std::string> names{"outlier", "geometric", "cauchy", "gaussian", "uniform"};
    return names;
}

ModelParams preset_params(std::string_view name) {
    ModelParams p;
    p.kernel_scale = 1.0;
    p.kernel_offset = 1.0;
    if (name == "outlier") {
        p.agents = 9, p.dim = 100, p.kernel_decay = 0.6, p.budget = 5.0, p.sampling_time = 0.01;
    } else if (name == "geometric") {
        p.agents = 15, p.dim = 500, p.kernel_decay = 0.65, p.budget = 20.0, p.sampling_time = 0.01;
    } else if (name == "cauchy") {
        p.agents = 25, p.dim = 100, p.kernel_decay = 0.6, p.budget = 5.0, p.sampling_time = 0.01;
    } else if (name == "gaussian") {
        p.agents = 10, p.dim = 500, p.kernel_decay = 0.65, p.budget = 20.0, p.sampling_time = 0.005;
    } else if (name == "uniform") {
        p.agents = 15, p.dim = 200, p.kernel_decay = 0.8, p.budget = 5.0, p.sampling_time = 0.001;
    } else {
        throw std::invalid_argument("unknown configuration '" + std::string(name) + "'");
    }
    return p;
}

FlockState generate_config(std::string_view name, const ModelParams& params, std::uint64_t seed) {
    if (params.agents == 0 || params.dim == 0) throw std::invalid_argument("generate_config: N and d must be >= 1");
    const std::size_t n = params.agents;
    const std::size_t d = params.dim;
    FlockState s(n, d);
    const double sqrt2 = std::numbers::sqrt2;
    const double sqrt3 = std::numbers::sqrt3;
    auto fill = [&](auto&& fx, auto&& fv) {
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t j = 1; j <= d; ++j) {
                s.x(i - 1, j - 1) = fx(static_cast<double>(i), static_cast<double>(j));
                s.v(i - 1, j - 1) = fv(static_cast<double>(i), static_cast<double>(j));
            }
        }
    };
    auto sphere = [&](double i, double j) { return 0.5 * std::cos(i + j * sqrt2); };
    if (name == "outlier") {
        fill(sphere, [&](double i, double j) { return i == static_cast<double>(n) ? 10.0 : std::sin(i * sqrt3 - j); });
    } else if (name == "geometric") {
        fill(sphere, [&](double i, double j) { return std::pow(1.2, (i - 1.0) / 2.0) * std::sin(i * sqrt3 - j); });
    } else if (name == "uniform") {
        auto f = [&](double i, double j) { return std::cos(i + j * sqrt2); };
        fill(f, f);
    } else if (name == "cauchy" || name == "gaussian") {
        Engine eng = make_engine(seed, Stream::kConfiguration);
        const bool cauchy = name == "cauchy";
        std::normal_distribution<double> nx(0.0, cauchy ? 1.0 : 10.0);
        for (double& c : s.x.values()) c = nx(eng);
        if (cauchy) {
            constexpr double b = 1.0 / 40.0;
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (double& c : s.v.values()) c = b * std::tan(std::numbers::pi * (u(eng) - 0.5));
        } else {
            std::normal_distribution<double> nv(0.0, 8.0);
            for (double& c : s.v.values()) c = nv(eng);
        }
    } else {
        throw std::invalid_argument("unknown configuration '" + std::string(name) + "'");
    }
    return s;
}

ExperimentConfig default_config(std::string_view name) {
    ExperimentConfig cfg;
    cfg.config_name = std::string(name);
    cfg.params = preset_params(name);
    return cfg;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size()) throw std::invalid_argument("config: '" + key + "' expects a real, got '" + v + "'");
    return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    std::uint64_t x = 0;
    try {
        if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
        x = std::stoull(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || v.empty()) {
        throw std::invalid_argument("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
    }
    return x;
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_same_v<T, StrategyKind>) {
            out += strategy_name(xs[i]);
        } else {
            out += std::to_string(xs[i]);
        }
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(t.substr(0, eq));
        if (!kv.emplace(key, trim(t.substr(eq + 1))).second) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }

    ExperimentConfig cfg;
    if (auto it = kv.find("config"); it != kv.end()) {
        cfg.config_name = it->second;
        if (cfg.config_name != "file") cfg = default_config(cfg.config_name);
    }
    for (const auto& [key, value] : kv) {
        auto& p = cfg.params;
        if (key == "config") {
            continue;
        } else if (key == "state_file") {
            cfg.state_file = value;
        } else if (key == "config_seed") {
            cfg.config_seed = to_u64(key, value);
        } else if (key == "N") {
            p.agents = to_u64(key, value);
        } else if (key == "d") {
            p.dim = to_u64(key, value);
        } else if (key == "K") {
            p.kernel_scale = to_double(key, value);
        } else if (key == "sigma") {
            p.kernel_offset = to_double(key, value);
        } else if (key == "beta") {
            p.kernel_decay = to_double(key, value);
        } else if (key == "theta") {
            p.budget = to_double(key, value);
        } else if (key == "tau") {
            p.sampling_time = to_double(key, value);
        } else if (key == "strategies") {
            cfg.strategies.clear();
            for (const auto& s : split_list(value)) cfg.strategies.push_back(parse_strategy(s));
        } else if (key == "k") {
            cfg.k_list.clear();
            for (const auto& s : split_list(value)) cfg.k_list.push_back(to_u64(key, s));
        } else if (key == "seeds") {
            cfg.seeds.clear();
            for (const auto& s : split_list(value)) cfg.seeds.push_back(to_u64(key, s));
        } else if (key == "horizon") {
            cfg.horizon = to_double(key, value);
        } else if (key == "substeps") {
            cfg.substeps = to_u64(key, value);
        } else if (key == "dr_mode") {
            cfg.dr_mode = parse_mode(value);
        } else if (key == "family") {
            cfg.family = parse_family(value);
        } else if (key == "n_matrices") {
            cfg.n_matrices = to_u64(key, value);
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    cfg.params.validate();
    if (cfg.config_name == "file" && cfg.state_file.empty()) {
        throw std::invalid_argument("config: 'file' configuration needs state_file");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
    try {
        return parse_config(in);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

std::string emit_config(const ExperimentConfig& cfg) {
    std::ostringstream o;
    const auto& p = cfg.params;
    o << "config = " << cfg.config_name << "\n";
    if (!cfg.state_file.empty()) o << "state_file = " << cfg.state_file << "\n";
    o << "config_seed = " << cfg.config_seed << "\n";
    o << "N = " << p.agents << "\n";
    o << "d = " << p.dim << "\n";
    o << "K = " << format_double(p.kernel_scale) << "\n";
    o << "sigma = " << format_double(p.kernel_offset) << "\n";
    o << "beta = " << format_double(p.kernel_decay) << "\n";
    o << "theta = " << format_double(p.budget) << "\n";
    o << "tau = " << format_double(p.sampling_time) << "\n";
    o << "strategies = " << join(cfg.strategies) << "\n";
    o << "k = " << join(cfg.k_list) << "\n";
    o << "seeds = " << join(cfg.seeds) << "\n";
    o << "horizon = " << format_double(cfg.horizon) << "\n";
    o << "substeps = " << cfg.substeps << "\n";
    o << "dr_mode = " << mode_name(cfg.dr_mode) << "\n";
    o << "family = " << family_name(cfg.family) << "\n";
    o << "n_matrices = " << cfg.n_matrices << "\n";
    o << "output_dir = " << cfg.output_dir << "\n";
    return o.str();
}

namespace {

void read_block(std::istream& in, AgentVectors& out, const char* what) {
    for (std::size_t i = 0; i < out.agents(); ++i) {
        for (std::size_t c = 0; c < out.dim(); ++c) {
            if (!(in >> out(i, c))) {
                throw std::invalid_argument(std::string("state file: truncated ") + what + " block at agent " +
                                            std::to_string(i + 1));
            }
        }
    }
}

}  // namespace

FlockState read_state(std::istream& in) {
    std::size_t n = 0, dim = 0;
    if (!(in >> n >> dim) || n == 0 || dim == 0) throw std::invalid_argument("state file: bad header (N dim)");
    FlockState s(n, dim);
    read_block(in, s.x, "x");
    read_block(in, s.v, "v");
    std::string extra;
    if (in >> extra) throw std::invalid_argument("state file: trailing data");
    return s;
}

FlockState load_state(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open state file '" + path.string() + "'");
    try {
        return read_state(in);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

void write_state(std::ostream& out, const FlockState& state) {
    out << state.agents() << " " << state.dim() << "\n";
    for (const AgentVectors* block : {&state.x, &state.v}) {
        for (std::size_t i = 0; i < block->agents(); ++i) {
            const auto r = block->row(i);
            for (std::size_t c = 0; c < r.size(); ++c) out << (c ? " " : "") << format_double(r[c]);
            out << "\n";
        }
    }
}

ProjectionMatrix read_matrix(std::istream& in) {
    std::string family;
    std::size_t k = 0, d = 0;
    std::uint64_t seed = 0;
    if (!(in >> family >> k >> d >> seed)) throw std::invalid_argument("matrix file: bad header (family k d seed)");
    std::vector<double> e(k * d);
    for (double& x : e) {
        if (!(in >> x)) throw std::invalid_argument("matrix file: truncated entries");
    }
    return ProjectionMatrix(k, d, std::move(e), parse_family(family), seed);
}

void write_matrix(std::ostream& out, const ProjectionMatrix& m) {
    out << family_name(m.family()) << " " << m.rows() << " " << m.cols() << " " << m.seed() << "\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? " " : "") << format_double(m(r, c));
        out << "\n";
    }
}

FlockState initial_state(const ExperimentConfig& cfg) {
    if (cfg.config_name == "file") {
        FlockState s = load_state(cfg.state_file);
        if (s.agents() != cfg.params.agents || s.dim() != cfg.params.dim) {
            throw std::invalid_argument("state file '" + cfg.state_file + "' does not match N/d of the config");
        }
        return s;
    }
    return generate_config(cfg.config_name, cfg.params, cfg.config_seed);
}

}  // namespace csjl
