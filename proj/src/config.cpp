#include "sada/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sada/csv.hpp"
#include "sada/error.hpp"

namespace sada {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string normalize_key(std::string_view key) {
    std::string k(trim(key));
    std::replace(k.begin(), k.end(), '_', '-');
    return k;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
    throw Error(ErrorCode::ConfigError,
                "invalid value '" + std::string(value) + "' for '" + std::string(key) + "'");
}

double to_double(std::string_view key, std::string_view value) {
    const std::string_view t = trim(value);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        bad_value(key, value);
    }
    return v;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view value) {
    const std::string_view t = trim(value);
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) bad_value(key, value);
    return v;
}

bool to_bool(std::string_view key, std::string_view value) {
    const std::string_view t = trim(value);
    if (t == "on" || t == "true" || t == "1" || t == "yes") return true;
    if (t == "off" || t == "false" || t == "0" || t == "no") return false;
    bad_value(key, value);
}

}  // namespace

std::map<std::string, std::string> read_key_values(std::istream& in, const std::string& source) {
    std::map<std::string, std::string> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view v(line);
        if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
        v = trim(v);
        if (v.empty()) continue;
        const auto eq = v.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::ConfigError,
                        source + ": line " + std::to_string(line_no) + " is not key = value");
        }
        out[normalize_key(v.substr(0, eq))] = std::string(trim(v.substr(eq + 1)));
    }
    return out;
}

std::map<std::string, std::string> read_key_values_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
    }
    return read_key_values(in, path);
}

std::vector<double> parse_gamma_grid(std::string_view text) {
    const std::string_view t = trim(text);
    std::vector<double> out;
    if (t.find(':') != std::string_view::npos) {
        const auto c1 = t.find(':');
        const auto c2 = t.find(':', c1 + 1);
        if (c2 == std::string_view::npos) bad_value("gamma-grid", text);
        const double start = to_double("gamma-grid", t.substr(0, c1));
        const double stop = to_double("gamma-grid", t.substr(c1 + 1, c2 - c1 - 1));
        const double step = to_double("gamma-grid", t.substr(c2 + 1));
        if (!(step > 0.0) || stop < start) bad_value("gamma-grid", text);
        const long count = std::lround(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= count; ++i) {
            out.push_back(std::round((start + i * step) * 1e12) / 1e12);
        }
    } else {
        std::size_t start = 0;
        while (start <= t.size()) {
            const std::size_t end = std::min(t.find(',', start), t.size());
            const std::string_view item = trim(t.substr(start, end - start));
            if (!item.empty()) out.push_back(to_double("gamma-grid", item));
            start = end + 1;
        }
    }
    if (out.empty()) bad_value("gamma-grid", text);
    for (double g : out) {
        if (!(g >= 0.0 && g <= 1.0)) {
            throw Error(ErrorCode::ConfigError, "gamma values must lie in [0, 1]");
        }
    }
    return out;
}

void apply_setting(RunConfig& cfg, std::string_view raw_key, std::string_view value) {
    const std::string key = normalize_key(raw_key);
    if (key == "model") {
        cfg.model = std::string(trim(value));
    } else if (key == "level") {
        cfg.level = to_double(key, value);
    } else if (key == "centering") {
        cfg.centering = to_bool(key, value);
    } else if (key == "ridge-scale") {
        cfg.ridge_scale = to_double(key, value);
    } else if (key == "seed") {
        cfg.seed = to_int<std::uint64_t>(key, value);
    } else if (key == "methods") {
        cfg.methods = std::string(trim(value));
    } else if (key == "reps") {
        cfg.reps = to_int<int>(key, value);
    } else if (key == "gamma-grid") {
        cfg.gamma_grid = parse_gamma_grid(value);
    } else if (key == "strict") {
        cfg.strict = to_bool(key, value);
    } else if (key == "out") {
        cfg.out = std::string(trim(value));
    } else if (key == "workers") {
        cfg.workers = to_int<int>(key, value);
    } else if (key == "theta-star") {
        cfg.theta_star = to_double(key, value);
    } else if (key == "N") {
        cfg.N = to_int<long>(key, value);
    } else if (key == "n") {
        cfg.n = to_int<long>(key, value);
    } else if (key == "passes") {
        cfg.passes = to_int<int>(key, value);
    } else {
        throw Error(ErrorCode::ConfigError, "unknown config key '" + std::string(raw_key) + "'");
    }
}

void validate_run_config(const RunConfig& cfg) {
    if (cfg.model != "mean" && cfg.model != "ols" && cfg.model != "logistic") {
        throw Error(ErrorCode::ConfigError, "unknown model '" + cfg.model + "'");
    }
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) {
        throw Error(ErrorCode::ConfigError, "level must lie in (0, 1)");
    }
    if (!(cfg.ridge_scale >= 0.0)) {
        throw Error(ErrorCode::ConfigError, "ridge-scale must be nonnegative");
    }
    if (cfg.reps < 1) throw Error(ErrorCode::ConfigError, "reps must be >= 1");
    if (cfg.workers < 1) throw Error(ErrorCode::ConfigError, "workers must be >= 1");
    if (cfg.passes < 1) throw Error(ErrorCode::ConfigError, "passes must be >= 1");
    if (cfg.n < 1 || cfg.n >= cfg.N) throw Error(ErrorCode::ConfigError, "need 1 <= n < N");
    if (cfg.gamma_grid.empty()) throw Error(ErrorCode::ConfigError, "gamma grid is empty");
}

std::string serialize(const RunConfig& cfg) {
    std::ostringstream os;
    os << "model = " << cfg.model << '\n'
       << "level = " << format_full(cfg.level) << '\n'
       << "centering = " << (cfg.centering ? "on" : "off") << '\n'
       << "ridge-scale = " << format_full(cfg.ridge_scale) << '\n'
       << "seed = " << cfg.seed << '\n'
       << "methods = " << cfg.methods << '\n'
       << "reps = " << cfg.reps << '\n'
       << "gamma-grid = ";
    for (std::size_t i = 0; i < cfg.gamma_grid.size(); ++i) {
        os << (i ? "," : "") << format_full(cfg.gamma_grid[i]);
    }
    os << '\n'
       << "strict = " << (cfg.strict ? "on" : "off") << '\n'
       << "out = " << cfg.out << '\n'
       << "workers = " << cfg.workers << '\n'
       << "theta-star = " << format_full(cfg.theta_star) << '\n'
       << "N = " << cfg.N << '\n'
       << "n = " << cfg.n << '\n'
       << "passes = " << cfg.passes << '\n';
    return os.str();
}

EstimatorOptions estimator_options(const RunConfig& cfg) {
    EstimatorOptions o;
    o.centering = cfg.centering;
    o.ridge_scale = cfg.ridge_scale;
    o.extra_passes = cfg.passes - 1;
    return o;
}

}  // namespace sada
