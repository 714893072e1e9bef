#include "sada/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <thread>

#include "sada/error.hpp"
#include "sada/inference.hpp"

namespace sada {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

VectorXd normal_draws(std::mt19937_64& eng, Index count, double mean = 0.0) {
    std::normal_distribution<double> dist(mean, 1.0);
    VectorXd out(count);
    for (Index i = 0; i < count; ++i) out(i) = dist(eng);
    return out;
}

void check_sizes(Index N, Index n, int reps) {
    if (n < 1 || n >= N) {
        throw Error(ErrorCode::ConfigError, "need 1 <= n < N");
    }
    if (reps < 1) {
        throw Error(ErrorCode::ConfigError, "reps must be >= 1");
    }
}

void check_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw Error(ErrorCode::ConfigError, "gamma must lie in [0, 1]");
    }
}

MatrixXd mix_predictions(const VectorXd& y, double gamma, std::mt19937_64& eng) {
    const VectorXd e1 = normal_draws(eng, y.size());
    const VectorXd e2 = normal_draws(eng, y.size());
    MatrixXd preds(y.size(), 2);
    preds.col(0) = gamma * y + (1.0 - gamma) * e1;
    preds.col(1) = (1.0 - gamma) * y + gamma * e2;
    return preds;
}

SyntheticDraw finish_draw(MatrixXd features, const VectorXd& y, MatrixXd preds, Index n) {
    RawDataset raw{std::move(features), y.head(n), std::move(preds)};
    return {validate_dataset(std::move(raw)), y};
}

double sd_of(const std::vector<double>& xs, double mean) {
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

}  // namespace

void validate_config(const SyntheticConfig& cfg) {
    check_sizes(cfg.N, cfg.n, cfg.reps);
    check_gamma(cfg.gamma);
    if (!std::isfinite(cfg.theta_star)) {
        throw Error(ErrorCode::ConfigError, "theta_star must be finite");
    }
}

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep) {
    return splitmix64(splitmix64(seed) ^ splitmix64(rep + 0x632BE59BD9B4E019ULL));
}

std::mt19937_64 replication_engine(std::uint64_t seed, std::uint64_t rep) {
    const std::uint64_t s = replication_seed(seed, rep);
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
    return std::mt19937_64(seq);
}

SyntheticDraw generate_synthetic(const SyntheticConfig& cfg, int rep) {
    validate_config(cfg);
    std::mt19937_64 eng = replication_engine(cfg.seed, static_cast<std::uint64_t>(rep));
    const VectorXd y = normal_draws(eng, cfg.N, cfg.theta_star);
    MatrixXd preds = mix_predictions(y, cfg.gamma, eng);
    return finish_draw(MatrixXd::Ones(cfg.N, 1), y, std::move(preds), cfg.n);
}

SyntheticDraw generate_linear_synthetic(const LinearSyntheticConfig& cfg, int rep) {
    check_sizes(cfg.N, cfg.n, cfg.reps);
    check_gamma(cfg.gamma);
    std::mt19937_64 eng = replication_engine(cfg.seed, static_cast<std::uint64_t>(rep));
    const VectorXd x = normal_draws(eng, cfg.N);
    const VectorXd noise = normal_draws(eng, cfg.N);
    const VectorXd y = (cfg.intercept + cfg.slope * x.array() + noise.array()).matrix();
    MatrixXd features(cfg.N, 2);
    features.col(0).setOnes();
    features.col(1) = x;
    MatrixXd preds = mix_predictions(y, cfg.gamma, eng);
    return finish_draw(std::move(features), y, std::move(preds), cfg.n);
}

SyntheticDraw generate_conditional_mean(const ConditionalMeanConfig& cfg, int rep) {
    check_sizes(cfg.N, cfg.n, cfg.reps);
    std::mt19937_64 eng = replication_engine(cfg.seed, static_cast<std::uint64_t>(rep));
    const VectorXd x = normal_draws(eng, cfg.N);
    const VectorXd eta = normal_draws(eng, cfg.N);
    const VectorXd noise = normal_draws(eng, cfg.N);
    const VectorXd y = x + eta;
    MatrixXd preds(cfg.N, 2);
    preds.col(0) = x;
    preds.col(1) = noise;
    return finish_draw(x, y, std::move(preds), cfg.n);
}

std::string MethodSpec::label() const {
    std::string out(method_tag(method));
    if (column >= 0) out += "_" + std::to_string(column + 1);
    return out;
}

std::vector<MethodSpec> parse_methods(std::string_view text, Index K) {
    std::vector<MethodSpec> out;
    auto push = [&out](MethodSpec s) {
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    };
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        std::string_view item = text.substr(start, end - start);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        start = end + 1;
        if (item.empty()) continue;

        const std::size_t colon = item.find(':');
        const std::string_view tag = item.substr(0, colon);
        const auto method = method_from_tag(tag);
        if (!method) {
            throw Error(ErrorCode::ConfigError, "unknown method '" + std::string(tag) + "'");
        }
        const bool per_column = *method == Method::Ppi || *method == Method::PpiPlusPlus;
        if (colon == std::string_view::npos) {
            if (per_column) {
                for (Index k = 0; k < K; ++k) push({*method, k});
            } else {
                push({*method, -1});
            }
            continue;
        }
        if (!per_column) {
            throw Error(ErrorCode::ConfigError,
                        "method '" + std::string(tag) + "' takes no column index");
        }
        const std::string idx(item.substr(colon + 1));
        std::size_t used = 0;
        long k = 0;
        try {
            k = std::stol(idx, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != idx.size() || idx.empty() || k < 1 || k > K) {
            throw Error(ErrorCode::ConfigError, "bad prediction column in '" + std::string(item) +
                                                    "' (expected 1.." + std::to_string(K) + ")");
        }
        push({*method, static_cast<Index>(k - 1)});
    }
    if (out.empty()) {
        throw Error(ErrorCode::ConfigError, "method list is empty");
    }
    return out;
}

EstimateReport run_method(const MethodSpec& spec, const Dataset& ds, const ScoreModel& model,
                          const EstimatorOptions& opts, const VectorXd* truth) {
    switch (spec.method) {
        case Method::Naive: {
            EstimateReport r = naive_estimate(ds, model, opts.solver);
            r.diagnostics.centering = opts.centering;
            r.diagnostics.ridge_scale = opts.ridge_scale;
            return r;
        }
        case Method::Ppi: {
            EstimateReport r = ppi_estimate(ds, model, spec.column, opts.solver);
            r.diagnostics.centering = opts.centering;
            r.diagnostics.ridge_scale = opts.ridge_scale;
            return r;
        }
        case Method::PpiPlusPlus:
            return ppi_pp_estimate(ds, model, spec.column, opts);
        case Method::Sada:
            return sada_estimate(ds, model, opts);
        case Method::Oracle:
            if (truth == nullptr) {
                throw Error(ErrorCode::ConfigError, "oracle method requires true labels");
            }
            return oracle_estimate(ds, *truth, model, opts.solver);
    }
    throw Error(ErrorCode::ConfigError, "unhandled method");
}

const MethodSummary& SimStudyResult::find(std::string_view label) const {
    for (const auto& m : methods) {
        if (m.spec.label() == label) return m;
    }
    throw Error(ErrorCode::ConfigError, "no method '" + std::string(label) + "' in study");
}

SimStudyResult run_study(const DrawFn& draw, std::uint64_t seed, int reps, const ScoreModel& model,
                         double truth, const std::vector<MethodSpec>& methods,
                         const StudyOptions& opts) {
    if (methods.empty()) {
        throw Error(ErrorCode::ConfigError, "method list is empty");
    }
    if (reps < 1) {
        throw Error(ErrorCode::ConfigError, "reps must be >= 1");
    }
    if (opts.component < 0 || opts.component >= model.p) {
        throw Error(ErrorCode::ConfigError, "summarized component out of range");
    }

    // Naive always runs as the efficiency baseline.
    std::vector<MethodSpec> all = methods;
    const MethodSpec naive_spec{Method::Naive, -1};
    if (std::find(all.begin(), all.end(), naive_spec) == all.end()) all.push_back(naive_spec);
    const std::size_t M = all.size();
    const std::size_t R = static_cast<std::size_t>(reps);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<double> estimate(M * R, nan);
    std::vector<char> covered(M * R, 0);
    std::vector<std::string> failure(M * R);

    auto run_rep = [&](std::size_t r) {
        std::optional<SyntheticDraw> d;
        try {
            d.emplace(draw(static_cast<int>(r)));
        } catch (const std::exception& e) {
            for (std::size_t m = 0; m < M; ++m) failure[m * R + r] = e.what();
            return;
        }
        for (std::size_t m = 0; m < M; ++m) {
            try {
                EstimateReport rep = run_method(all[m], d->data, model, opts.estimator, &d->truth);
                attach_inference(rep, d->data, model, opts.level, &d->truth);
                const Interval& ci = rep.intervals[opts.component];
                estimate[m * R + r] = rep.theta_hat(opts.component);
                covered[m * R + r] = ci.lo <= truth && truth <= ci.hi;
            } catch (const std::exception& e) {
                failure[m * R + r] = e.what();
            }
        }
    };

    int workers = opts.workers;
    if (workers <= 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<int>(workers, reps);
    if (workers == 1) {
        for (std::size_t r = 0; r < R; ++r) run_rep(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < R; r = next++) run_rep(r);
            });
        }
        for (auto& t : pool) t.join();
    }

    SimStudyResult out;
    out.reps = reps;
    out.truth = truth;
    out.rep_seeds.reserve(R);
    for (std::size_t r = 0; r < R; ++r) out.rep_seeds.push_back(replication_seed(seed, r));

    std::vector<MethodSummary> summaries(M);
    for (std::size_t m = 0; m < M; ++m) {
        MethodSummary& s = summaries[m];
        s.spec = all[m];
        s.estimates.assign(estimate.begin() + m * R, estimate.begin() + (m + 1) * R);
        std::vector<double> good;
        int hits = 0;
        for (std::size_t r = 0; r < R; ++r) {
            if (!failure[m * R + r].empty()) {
                ++s.failed;
                if (opts.strict) {
                    throw Error(ErrorCode::ReplicateFailed,
                                "replicate " + std::to_string(r) + " method " + s.spec.label() +
                                    ": " + failure[m * R + r]);
                }
                continue;
            }
            good.push_back(s.estimates[r]);
            hits += covered[m * R + r];
        }
        s.ok = static_cast<int>(good.size());
        if (s.ok == 0) {
            s.mean = s.bias = s.sd = s.coverage = nan;
            continue;
        }
        double sum = 0.0;
        for (double g : good) sum += g;
        s.mean = sum / static_cast<double>(s.ok);
        s.bias = s.mean - truth;
        s.sd = sd_of(good, s.mean);
        s.coverage = static_cast<double>(hits) / static_cast<double>(s.ok);
    }

    const MethodSummary& naive = summaries.back().spec == naive_spec
                                     ? summaries.back()
                                     : *std::find_if(summaries.begin(), summaries.end(),
                                                     [&](const MethodSummary& s) {
                                                         return s.spec == naive_spec;
                                                     });
    out.naive_sd = naive.sd;
    const bool baseline_ok = naive.ok >= 2 && naive.sd > 0.0;
    for (auto& s : summaries) {
        s.rel_eff_defined = baseline_ok && s.ok >= 2;
        s.rel_eff = s.rel_eff_defined ? s.sd / naive.sd : nan;
    }
    // Drop the implicit baseline if the caller did not ask for it.
    if (summaries.size() > methods.size()) summaries.pop_back();
    for (const auto& s : summaries) out.failed_total += s.failed;
    out.methods = std::move(summaries);
    return out;
}

SimStudyResult run_replications(const SyntheticConfig& cfg, const std::vector<MethodSpec>& methods,
                                const StudyOptions& opts) {
    validate_config(cfg);
    for (const auto& m : methods) {
        if (m.column >= 2) {
            throw Error(ErrorCode::ConfigError, "synthetic design has two prediction columns");
        }
    }
    return run_study([&cfg](int rep) { return generate_synthetic(cfg, rep); }, cfg.seed, cfg.reps,
                     mean_model(), cfg.theta_star, methods, opts);
}

std::vector<CurveRow> efficiency_curve(const SyntheticConfig& base,
                                       const std::vector<double>& gammas,
                                       const std::vector<MethodSpec>& methods,
                                       const StudyOptions& opts) {
    if (gammas.empty()) {
        throw Error(ErrorCode::ConfigError, "gamma grid is empty");
    }
    std::vector<CurveRow> rows;
    for (double g : gammas) {
        SyntheticConfig cfg = base;
        cfg.gamma = g;
        SimStudyResult res = run_replications(cfg, methods, opts);
        for (auto& s : res.methods) rows.push_back({g, std::move(s)});
    }
    return rows;
}

double eif_bound_variance(double noise_variance, double mean_function_variance, Index n, Index N) {
    const double pi = static_cast<double>(n) / static_cast<double>(N);
    return (noise_variance / pi + mean_function_variance) / static_cast<double>(N);
}

ConditionalMeanResult conditional_mean_study(const ConditionalMeanConfig& cfg,
                                             const std::vector<MethodSpec>& methods,
                                             const StudyOptions& opts) {
    check_sizes(cfg.N, cfg.n, cfg.reps);
    ConditionalMeanResult out;
    out.study = run_study([&cfg](int rep) { return generate_conditional_mean(cfg, rep); },
                          cfg.seed, cfg.reps, mean_model(), 0.0, methods, opts);
    out.bound_variance = eif_bound_variance(1.0, 1.0, cfg.n, cfg.N);
    out.bound_sd = std::sqrt(out.bound_variance);
    return out;
}

SimStudyResult linear_study(const LinearSyntheticConfig& cfg, const std::vector<MethodSpec>& methods,
                            const StudyOptions& opts) {
    check_sizes(cfg.N, cfg.n, cfg.reps);
    StudyOptions o = opts;
    o.component = 1;
    return run_study([&cfg](int rep) { return generate_linear_synthetic(cfg, rep); }, cfg.seed,
                     cfg.reps, ols_model(2), cfg.slope, methods, o);
}

}  // namespace sada
