#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sada/dataset.hpp"
#include "sada/estimators.hpp"
#include "sada/score_model.hpp"

namespace sada {

// Y ~ N(theta*, 1), yhat_1 = gamma Y + (1 - gamma) e1, yhat_2 = (1 - gamma) Y + gamma e2.
struct SyntheticConfig {
    double theta_star = 0.5;
    Index N = 200;
    Index n = 60;
    double gamma = 0.5;
    int reps = 1000;
    std::uint64_t seed = 20250101;
};

// Linear model y = intercept + slope x + noise with features (1, x), x ~ N(0, 1),
// and the same two-prediction mixing design as SyntheticConfig.
struct LinearSyntheticConfig {
    double intercept = 0.5;
    double slope = 1.0;
    Index N = 200;
    Index n = 60;
    double gamma = 0.5;
    int reps = 2000;
    std::uint64_t seed = 20250101;
};

// X ~ N(0, 1), Y = X + eta, yhat_1 = X = E[Y | X], yhat_2 pure noise; estimand E[Y] = 0.
struct ConditionalMeanConfig {
    Index N = 200;
    Index n = 60;
    int reps = 2000;
    std::uint64_t seed = 20250101;
};

void validate_config(const SyntheticConfig& cfg);

struct SyntheticDraw {
    Dataset data;
    VectorXd truth;  // all N true labels
};

// Independent stream per (seed, rep); identical across worker counts.
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep);
std::mt19937_64 replication_engine(std::uint64_t seed, std::uint64_t rep);

SyntheticDraw generate_synthetic(const SyntheticConfig& cfg, int rep);
SyntheticDraw generate_linear_synthetic(const LinearSyntheticConfig& cfg, int rep);
SyntheticDraw generate_conditional_mean(const ConditionalMeanConfig& cfg, int rep);

struct MethodSpec {
    Method method = Method::Naive;
    Index column = -1;  // 0-based prediction column for ppi / ppi_pp

    std::string label() const;
    bool operator==(const MethodSpec&) const = default;
};

// Comma list such as "naive,ppi:1,ppi_pp,sada". A bare "ppi" or "ppi_pp"
// expands to every prediction column. Columns are 1-based in text.
std::vector<MethodSpec> parse_methods(std::string_view text, Index K);

// Runs one method on a dataset (no inference attached).
EstimateReport run_method(const MethodSpec& spec, const Dataset& ds, const ScoreModel& model,
                          const EstimatorOptions& opts, const VectorXd* truth = nullptr);

struct StudyOptions {
    int workers = 1;
    bool strict = true;
    double level = 0.95;
    EstimatorOptions estimator;
    Index component = 0;  // parameter component summarized
};

struct MethodSummary {
    MethodSpec spec;
    double mean = 0.0;
    double bias = 0.0;
    double sd = 0.0;
    double rel_eff = 0.0;
    double coverage = 0.0;
    int ok = 0;
    int failed = 0;
    // False when fewer than two successful replicates make the SD meaningless.
    bool rel_eff_defined = false;
    // Per-replicate estimates; NaN for failed replicates.
    std::vector<double> estimates;
};

struct SimStudyResult {
    std::vector<MethodSummary> methods;
    std::vector<std::uint64_t> rep_seeds;
    double naive_sd = 0.0;
    double truth = 0.0;
    int reps = 0;
    int failed_total = 0;  // over the reported methods

    const MethodSummary& find(std::string_view label) const;
};

using DrawFn = std::function<SyntheticDraw(int rep)>;

// Generic replication loop. Replicates are distributed over opts.workers
// threads; every summary is an ordered reduction, so results do not depend on
// the worker count. In strict mode any failed replicate throws ReplicateFailed.
SimStudyResult run_study(const DrawFn& draw, std::uint64_t seed, int reps, const ScoreModel& model,
                         double truth, const std::vector<MethodSpec>& methods,
                         const StudyOptions& opts);

SimStudyResult run_replications(const SyntheticConfig& cfg, const std::vector<MethodSpec>& methods,
                                const StudyOptions& opts = {});

struct CurveRow {
    double gamma = 0.0;
    MethodSummary summary;
};

// One run_replications per gamma, sharing the seed (common random numbers).
std::vector<CurveRow> efficiency_curve(const SyntheticConfig& base,
                                       const std::vector<double>& gammas,
                                       const std::vector<MethodSpec>& methods,
                                       const StudyOptions& opts = {});

// Analytic efficient-influence-function variance (sigma^2 / pi + Var m(X)) / N.
double eif_bound_variance(double noise_variance, double mean_function_variance, Index n, Index N);

struct ConditionalMeanResult {
    SimStudyResult study;
    double bound_variance = 0.0;
    double bound_sd = 0.0;
};

ConditionalMeanResult conditional_mean_study(const ConditionalMeanConfig& cfg,
                                             const std::vector<MethodSpec>& methods,
                                             const StudyOptions& opts = {});

SimStudyResult linear_study(const LinearSyntheticConfig& cfg, const std::vector<MethodSpec>& methods,
                            const StudyOptions& opts = {});

}  // namespace sada
