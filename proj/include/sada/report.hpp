#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sada/config.hpp"
#include "sada/dataset.hpp"
#include "sada/estimators.hpp"
#include "sada/simulation.hpp"

namespace sada {

// One JSON record per estimator run. Carries method tag, conventions and seed
// so a run can be reproduced from the record alone.
nlohmann::json report_record(const EstimateReport& r, const RunConfig& cfg);
nlohmann::json config_json(const RunConfig& cfg);

// Flat table: one row per (method, component).
void write_estimates_csv(const std::vector<EstimateReport>& reports, const RunConfig& cfg,
                         std::ostream& out);

// Trace of Omega / scale_size, the estimated total variance used for ranking.
double estimated_variance(const EstimateReport& r);

// Side-by-side table sorted by estimated variance; weights flattened as
// "w1;w2;...".
void write_compare_csv(const std::vector<EstimateReport>& sorted, const RunConfig& cfg,
                       std::ostream& out);
void write_human_table(const std::vector<EstimateReport>& reports, std::ostream& out);

// Long format: gamma, method, rel_eff, coverage, ...
void write_efficiency_csv(const std::vector<CurveRow>& rows, const RunConfig& cfg,
                          std::ostream& out);
// Per-replicate estimates: gamma, rep, seed, method, estimate.
void write_replications_csv(const std::vector<CurveRow>& rows,
                            const std::vector<std::uint64_t>& rep_seeds, std::ostream& out);
// Relative-efficiency curves as a standalone SVG document.
void write_efficiency_svg(const std::vector<CurveRow>& rows, std::ostream& out);

}  // namespace sada
