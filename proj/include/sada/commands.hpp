#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sada/config.hpp"
#include "sada/error.hpp"
#include "sada/estimators.hpp"
#include "sada/simulation.hpp"

namespace sada {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitData = 3,
    kExitNumerical = 4,
};

int exit_code_for(const Error& e);

// Writes <out>/report.json and <out>/estimates.csv. Default methods: naive,sada.
std::vector<EstimateReport> cmd_estimate(const RunConfig& cfg, const std::string& csv_path,
                                         std::ostream& log);

// Naive, PPI and PPI++ per column, SADA; sorted by estimated variance and
// written to <out>/compare.csv.
std::vector<EstimateReport> cmd_compare(const RunConfig& cfg, const std::string& csv_path,
                                        std::ostream& log);

// Synthetic gamma sweep. Writes <out>/efficiency.csv, <out>/efficiency.svg,
// <out>/replications.csv and <out>/run.conf.
std::vector<CurveRow> cmd_simulate(const RunConfig& cfg, std::ostream& log);

// Entry point; args exclude the program name. Returns the process exit code
// and prints a single "error: <Class>: <message>" line on failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sada
