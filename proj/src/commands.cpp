#include "sada/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "sada/csv.hpp"
#include "sada/error.hpp"
#include "sada/inference.hpp"
#include "sada/report.hpp"

namespace sada {

namespace fs = std::filesystem;

namespace {

fs::path prepare_out(const RunConfig& cfg) {
    fs::path dir(cfg.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create output directory '" + cfg.out + "'");
    }
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    return f;
}

std::vector<EstimateReport> run_methods(const RunConfig& cfg, const LoadedDataset& loaded,
                                        const std::vector<MethodSpec>& methods) {
    const ScoreModel model = model_by_name(cfg.model, loaded.data.d());
    const EstimatorOptions opts = estimator_options(cfg);
    std::vector<EstimateReport> reports;
    for (const auto& spec : methods) {
        if (spec.method == Method::Oracle) {
            throw Error(ErrorCode::ConfigError, "oracle needs true labels; simulation only");
        }
        EstimateReport r = run_method(spec, loaded.data, model, opts);
        attach_inference(r, loaded.data, model, cfg.level);
        reports.push_back(std::move(r));
    }
    return reports;
}

nlohmann::json dataset_json(const LoadedDataset& loaded, const std::string& path) {
    const Dataset& ds = loaded.data;
    return {{"path", path},
            {"N", ds.N()},
            {"n", ds.n()},
            {"K", ds.K()},
            {"d", ds.d()},
            {"features", loaded.feature_names},
            {"predictions", loaded.prediction_names},
            {"source_rows", loaded.source_rows}};
}

}  // namespace

int exit_code_for(const Error& e) {
    switch (e.category()) {
        case ErrorCategory::Config: return kExitConfig;
        case ErrorCategory::Data: return kExitData;
        case ErrorCategory::Io: return kExitData;
        case ErrorCategory::Numerical: return kExitNumerical;
    }
    return kExitNumerical;
}

std::vector<EstimateReport> cmd_estimate(const RunConfig& cfg, const std::string& csv_path,
                                         std::ostream& log) {
    validate_run_config(cfg);
    const LoadedDataset loaded = load_dataset_csv(csv_path);
    const std::string method_text = cfg.methods.empty() ? "naive,sada" : cfg.methods;
    const auto methods = parse_methods(method_text, loaded.data.K());
    std::vector<EstimateReport> reports = run_methods(cfg, loaded, methods);

    const fs::path dir = prepare_out(cfg);
    nlohmann::json doc;
    doc["command"] = "estimate";
    doc["config"] = config_json(cfg);
    doc["dataset"] = dataset_json(loaded, csv_path);
    doc["records"] = nlohmann::json::array();
    for (const auto& r : reports) doc["records"].push_back(report_record(r, cfg));
    open_out(dir / "report.json") << doc.dump(2) << '\n';
    {
        auto f = open_out(dir / "estimates.csv");
        write_estimates_csv(reports, cfg, f);
    }
    write_human_table(reports, log);
    return reports;
}

std::vector<EstimateReport> cmd_compare(const RunConfig& cfg, const std::string& csv_path,
                                        std::ostream& log) {
    validate_run_config(cfg);
    const LoadedDataset loaded = load_dataset_csv(csv_path);
    const auto methods = parse_methods("naive,ppi,ppi_pp,sada", loaded.data.K());
    std::vector<EstimateReport> reports = run_methods(cfg, loaded, methods);
    std::stable_sort(reports.begin(), reports.end(),
                     [](const EstimateReport& a, const EstimateReport& b) {
                         return estimated_variance(a) < estimated_variance(b);
                     });

    const fs::path dir = prepare_out(cfg);
    {
        auto f = open_out(dir / "compare.csv");
        write_compare_csv(reports, cfg, f);
    }
    nlohmann::json doc;
    doc["command"] = "compare";
    doc["config"] = config_json(cfg);
    doc["dataset"] = dataset_json(loaded, csv_path);
    doc["records"] = nlohmann::json::array();
    for (const auto& r : reports) doc["records"].push_back(report_record(r, cfg));
    open_out(dir / "report.json") << doc.dump(2) << '\n';
    write_human_table(reports, log);
    return reports;
}

std::vector<CurveRow> cmd_simulate(const RunConfig& cfg, std::ostream& log) {
    validate_run_config(cfg);
    if (cfg.model != "mean") {
        throw Error(ErrorCode::ConfigError, "simulate uses the mean model only");
    }
    SyntheticConfig base;
    base.theta_star = cfg.theta_star;
    base.N = cfg.N;
    base.n = cfg.n;
    base.reps = cfg.reps;
    base.seed = cfg.seed;
    const auto methods =
        parse_methods(cfg.methods.empty() ? "naive,ppi,ppi_pp,sada" : cfg.methods, 2);

    StudyOptions opts;
    opts.workers = cfg.workers;
    opts.strict = cfg.strict;
    opts.level = cfg.level;
    opts.estimator = estimator_options(cfg);
    const std::vector<CurveRow> rows = efficiency_curve(base, cfg.gamma_grid, methods, opts);

    std::vector<std::uint64_t> seeds;
    for (int r = 0; r < cfg.reps; ++r) seeds.push_back(replication_seed(cfg.seed, r));

    const fs::path dir = prepare_out(cfg);
    {
        auto f = open_out(dir / "efficiency.csv");
        write_efficiency_csv(rows, cfg, f);
    }
    {
        auto f = open_out(dir / "efficiency.svg");
        write_efficiency_svg(rows, f);
    }
    {
        auto f = open_out(dir / "replications.csv");
        write_replications_csv(rows, seeds, f);
    }
    open_out(dir / "run.conf") << serialize(cfg);

    log << "gamma   method      rel_eff   coverage\n";
    for (const auto& row : rows) {
        log << std::left << std::setw(8) << format_short(row.gamma) << std::setw(12)
            << row.summary.spec.label() << std::setw(10)
            << (row.summary.rel_eff_defined ? format_short(row.summary.rel_eff) : "NA")
            << format_short(row.summary.coverage) << '\n';
    }
    return rows;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Safe and adaptive aggregation of multiple prediction columns", "sada"};
    app.require_subcommand(1);

    struct Flags {
        std::string config_path, data;
        std::map<std::string, std::string> values;
        bool strict = true;
    } flags;

    const std::vector<std::pair<std::string, std::string>> keyed = {
        {"--model", "mean | ols | logistic"},
        {"--level", "confidence level in (0, 1)"},
        {"--seed", "64-bit seed"},
        {"--reps", "Monte Carlo replications"},
        {"--gamma-grid", "gamma list a,b,c or start:stop:step"},
        {"--methods", "comma list: naive, ppi[:k], ppi_pp[:k], sada, oracle"},
        {"--centering", "on | off"},
        {"--ridge-scale", "gram ridge scale (>= 0)"},
        {"--out", "output directory"},
        {"--workers", "replication worker threads"},
        {"--theta-star", "synthetic true mean"},
        {"--N", "synthetic total size"},
        {"--n", "synthetic labeled size"},
        {"--passes", "weighting passes (1 = single pass)"},
    };

    std::vector<CLI::App*> subs;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config_path, "key = value configuration file");
        for (const auto& [name, help] : keyed) {
            sub->add_option(name, flags.values[name.substr(2)], help);
        }
        sub->add_flag("--strict,!--no-strict", flags.strict,
                      "abort on any failed replicate (default on)");
        subs.push_back(sub);
    };
    CLI::App* estimate = app.add_subcommand("estimate", "estimate from a prediction CSV");
    estimate->add_option("data", flags.data, "input CSV")->required();
    add_common(estimate);
    CLI::App* compare = app.add_subcommand("compare", "side-by-side method comparison");
    compare->add_option("data", flags.data, "input CSV")->required();
    add_common(compare);
    CLI::App* simulate = app.add_subcommand("simulate", "synthetic efficiency study");
    add_common(simulate);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: ConfigError: " << e.what() << '\n';
        return kExitConfig;
    }

    CLI::App* active = nullptr;
    for (CLI::App* sub : subs) {
        if (sub->parsed()) active = sub;
    }

    try {
        RunConfig cfg;
        if (!flags.config_path.empty()) {
            for (const auto& [key, value] : read_key_values_file(flags.config_path)) {
                apply_setting(cfg, key, value);
            }
        }
        for (const auto& [name, help] : keyed) {
            if (active->count(name) > 0) apply_setting(cfg, name.substr(2), flags.values[name.substr(2)]);
        }
        if (active->count("--strict") > 0 || active->count("--no-strict") > 0) {
            cfg.strict = flags.strict;
        }

        if (active == estimate) {
            cmd_estimate(cfg, flags.data, out);
        } else if (active == compare) {
            cmd_compare(cfg, flags.data, out);
        } else {
            cmd_simulate(cfg, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.name() << ": " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: InternalError: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace sada
