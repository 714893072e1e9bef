#include "sada/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

#include "sada/csv.hpp"

namespace sada {

namespace {

nlohmann::json matrix_json(const MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string flatten_weights(const EstimateReport& r) {
    if (!r.weights) return "";
    std::string out;
    const MatrixXd& w = r.weights->blocks;
    for (Index i = 0; i < w.rows(); ++i) {
        for (Index j = 0; j < w.cols(); ++j) {
            if (!out.empty()) out += ';';
            out += format_full(w(i, j));
        }
    }
    return out;
}

double std_error(const EstimateReport& r, Index j) {
    if (!r.covariance || r.scale_size < 1) return std::nan("");
    return std::sqrt(std::max((*r.covariance)(j, j), 0.0) / static_cast<double>(r.scale_size));
}

}  // namespace

nlohmann::json config_json(const RunConfig& cfg) {
    return {{"model", cfg.model},         {"level", cfg.level},
            {"centering", cfg.centering}, {"ridge_scale", cfg.ridge_scale},
            {"seed", cfg.seed},           {"methods", cfg.methods},
            {"passes", cfg.passes}};
}

nlohmann::json report_record(const EstimateReport& r, const RunConfig& cfg) {
    nlohmann::json rec;
    rec["method"] = std::string(method_tag(r.method));
    rec["label"] = r.label();
    rec["prediction_index"] =
        r.prediction_index ? nlohmann::json(*r.prediction_index + 1) : nlohmann::json(nullptr);
    rec["theta_hat"] = std::vector<double>(r.theta_hat.data(), r.theta_hat.data() + r.theta_hat.size());
    rec["covariance"] = r.covariance ? matrix_json(*r.covariance) : nlohmann::json(nullptr);
    rec["scale_size"] = r.scale_size;
    nlohmann::json intervals = nlohmann::json::array();
    for (const Interval& ci : r.intervals) {
        intervals.push_back({{"lo", ci.lo}, {"hi", ci.hi}, {"level", ci.level}});
    }
    rec["intervals"] = std::move(intervals);
    rec["weights"] = r.weights ? matrix_json(r.weights->blocks) : nlohmann::json(nullptr);
    const Diagnostics& d = r.diagnostics;
    rec["diagnostics"] = {
        {"centering", d.centering},
        {"ridge_scale", d.ridge_scale},
        {"ridge_used", d.ridge_used},
        {"unlabeled_fraction_applied", d.unlabeled_fraction_applied},
        {"solver_iterations", d.solver_iterations},
        {"weighting_passes", d.weighting_passes},
        {"fallback_to_naive", d.fallback_to_naive},
        {"floored_diagonals", d.floored_diagonals},
        {"scalar_weight", d.scalar_weight ? nlohmann::json(*d.scalar_weight) : nlohmann::json(nullptr)},
        {"notes", d.notes},
    };
    rec["seed"] = cfg.seed;
    return rec;
}

void write_estimates_csv(const std::vector<EstimateReport>& reports, const RunConfig& cfg,
                         std::ostream& out) {
    out << "label,method,column,component,estimate,std_error,ci_lo,ci_hi,level,centering,"
           "ridge_scale,seed\n";
    for (const auto& r : reports) {
        for (Index j = 0; j < r.theta_hat.size(); ++j) {
            const bool has_ci = j < static_cast<Index>(r.intervals.size());
            out << r.label() << ',' << method_tag(r.method) << ','
                << (r.prediction_index ? std::to_string(*r.prediction_index + 1) : "") << ','
                << j + 1 << ',' << format_full(r.theta_hat(j)) << ','
                << format_full(std_error(r, j)) << ','
                << (has_ci ? format_full(r.intervals[j].lo) : "NA") << ','
                << (has_ci ? format_full(r.intervals[j].hi) : "NA") << ','
                << format_full(cfg.level) << ',' << (r.diagnostics.centering ? "on" : "off")
                << ',' << format_full(r.diagnostics.ridge_scale) << ',' << cfg.seed << '\n';
        }
    }
}

double estimated_variance(const EstimateReport& r) {
    if (!r.covariance || r.scale_size < 1) return std::nan("");
    return r.covariance->trace() / static_cast<double>(r.scale_size);
}

void write_compare_csv(const std::vector<EstimateReport>& sorted, const RunConfig& cfg,
                       std::ostream& out) {
    out << "rank,label,method,column,component,estimate,std_error,ci_lo,ci_hi,"
           "estimated_variance,weights,fallback_to_naive,centering,ridge_scale,seed\n";
    int rank = 0;
    for (const auto& r : sorted) {
        ++rank;
        for (Index j = 0; j < r.theta_hat.size(); ++j) {
            out << rank << ',' << r.label() << ',' << method_tag(r.method) << ','
                << (r.prediction_index ? std::to_string(*r.prediction_index + 1) : "") << ','
                << j + 1 << ',' << format_full(r.theta_hat(j)) << ','
                << format_full(std_error(r, j)) << ',' << format_full(r.intervals.at(j).lo) << ','
                << format_full(r.intervals.at(j).hi) << ',' << format_full(estimated_variance(r))
                << ',' << flatten_weights(r) << ',' << (r.diagnostics.fallback_to_naive ? 1 : 0)
                << ',' << (r.diagnostics.centering ? "on" : "off") << ','
                << format_full(r.diagnostics.ridge_scale) << ',' << cfg.seed << '\n';
        }
    }
}

void write_human_table(const std::vector<EstimateReport>& reports, std::ostream& out) {
    out << std::left << std::setw(12) << "method" << std::setw(6) << "comp" << std::setw(12)
        << "estimate" << std::setw(12) << "std.err" << std::setw(24) << "interval"
        << "weights\n";
    for (const auto& r : reports) {
        for (Index j = 0; j < r.theta_hat.size(); ++j) {
            std::string ci = "NA";
            if (j < static_cast<Index>(r.intervals.size())) {
                ci = "[" + format_short(r.intervals[j].lo) + ", " +
                     format_short(r.intervals[j].hi) + "]";
            }
            std::string weights;
            if (j == 0 && r.weights && r.weights->p == 1) {
                for (Index k = 0; k < r.weights->K; ++k) {
                    weights += (k ? " " : "") + format_short(r.weights->blocks(k, 0));
                }
            }
            out << std::setw(12) << (j == 0 ? r.label() : "") << std::setw(6) << j + 1
                << std::setw(12) << format_short(r.theta_hat(j)) << std::setw(12)
                << format_short(std_error(r, j)) << std::setw(24) << ci << weights << '\n';
        }
    }
}

void write_efficiency_csv(const std::vector<CurveRow>& rows, const RunConfig& cfg,
                          std::ostream& out) {
    out << "gamma,method,rel_eff,coverage,sd,mean,bias,reps_ok,reps_failed,rel_eff_defined,"
           "centering,ridge_scale,seed\n";
    for (const auto& row : rows) {
        const MethodSummary& s = row.summary;
        out << format_full(row.gamma) << ',' << s.spec.label() << ','
            << (s.rel_eff_defined ? format_full(s.rel_eff) : "NA") << ','
            << format_full(s.coverage) << ',' << format_full(s.sd) << ','
            << format_full(s.mean) << ',' << format_full(s.bias) << ',' << s.ok << ','
            << s.failed << ',' << (s.rel_eff_defined ? 1 : 0) << ','
            << (cfg.centering ? "on" : "off") << ',' << format_full(cfg.ridge_scale) << ','
            << cfg.seed << '\n';
    }
}

void write_replications_csv(const std::vector<CurveRow>& rows,
                            const std::vector<std::uint64_t>& rep_seeds, std::ostream& out) {
    out << "gamma,rep,rep_seed,method,estimate\n";
    for (const auto& row : rows) {
        const auto& est = row.summary.estimates;
        for (std::size_t r = 0; r < est.size(); ++r) {
            out << format_full(row.gamma) << ',' << r << ','
                << (r < rep_seeds.size() ? std::to_string(rep_seeds[r]) : "") << ','
                << row.summary.spec.label() << ',' << format_full(est[r]) << '\n';
        }
    }
}

void write_efficiency_svg(const std::vector<CurveRow>& rows, std::ostream& out) {
    constexpr double width = 640, height = 420, left = 60, right = 150, top = 30, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    std::vector<std::string> order;
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    double ymax = 1.2;
    for (const auto& row : rows) {
        const std::string label = row.summary.spec.label();
        if (!series.count(label)) order.push_back(label);
        auto& pts = series[label];
        if (row.summary.rel_eff_defined) {
            pts.emplace_back(row.gamma, row.summary.rel_eff);
            ymax = std::max(ymax, row.summary.rel_eff);
        }
    }
    ymax = std::ceil(ymax * 5.0) / 5.0;
    auto px = [&](double g) { return left + g * plot_w; };
    auto py = [&](double v) { return top + (1.0 - v / ymax) * plot_h; };
    static const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                    "#66a61e", "#e6ab02", "#a6761d", "#666666"};

    out << std::fixed << std::setprecision(2);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double g = t / 5.0;
        out << "<text x=\"" << px(g) << "\" y=\"" << top + plot_h + 16
            << "\" text-anchor=\"middle\">" << g << "</text>\n";
        const double v = ymax * t / 5.0;
        out << "<text x=\"" << left - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">"
            << v << "</text>\n";
    }
    out << "<line x1=\"" << left << "\" y1=\"" << py(1.0) << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << py(1.0) << "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\">gamma</text>\n";
    out << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 16 " << top + plot_h / 2 << ")\">relative efficiency</text>\n";

    for (std::size_t s = 0; s < order.size(); ++s) {
        const char* colour = palette[s % (sizeof palette / sizeof *palette)];
        const auto& pts = series[order[s]];
        if (!pts.empty()) {
            out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
            for (std::size_t i = 0; i < pts.size(); ++i) {
                out << (i ? " " : "") << px(pts[i].first) << ',' << py(pts[i].second);
            }
            out << "\"/>\n";
        }
        const double ly = top + 14.0 * static_cast<double>(s) + 6.0;
        out << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly << "\" x2=\""
            << left + plot_w + 32 << "\" y2=\"" << ly << "\" stroke=\"" << colour
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << left + plot_w + 38 << "\" y=\"" << ly + 4 << "\">" << order[s]
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace sada
