#include "sada/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "sada/error.hpp"

namespace sada {

namespace {

std::vector<std::string> split_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.emplace_back(line.substr(start));
            break;
        }
        cells.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

double parse_cell(std::string_view cell, std::size_t line_no, const std::string& column,
                  const std::string& source) {
    const std::string_view t = trim(cell);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw Error(ErrorCode::ParseError, source + ": line " + std::to_string(line_no) +
                                               ", column '" + column + "': cannot parse '" +
                                               std::string(cell) + "' as a number");
    }
    return v;
}

std::string padded(std::string_view prefix, Index k, Index total) {
    const std::string digits = std::to_string(total);
    std::string idx = std::to_string(k);
    idx.insert(0, digits.size() - idx.size(), '0');
    return std::string(prefix) + idx;
}

}  // namespace

std::string format_full(double v) {
    if (std::isnan(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_short(double v) {
    if (std::isnan(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v == 0.0 ? 0.0 : v);
    return buf;
}

LoadedDataset parse_dataset_csv(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::SchemaError, source + ": missing header row");
    }
    if (starts_with(line, "\xEF\xBB\xBF")) line.erase(0, 3);
    const std::vector<std::string> header = split_line(line);

    std::vector<std::size_t> x_cols;
    std::vector<std::pair<std::string, std::size_t>> yhat_cols;
    std::size_t y_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name(trim(header[c]));
        if (name == "y") {
            if (y_col != header.size()) {
                throw Error(ErrorCode::SchemaError, source + ": duplicate 'y' column");
            }
            y_col = c;
        } else if (starts_with(name, "yhat_")) {
            yhat_cols.emplace_back(name, c);
        } else if (starts_with(name, "x_")) {
            x_cols.push_back(c);
        }
    }
    if (y_col == header.size()) {
        throw Error(ErrorCode::SchemaError, source + ": missing 'y' column");
    }
    if (yhat_cols.empty()) {
        throw Error(ErrorCode::SchemaError, source + ": no 'yhat_' prediction columns");
    }
    std::sort(yhat_cols.begin(), yhat_cols.end());

    struct Row {
        std::vector<double> x;
        std::vector<double> yhat;
        double y = 0.0;
        bool labeled = false;
        std::size_t index = 0;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            throw Error(ErrorCode::ParseError, source + ": line " + std::to_string(line_no) +
                                                   " has " + std::to_string(cells.size()) +
                                                   " cells, header has " +
                                                   std::to_string(header.size()));
        }
        Row r;
        r.index = rows.size();
        for (std::size_t c : x_cols) {
            r.x.push_back(parse_cell(cells[c], line_no, header[c], source));
        }
        for (const auto& [name, c] : yhat_cols) {
            r.yhat.push_back(parse_cell(cells[c], line_no, name, source));
        }
        if (!trim(cells[y_col]).empty()) {
            r.y = parse_cell(cells[y_col], line_no, "y", source);
            r.labeled = true;
        }
        rows.push_back(std::move(r));
    }

    std::stable_partition(rows.begin(), rows.end(), [](const Row& r) { return r.labeled; });
    const Index N = static_cast<Index>(rows.size());
    const Index n = std::count_if(rows.begin(), rows.end(), [](const Row& r) { return r.labeled; });
    const Index d = static_cast<Index>(x_cols.size());
    const Index K = static_cast<Index>(yhat_cols.size());

    RawDataset raw{MatrixXd(N, d), VectorXd(n), MatrixXd(N, K)};
    std::vector<std::size_t> source_rows;
    for (Index i = 0; i < N; ++i) {
        const Row& r = rows[i];
        for (Index j = 0; j < d; ++j) raw.features(i, j) = r.x[j];
        for (Index k = 0; k < K; ++k) raw.predictions(i, k) = r.yhat[k];
        if (i < n) raw.labels(i) = r.y;
        source_rows.push_back(r.index);
    }

    LoadedDataset out{validate_dataset(std::move(raw)), std::move(source_rows), {}, {}};
    for (std::size_t c : x_cols) out.feature_names.emplace_back(trim(header[c]));
    for (const auto& col : yhat_cols) out.prediction_names.push_back(col.first);
    return out;
}

LoadedDataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    }
    return parse_dataset_csv(in, path);
}

void write_dataset_csv(const Dataset& ds, std::ostream& out) {
    std::vector<std::string> cols;
    for (Index j = 0; j < ds.d(); ++j) cols.push_back(padded("x_", j + 1, ds.d()));
    cols.push_back("y");
    for (Index k = 0; k < ds.K(); ++k) cols.push_back(padded("yhat_", k + 1, ds.K()));
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << '\n';
    for (Index i = 0; i < ds.N(); ++i) {
        for (Index j = 0; j < ds.d(); ++j) out << format_full(ds.features()(i, j)) << ',';
        if (i < ds.n()) out << format_full(ds.labels()(i));
        for (Index k = 0; k < ds.K(); ++k) out << ',' << format_full(ds.predictions()(i, k));
        out << '\n';
    }
}

}  // namespace sada
