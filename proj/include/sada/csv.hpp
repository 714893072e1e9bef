#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "sada/dataset.hpp"

namespace sada {

// Columns: "x_*" features (header order), "y" label (empty cell = unlabeled),
// "yhat_*" predictions (lexical order defines k = 1..K). Other columns are
// ignored. Rows are reordered labeled-first, keeping relative order.
struct LoadedDataset {
    Dataset data;
    // 0-based data-row index in the source file for each dataset row.
    std::vector<std::size_t> source_rows;
    std::vector<std::string> feature_names;
    std::vector<std::string> prediction_names;
};

LoadedDataset parse_dataset_csv(std::istream& in, const std::string& source = "<input>");
LoadedDataset load_dataset_csv(const std::string& path);

// Writes columns x_1.., y, yhat_1.. (zero-padded so lexical order is column
// order); unlabeled rows get an empty y cell.
void write_dataset_csv(const Dataset& ds, std::ostream& out);

// 17 significant digits (exact round trip) for machine tables.
std::string format_full(double v);
// 4 significant digits for human tables.
std::string format_short(double v);

}  // namespace sada
