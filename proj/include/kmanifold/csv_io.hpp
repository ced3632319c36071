#pragma once

#include <string>

#include "kmanifold/datagen.hpp"

namespace kmanifold {

/// Comma-separated numeric matrix, optionally preceded by one header row.
/// Throws ParseError (with line and column) or RaggedRows.
Dataset read_csv(const std::string& path, bool has_header = false);

/// Writes X with 17 significant digits, so values round-trip exactly.
void write_csv(const Matrix& X, const std::string& path);
inline void write_csv(const Dataset& dataset, const std::string& path) { write_csv(dataset.X, path); }

/// One base-10 integer per line; blank lines ignored.
ClusterLabels read_labels(const std::string& path);
void write_labels(const ClusterLabels& labels, const std::string& path);

}  // namespace kmanifold
