#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "riswie/analysis.hpp"
#include "riswie/point_cloud.hpp"

// File formats used by the command line tool.
//
// Point cloud CSV: one point per row, columns are coordinates. An optional
// header row is detected by a non-numeric first token; blank lines are
// skipped. Decimal points only, no thousands separators.
//
// Distance matrix CSV: when the first cell is non-numeric, the first row and
// column carry ids; otherwise ids are synthesized as "1".."m". Values are
// printed with 17 significant digits so they round-trip exactly.
//
// Malformed content throws Error(parse) with "<path>:<line>:" context, which
// the tool maps to exit code 2.

namespace riswie::tool {

PointCloud read_cloud_csv(const std::string& path);
std::string cloud_to_csv(const Eigen::MatrixXd& points);

DistanceMatrix read_matrix_csv(const std::string& path);
std::string matrix_to_csv(const DistanceMatrix& matrix);

// Labels for stack accuracy scoring. Two layouts: "id,label" rows in any
// order (ids must match the matrix exactly), or one bare label per row in
// matrix row order. A leading "id,label"-style header is skipped when its
// first token is not a known id.
std::vector<std::string> read_labels_csv(const std::string& path,
                                         const std::vector<std::string>& ids);

// %.17g, locale-independent.
std::string format_double(double value);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

// Writes to the path, or to stdout when path is empty.
void emit(const std::string& path, const std::string& text);

}  // namespace riswie::tool
