#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fas {

inline constexpr std::string_view kCsvSchemaLine = "# fas-secrecy v1";

/// Shortest round-trip text is not used on purpose: 17 significant digits,
/// '.' decimal point, no locale. nan/inf print as "nan", "inf", "-inf".
std::string format_number(double x);

/// Quote a field if it contains a comma, quote or newline.
std::string csv_field(std::string_view s);

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

/// Schema line, then one row per matrix row.
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);

}  // namespace fas
