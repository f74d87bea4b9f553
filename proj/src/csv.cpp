#include "fas/csv.hpp"

#include <charconv>
#include <cmath>

namespace fas {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, ec == std::errc() ? ptr : buf);
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << csv_field(fields[i]);
    }
    os << '\n';
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
    os << kCsvSchemaLine << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<std::string> row;
        row.reserve(m.cols());
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(format_number(m(i, j)));
        write_csv_row(os, row);
    }
}

}  // namespace fas
