#pragma once

// Matrix CSV reading/writing and atomic file output.
//
// Matrix CSV files hold one sample per row (N rows x D columns) with an
// optional header line; they are transposed on read to the D x N layout the
// solvers use.

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "l1pca/errors.hpp"
#include "l1pca/numlin.hpp"

namespace l1pca::io {

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("row " + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what), line_(0) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace detail

/// Reads samples-as-rows CSV and returns the D x N data matrix.
inline RealMatrix read_matrix_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_fields(line);
        std::vector<double> values(fields.size());
        bool numeric = true;
        for (std::size_t k = 0; k < fields.size(); ++k)
            if (!detail::parse_double(fields[k], values[k])) numeric = false;

        if (!numeric) {
            if (first_content) {  // header
                first_content = false;
                width = fields.size();
                continue;
            }
            throw ParseError(lineno, "non-numeric or non-finite field");
        }
        if (width == 0) width = fields.size();
        if (fields.size() != width)
            throw ParseError(lineno, "expected " + std::to_string(width) + " fields, got " +
                                         std::to_string(fields.size()));
        first_content = false;
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw ParseError("no data rows");

    RealMatrix X(static_cast<Eigen::Index>(width), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t n = 0; n < rows.size(); ++n)
        for (std::size_t d = 0; d < width; ++d)
            X(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n)) = rows[n][d];
    return X;
}

inline RealMatrix read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_matrix_csv(in);
}

/// Writes a D x N matrix as samples-as-rows CSV with header x1..xD.
inline void write_matrix_csv(std::ostream& out, const RealMatrix& X) {
    out << std::setprecision(17);
    for (Eigen::Index d = 0; d < X.rows(); ++d) out << (d ? "," : "") << "x" << d + 1;
    out << "\n";
    for (Eigen::Index n = 0; n < X.cols(); ++n) {
        for (Eigen::Index d = 0; d < X.rows(); ++d) out << (d ? "," : "") << X(d, n);
        out << "\n";
    }
}

/// Writes `content` to a sibling temporary file and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace l1pca::io
