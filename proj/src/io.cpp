#include "vgala/io.hpp"

#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace vgala {

std::string format_double(double v) {
    char buf[64];
    // Shortest precision that round-trips the value exactly.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return std::string(buf);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), n_cols_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != n_cols_)
        throw std::runtime_error("csv row has " + std::to_string(fields.size()) +
                                 " fields, expected " + std::to_string(n_cols_));
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
}

void CsvWriter::row_values(const std::vector<double>& values) {
    std::vector<std::string> fields;
    fields.reserve(values.size());
    for (double v : values) fields.push_back(format_double(v));
    row(fields);
}

void ensure_directory(const std::string& path) {
    std::filesystem::create_directories(path);
}

} // namespace vgala
