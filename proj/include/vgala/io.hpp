// io.hpp
//
// Small CSV writer with deterministic number formatting. Every experiment
// output goes through format_double() so that reruns with the same manifest
// produce byte-identical files.

#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace vgala {

// Shortest round-trip decimal form ("%.17g" trimmed via a precision ladder).
std::string format_double(double v);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& fields);

    // Convenience for all-numeric rows.
    void row_values(const std::vector<double>& values);

    static std::string cell(double v) { return format_double(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }

private:
    std::ofstream out_;
    std::size_t n_cols_;
};

void ensure_directory(const std::string& path);

} // namespace vgala
