#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace snn {

// Shortest round-trip decimal form.
std::string fmt_double(double v);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void row_text(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    std::string path_;
};

// Creates a directory (and parents); throws IoError when that fails.
void ensure_dir(const std::string& dir);

}  // namespace snn
