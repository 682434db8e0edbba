#pragma once
// Shared helpers for the test suites.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace recall::test {

inline std::string fixture_path(const std::string& rel) {
    return std::string(RECALL_FIXTURE_DIR) + "/" + rel;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open fixture: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace recall::test
