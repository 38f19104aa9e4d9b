#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "apthunt/embedding.hpp"
#include "json.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(APTHUNT_FIXTURE_DIR) / rel; }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline nlohmann::json load_json(const std::string& rel) { return nlohmann::json::parse(slurp(fixture(rel))); }

// Scratch directory removed on scope exit.
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int n = 0;
        path = std::filesystem::temp_directory_path() /
               ("apthunt_test_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::filesystem::path operator/(const std::string& rel) const { return path / rel; }
};

inline void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// Table where each named token gets the given vector as-is.
inline std::shared_ptr<apthunt::embedding::VectorTable> table_of(
    const std::map<std::string, std::vector<float>>& tokens) {
    auto t = std::make_shared<apthunt::embedding::VectorTable>(tokens.begin()->second.size());
    for (const auto& [k, v] : tokens) t->add(k, v);
    return t;
}

// Random table with `n` tokens "w0".."w{n-1}".
inline std::shared_ptr<apthunt::embedding::VectorTable> random_table(std::size_t n, std::size_t dim, std::mt19937& rng) {
    std::normal_distribution<float> g;
    auto t = std::make_shared<apthunt::embedding::VectorTable>(dim);
    for (std::size_t i = 0; i < n; ++i) {
        apthunt::embedding::Vector v(dim);
        for (auto& x : v) x = g(rng);
        t->add("w" + std::to_string(i), std::move(v));
    }
    return t;
}

}  // namespace testing
