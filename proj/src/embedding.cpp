#include "apthunt/embedding.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>

#include "apthunt/errors.hpp"
#include "apthunt/util.hpp"

namespace apthunt::embedding {

VectorTable::VectorTable(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw InputError("vector table dim must be > 0");
}

bool VectorTable::add(std::string token, Vector v) {
    if (v.size() != dim_) throw InputError("vector length " + std::to_string(v.size()) + " != dim " + std::to_string(dim_));
    if (index_.contains(token)) return false;
    index_.emplace(std::move(token), vectors_.size());
    vectors_.push_back(std::move(v));
    return true;
}

const Vector* VectorTable::find(std::string_view token) const {
    // heterogeneous lookup is C++20 but needs a transparent hasher; a copy is cheap here
    auto it = index_.find(std::string(token));
    return it == index_.end() ? nullptr : &vectors_[it->second];
}

namespace {

std::vector<std::string_view> fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

VectorTable parse_vectors(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    auto next_line = [&](std::string_view& line) {
        if (pos >= text.size()) return false;
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        return true;
    };

    std::string_view line;
    if (!next_line(line)) throw FormatError("empty vector file", 1);
    auto header = fields(line);
    std::size_t count = 0, dim = 0;
    if (header.size() != 2 || !parse_number(header[0], count) || !parse_number(header[1], dim) || dim == 0)
        throw FormatError("expected header \"count dim\"", line_no);

    VectorTable table(dim);
    while (next_line(line)) {
        auto f = fields(line);
        if (f.empty()) continue;
        if (f.size() != dim + 1)
            throw FormatError("expected " + std::to_string(dim) + " values for token '" + std::string(f[0]) + "', got " +
                                  std::to_string(f.size() - 1),
                              line_no);
        Vector v(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            if (!parse_number(f[k + 1], v[k])) throw FormatError("bad float '" + std::string(f[k + 1]) + "'", line_no);
        }
        if (!table.add(std::string(f[0]), std::move(v)))
            spdlog::warn("vector table: duplicate token '{}' at line {} ignored", f[0], line_no);
    }
    if (table.size() != count)
        spdlog::warn("vector table: header declares {} tokens, read {}", count, table.size());
    return table;
}

VectorTable load_vectors(const std::filesystem::path& path) {
    auto text = util::read_file(path);
    auto table = parse_vectors(text);
    table.fingerprint = "sha256:" + util::sha256_hex(text);
    return table;
}

std::vector<std::string> char_ngrams(std::string_view token, std::size_t min_n, std::size_t max_n) {
    std::string word = "<" + std::string(token) + ">";
    std::vector<std::string> out;
    for (std::size_t n = min_n; n <= max_n; ++n) {
        if (n > word.size()) break;
        for (std::size_t i = 0; i + n <= word.size(); ++i) {
            // the whole bracketed word is the token itself, not a subword
            if (n == word.size()) continue;
            out.emplace_back(word.substr(i, n));
        }
    }
    return out;
}

Vector embed_token(std::string_view token, const VectorTable& table) {
    if (const Vector* v = table.find(token)) return *v;
    Vector acc(table.dim(), 0.0f);
    std::size_t hits = 0;
    for (const auto& g : char_ngrams(token, table.subword_min, table.subword_max)) {
        if (const Vector* v = table.find(table.ngram_prefix + g)) {
            for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += (*v)[k];
            ++hits;
        }
    }
    if (hits > 1)
        for (auto& x : acc) x /= static_cast<float>(hits);
    return acc;
}

Vector embed_phrase(std::span<const std::string> tokens, const VectorTable& table) {
    if (tokens.empty()) throw InputError("cannot embed an empty phrase");
    std::vector<double> acc(table.dim(), 0.0);
    for (const auto& t : tokens) {
        auto v = embed_token(t, table);
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += v[k];
    }
    Vector out(acc.size());
    const double n = static_cast<double>(tokens.size());
    for (std::size_t k = 0; k < acc.size(); ++k) out[k] = static_cast<float>(acc[k] / n);
    return out;
}

double norm(std::span<const float> v) {
    double s = 0.0;
    for (float x : v) s += static_cast<double>(x) * x;
    return std::sqrt(s);
}

double cosine(std::span<const float> u, std::span<const float> v) {
    if (u.size() != v.size())
        throw InputError("cosine: length mismatch " + std::to_string(u.size()) + " vs " + std::to_string(v.size()));
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        dot += static_cast<double>(u[k]) * v[k];
        nu += static_cast<double>(u[k]) * u[k];
        nv += static_cast<double>(v[k]) * v[k];
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

}  // namespace apthunt::embedding
