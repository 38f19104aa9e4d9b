#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace apthunt::embedding {

using Vector = std::vector<float>;

// Static word-vector table in the common "count dim" text format. Subword
// vectors for out-of-vocabulary composition live in the same file, keyed by
// `ngram_prefix` + the character n-gram of the "<token>"-bracketed word.
class VectorTable {
public:
    VectorTable() = default;
    explicit VectorTable(std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return index_.size(); }

    // Adds a vector; returns false (and keeps the existing one) on duplicates.
    bool add(std::string token, Vector v);
    const Vector* find(std::string_view token) const;
    bool contains(std::string_view token) const { return find(token) != nullptr; }

    std::size_t subword_min = 3;
    std::size_t subword_max = 6;
    std::string ngram_prefix = "##";

    // Identifier recorded in AMID headers and run manifests.
    std::string fingerprint;

private:
    std::size_t dim_ = 0;
    std::vector<Vector> vectors_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Throws FormatError on a dim mismatch; duplicates keep the first occurrence.
VectorTable load_vectors(const std::filesystem::path& path);
VectorTable parse_vectors(std::string_view text);

// Character n-grams of "<token>" within [min_n, max_n], fastText style.
std::vector<std::string> char_ngrams(std::string_view token, std::size_t min_n, std::size_t max_n);

// Vector for one token: stored vector, else mean of known n-gram vectors, else zeros.
Vector embed_token(std::string_view token, const VectorTable& table);

// Mean of token vectors. Throws InputError on an empty phrase.
Vector embed_phrase(std::span<const std::string> tokens, const VectorTable& table);

// u.v / (|u||v|), 0 when either norm is 0, clamped to [-1, 1].
double cosine(std::span<const float> u, std::span<const float> v);

double norm(std::span<const float> v);

}  // namespace apthunt::embedding
