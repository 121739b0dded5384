#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "typosearch/alphabet.hpp"
#include "typosearch/model.hpp"

namespace typosearch {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Match {
  std::string name;
  std::size_t class_index = 0;
  double similarity = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

// Unit-normalized catalog embeddings, one row per entry in catalog order.
struct EmbeddingIndex {
  std::vector<std::string> names;
  RowMatrix vectors;
  std::string checkpoint_digest;
  std::string catalog_digest;
  std::int64_t built_at = 0;

  std::size_t size() const noexcept { return names.size(); }
  std::size_t dims() const noexcept {
    return static_cast<std::size_t>(vectors.cols());
  }
};

std::string catalog_digest(std::span<const std::string> catalog);

// Throws Error(kCatalog) on canonical duplicates and Error(kZeroEmbedding) if
// any entry embeds to the zero vector.
EmbeddingIndex build_index(const ModelParams& params, const Alphabet& alphabet,
                           std::span<const std::string> catalog,
                           std::string checkpoint_digest = {},
                           std::int64_t built_at = 0);

// Top-k by cosine similarity; ties go to the lower class index. Throws
// Error(kEmptyQuery) when `q` canonicalizes to nothing.
std::vector<Match> query(const EmbeddingIndex& index, const ModelParams& params,
                         const Alphabet& alphabet, std::string_view q,
                         std::size_t k);

// Same ranking for an already computed (not necessarily normalized) vector.
std::vector<Match> query_embedding(const EmbeddingIndex& index,
                                   const Vector& embedding, std::size_t k);

void save_index(const EmbeddingIndex& index, std::ostream& out);
std::string save_index_bytes(const EmbeddingIndex& index);
void save_index_file(const EmbeddingIndex& index,
                     const std::filesystem::path& path);

// Throws Error(kLoad) on malformed input and Error(kStaleIndex) when
// `expected_checkpoint_digest` is given and differs from the stored one.
EmbeddingIndex load_index(
    std::istream& in,
    std::optional<std::string> expected_checkpoint_digest = std::nullopt);
EmbeddingIndex load_index_file(
    const std::filesystem::path& path,
    std::optional<std::string> expected_checkpoint_digest = std::nullopt);

std::string index_digest(const EmbeddingIndex& index);

}  // namespace typosearch
