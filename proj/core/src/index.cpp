#include "typosearch/index.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "typosearch/digest.hpp"
#include "typosearch/error.hpp"

namespace typosearch {

namespace {

constexpr std::string_view kIndexMagic = "TYPOIDX1";
constexpr std::uint32_t kIndexVersion = 1;

}  // namespace

std::string catalog_digest(std::span<const std::string> catalog) {
  Fnv1a64 h;
  for (const auto& name : catalog) {
    h.update(name);
    h.update(std::string_view("\n", 1));
  }
  return h.hex();
}

EmbeddingIndex build_index(const ModelParams& params, const Alphabet& alphabet,
                           std::span<const std::string> catalog,
                           std::string checkpoint_digest, std::int64_t built_at) {
  if (catalog.empty()) throw Error(ErrorCode::kCatalog, "empty catalog");
  EmbeddingIndex index;
  index.checkpoint_digest = std::move(checkpoint_digest);
  index.built_at = built_at;
  index.vectors.resize(static_cast<Eigen::Index>(catalog.size()),
                       static_cast<Eigen::Index>(params.config.dense_size));
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    std::string name = alphabet.canonicalize(catalog[i]);
    if (name.empty()) {
      throw Error(ErrorCode::kCatalog, "catalog entry " + std::to_string(i) +
                                           " is empty after canonicalization");
    }
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::kCatalog, "duplicate catalog entry '" + name + "'");
    }
    Vector e = embed(params, name, alphabet);
    const double norm = e.norm();
    if (norm == 0.0) {
      throw Error(ErrorCode::kZeroEmbedding,
                  "catalog entry '" + name + "' embeds to the zero vector");
    }
    index.vectors.row(static_cast<Eigen::Index>(i)) = (e / norm).transpose();
    index.names.push_back(std::move(name));
  }
  index.catalog_digest = catalog_digest(index.names);
  return index;
}

std::vector<Match> query_embedding(const EmbeddingIndex& index,
                                   const Vector& embedding, std::size_t k) {
  if (embedding.size() != index.vectors.cols()) {
    throw std::invalid_argument("query embedding has the wrong dimension");
  }
  if (k == 0) throw std::invalid_argument("query: k must be >= 1");
  const std::size_t n = index.size();
  k = std::min(k, n);
  if (k == 0) return {};
  Vector scores = Vector::Zero(static_cast<Eigen::Index>(n));
  const double norm = embedding.norm();
  if (norm > 0.0) scores.noalias() = index.vectors * (embedding / norm);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto better = [&](std::size_t a, std::size_t b) {
    const double sa = scores(static_cast<Eigen::Index>(a));
    const double sb = scores(static_cast<Eigen::Index>(b));
    return sa != sb ? sa > sb : a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                    order.end(), better);
  std::vector<Match> out;
  out.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t i = order[r];
    out.push_back({index.names[i], i, scores(static_cast<Eigen::Index>(i))});
  }
  return out;
}

std::vector<Match> query(const EmbeddingIndex& index, const ModelParams& params,
                         const Alphabet& alphabet, std::string_view q,
                         std::size_t k) {
  const std::string canonical = alphabet.canonicalize(q);
  if (canonical.empty()) throw Error(ErrorCode::kEmptyQuery, "query is empty");
  return query_embedding(index, embed(params, canonical, alphabet), k);
}

std::string save_index_bytes(const EmbeddingIndex& index) {
  const nlohmann::json header = {
      {"count", index.size()},
      {"dims", index.dims()},
      {"catalog_digest", index.catalog_digest},
      {"checkpoint_digest", index.checkpoint_digest},
      {"built_at", index.built_at},
  };
  const std::string header_text = header.dump();
  std::string out;
  out.append(kIndexMagic);
  detail::put_u32(out, kIndexVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(header_text.size()));
  out.append(header_text);
  for (const auto& name : index.names) {
    detail::put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.append(name);
  }
  for (Eigen::Index i = 0; i < index.vectors.size(); ++i) {
    detail::put_f64(out, index.vectors.data()[i]);
  }
  return out;
}

void save_index(const EmbeddingIndex& index, std::ostream& out) {
  const auto bytes = save_index_bytes(index);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void save_index_file(const EmbeddingIndex& index, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  save_index(index, out);
  if (!out) throw Error(ErrorCode::kIo, "error writing " + path.string());
}

EmbeddingIndex load_index(std::istream& in,
                          std::optional<std::string> expected_checkpoint_digest) {
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  detail::Reader r(bytes, "index");
  if (r.take(kIndexMagic.size()) != kIndexMagic) {
    throw Error(ErrorCode::kLoad, "not a typosearch index");
  }
  if (auto version = r.u32(); version != kIndexVersion) {
    throw Error(ErrorCode::kLoad, "unsupported index version " + std::to_string(version));
  }
  EmbeddingIndex index;
  std::size_t count = 0;
  std::size_t dims = 0;
  try {
    const auto header = nlohmann::json::parse(r.take(r.u32()));
    count = header.at("count").get<std::size_t>();
    dims = header.at("dims").get<std::size_t>();
    index.catalog_digest = header.at("catalog_digest").get<std::string>();
    index.checkpoint_digest = header.at("checkpoint_digest").get<std::string>();
    index.built_at = header.at("built_at").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kLoad, std::string("index header: ") + e.what());
  }
  if (expected_checkpoint_digest &&
      *expected_checkpoint_digest != index.checkpoint_digest) {
    throw Error(ErrorCode::kStaleIndex,
                "index was built from checkpoint " + index.checkpoint_digest +
                    ", expected " + *expected_checkpoint_digest);
  }
  if (count > bytes.size() || dims > bytes.size()) {
    throw Error(ErrorCode::kLoad, "index header sizes exceed the file");
  }
  index.names.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    index.names.emplace_back(r.take(r.u32()));
  }
  if (catalog_digest(index.names) != index.catalog_digest) {
    throw Error(ErrorCode::kLoad, "catalog digest mismatch");
  }
  index.vectors.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dims));
  for (Eigen::Index i = 0; i < index.vectors.size(); ++i) {
    index.vectors.data()[i] = r.f64();
  }
  if (!r.done()) throw Error(ErrorCode::kLoad, "trailing bytes after index");
  return index;
}

EmbeddingIndex load_index_file(const std::filesystem::path& path,
                               std::optional<std::string> expected_checkpoint_digest) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return load_index(in, std::move(expected_checkpoint_digest));
}

std::string index_digest(const EmbeddingIndex& index) {
  return digest_hex(save_index_bytes(index));
}

}  // namespace typosearch
