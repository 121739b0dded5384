#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "typosearch/error.hpp"
#include "typosearch/index.hpp"
#include "typosearch/model.hpp"

namespace ts = typosearch;

namespace {

const ts::Alphabet& K() { return ts::Alphabet::standard(); }

ts::ModelConfig config(std::size_t classes) {
  ts::ModelConfig c;
  c.max_seq_len = 16;
  c.hidden_size = 8;
  c.dense_size = 24;
  c.num_classes = classes;
  c.init_seed = 21;
  return c;
}

std::vector<std::string> catalog(std::size_t n) {
  static const char* words[] = {"contoso", "payroll", "ticketing", "pro", "lite", "sync",
                                "hub", "crm", "desk", "vault", "teams", "bot"};
  std::vector<std::string> out;
  for (std::size_t i = 0; out.size() < n; ++i) {
    out.push_back(std::string(words[i % 12]) + " " + words[(i / 12 + i) % 12] + " " +
                  std::to_string(i));
  }
  return out;
}

// Independent exhaustive scan: cosine similarity computed directly from the
// raw embeddings.
std::vector<std::pair<double, std::size_t>> brute_force(const ts::ModelParams& p,
                                                        const std::vector<std::string>& names,
                                                        const std::string& q) {
  const ts::Vector e = ts::embed(p, q, K());
  std::vector<std::pair<double, std::size_t>> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const ts::Vector v = ts::embed(p, names[i], K());
    const double qn = e.norm();
    out.emplace_back(qn == 0.0 ? 0.0 : e.dot(v) / (qn * v.norm()), i);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  return out;
}

}  // namespace

TEST(CatalogDigest, IsOrderSensitive) {
  std::vector<std::string> a = {"x", "y"};
  std::vector<std::string> b = {"y", "x"};
  EXPECT_NE(ts::catalog_digest(a), ts::catalog_digest(b));
  EXPECT_EQ(ts::catalog_digest(a), ts::catalog_digest(std::vector<std::string>{"x", "y"}));
}

TEST(BuildIndex, ShapeAndUnitRows) {
  auto names = catalog(30);
  auto p = ts::init_params(config(30));
  auto index = ts::build_index(p, K(), names, "ck");
  EXPECT_EQ(index.size(), 30u);
  EXPECT_EQ(index.dims(), 24u);
  EXPECT_EQ(index.names, names);
  EXPECT_EQ(index.checkpoint_digest, "ck");
  for (Eigen::Index i = 0; i < index.vectors.rows(); ++i) {
    EXPECT_NEAR(index.vectors.row(i).norm(), 1.0, 1e-9);
  }
}

TEST(BuildIndex, RebuildIsByteIdentical) {
  auto names = catalog(10);
  auto p = ts::init_params(config(10));
  EXPECT_EQ(ts::save_index_bytes(ts::build_index(p, K(), names, "ck")),
            ts::save_index_bytes(ts::build_index(p, K(), names, "ck")));
}

TEST(BuildIndex, DuplicateNamesAreReported) {
  std::vector<std::string> names = {"App X", "app x", "other"};
  try {
    ts::build_index(ts::init_params(config(3)), K(), names);
    FAIL();
  } catch (const ts::Error& e) {
    EXPECT_EQ(e.code(), ts::ErrorCode::kCatalog);
    EXPECT_NE(std::string(e.what()).find("app x"), std::string::npos);
  }
}

TEST(BuildIndex, ZeroEmbeddingIsRejected) {
  std::vector<std::string> names = {"a", "b"};
  try {
    ts::build_index(ts::ModelParams::zeros(config(2)), K(), names);
    FAIL();
  } catch (const ts::Error& e) {
    EXPECT_EQ(e.code(), ts::ErrorCode::kZeroEmbedding);
  }
}

TEST(Query, ExactNameRetrievesItself) {
  auto names = catalog(40);
  auto p = ts::init_params(config(40));
  auto index = ts::build_index(p, K(), names);
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto m = ts::query(index, p, K(), names[i], 1);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_GE(m[0].similarity, 1.0 - 1e-6) << names[i];
    // Untrained models may embed two names identically; then the lower index wins.
    if (m[0].class_index != i) {
      EXPECT_LT(m[0].class_index, i);
      EXPECT_GE(m[0].similarity, 1.0 - 1e-6);
    }
  }
}

TEST(Query, FullRankingIsSortedAndBounded) {
  auto names = catalog(25);
  auto p = ts::init_params(config(25));
  auto index = ts::build_index(p, K(), names);
  auto m = ts::query(index, p, K(), "contso payrol", 25);
  ASSERT_EQ(m.size(), 25u);
  std::vector<std::size_t> classes;
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_GE(m[i].similarity, -1.0 - 1e-9);
    EXPECT_LE(m[i].similarity, 1.0 + 1e-9);
    EXPECT_EQ(m[i].name, names[m[i].class_index]);
    if (i > 0) {
      EXPECT_TRUE(m[i - 1].similarity > m[i].similarity ||
                  (m[i - 1].similarity == m[i].similarity &&
                   m[i - 1].class_index < m[i].class_index));
    }
    classes.push_back(m[i].class_index);
  }
  std::sort(classes.begin(), classes.end());
  std::vector<std::size_t> all(25);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_EQ(classes, all);
  EXPECT_EQ(ts::query(index, p, K(), "contso payrol", 100).size(), 25u);
}

TEST(Query, MatchesBruteForceScan) {
  auto names = catalog(120);
  auto p = ts::init_params(config(120));
  auto index = ts::build_index(p, K(), names);
  for (const std::string q : {"contoso", "payrol tickting 7", "zzz", "crm desk 99", "9"}) {
    auto expected = brute_force(p, names, q);
    auto got = ts::query(index, p, K(), q, 10);
    ASSERT_EQ(got.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) {
      EXPECT_NEAR(got[i].similarity, expected[i].first, 1e-12) << q << " rank " << i;
      if (std::abs(expected[i].first - (i + 1 < expected.size() ? expected[i + 1].first : -2)) >
              1e-12 &&
          (i == 0 || std::abs(expected[i].first - expected[i - 1].first) > 1e-12)) {
        EXPECT_EQ(got[i].class_index, expected[i].second) << q << " rank " << i;
      }
    }
  }
}

TEST(Query, TieBreakByClassIndex) {
  ts::EmbeddingIndex index;
  index.names = {"a", "b", "c"};
  index.vectors = ts::RowMatrix(3, 2);
  index.vectors << 0.0, 1.0, 1.0, 0.0, 1.0, 0.0;
  ts::Vector q(2);
  q << 3.0, 0.0;
  auto m = ts::query_embedding(index, q, 3);
  EXPECT_EQ(m[0].class_index, 1u);
  EXPECT_EQ(m[1].class_index, 2u);
  EXPECT_DOUBLE_EQ(m[0].similarity, 1.0);
  EXPECT_EQ(m[2].class_index, 0u);
}

TEST(Query, EmptyQueryAndZeroK) {
  auto names = catalog(3);
  auto p = ts::init_params(config(3));
  auto index = ts::build_index(p, K(), names);
  try {
    ts::query(index, p, K(), " -- ", 1);
    FAIL();
  } catch (const ts::Error& e) {
    EXPECT_EQ(e.code(), ts::ErrorCode::kEmptyQuery);
  }
  EXPECT_ANY_THROW(ts::query(index, p, K(), "a", 0));
}

TEST(IndexFile, RoundTripIsByteIdentical) {
  auto names = catalog(12);
  auto p = ts::init_params(config(12));
  auto index = ts::build_index(p, K(), names, "digest-1", 1700000000);
  const auto bytes = ts::save_index_bytes(index);
  EXPECT_EQ(bytes.substr(0, 8), "TYPOIDX1");
  std::istringstream in(bytes);
  auto back = ts::load_index(in, "digest-1");
  EXPECT_EQ(ts::save_index_bytes(back), bytes);
  EXPECT_EQ(back.names, names);
  EXPECT_EQ(back.vectors, index.vectors);
  EXPECT_EQ(back.built_at, 1700000000);
  EXPECT_EQ(ts::index_digest(back), ts::index_digest(index));
}

TEST(IndexFile, DigestMismatchIsStale) {
  auto p = ts::init_params(config(4));
  auto names = catalog(4);
  std::istringstream in(ts::save_index_bytes(ts::build_index(p, K(), names, "old")));
  try {
    ts::load_index(in, "new");
    FAIL();
  } catch (const ts::Error& e) {
    EXPECT_EQ(e.code(), ts::ErrorCode::kStaleIndex);
  }
}

TEST(IndexFile, CorruptInputIsRejected) {
  auto p = ts::init_params(config(4));
  auto names = catalog(4);
  const auto bytes = ts::save_index_bytes(ts::build_index(p, K(), names, "ck"));
  for (const auto& broken : {bytes + "\x01", bytes.substr(0, bytes.size() - 8),
                             bytes.substr(0, 20), std::string("TYPOIDX2") + bytes.substr(8)}) {
    std::istringstream in(broken);
    try {
      ts::load_index(in);
      FAIL();
    } catch (const ts::Error& e) {
      EXPECT_EQ(e.code(), ts::ErrorCode::kLoad);
    }
  }
}
