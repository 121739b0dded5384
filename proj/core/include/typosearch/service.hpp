#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "typosearch/alphabet.hpp"
#include "typosearch/index.hpp"
#include "typosearch/model.hpp"

namespace typosearch {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path checkpoint_path;
  std::filesystem::path index_path;
  std::size_t default_k = 5;
  std::size_t max_query_length = 256;
  double latency_budget_ms = 50.0;

  void validate() const;
};

// Environment variable overriding ServiceConfig::port.
inline constexpr const char* kPortEnvVar = "TYPOSEARCH_PORT";

struct CorrectionResponse {
  std::string query;
  std::string canonical;
  bool exact = false;
  std::vector<Match> matches;
  double latency_ms = 0.0;
  std::string index_digest;

  std::string to_json() const;
};

// Similarity at or above which a top match counts as an exact hit.
inline constexpr double kExactSimilarity = 1.0 - 1e-6;

// Immutable (checkpoint, index) pair served together.
class Snapshot {
 public:
  Snapshot(Checkpoint checkpoint, EmbeddingIndex index);

  // Loads both files; throws Error(kStaleIndex) if the index was built from a
  // different checkpoint.
  static std::shared_ptr<const Snapshot> load(
      const std::filesystem::path& checkpoint_path,
      const std::filesystem::path& index_path);

  // Throws Error(kEmptyQuery) if `q` canonicalizes to nothing.
  CorrectionResponse correct(std::string_view q, std::size_t k) const;

  const std::string& index_digest() const noexcept { return index_digest_; }
  const std::string& checkpoint_digest() const noexcept {
    return checkpoint_digest_;
  }
  std::size_t catalog_size() const noexcept { return index_.size(); }
  const EmbeddingIndex& index() const noexcept { return index_; }

 private:
  Checkpoint checkpoint_;
  EmbeddingIndex index_;
  Alphabet alphabet_;
  std::string checkpoint_digest_;
  std::string index_digest_;
};

// HTTP front end:
//   GET  /v1/correct?q=...&k=...
//   GET  /v1/healthz
//   POST /v1/reload  {"checkpoint": path, "index": path}
// Requests copy the current snapshot pointer once, so a reload never mixes
// two snapshots within one response.
class CorrectionService {
 public:
  explicit CorrectionService(ServiceConfig config);
  CorrectionService(ServiceConfig config, std::shared_ptr<const Snapshot> initial);
  ~CorrectionService();

  CorrectionService(const CorrectionService&) = delete;
  CorrectionService& operator=(const CorrectionService&) = delete;

  std::shared_ptr<const Snapshot> snapshot() const;
  void swap_snapshot(std::shared_ptr<const Snapshot> next);

  // Loads and swaps; on failure the old snapshot stays and the error is
  // rethrown.
  void reload(const std::filesystem::path& checkpoint_path,
              const std::filesystem::path& index_path);

  // Binds and serves on a background thread; returns the bound port.
  int start();
  // Binds and serves on the calling thread until stop().
  void run();
  void stop();

  const ServiceConfig& config() const noexcept { return config_; }

 private:
  struct Server;

  ServiceConfig config_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
  std::unique_ptr<Server> server_;
  std::thread thread_;
};

struct LatencyReport {
  std::size_t requests = 0;
  std::size_t errors = 0;
  double p50_ms = 0.0;
  double p99_ms = 0.0;
  double p999_ms = 0.0;
  double max_ms = 0.0;
  double mean_ms = 0.0;
};

// Nearest-rank percentile of an unsorted sample, q in (0, 1].
double percentile(std::vector<double> samples, double q);

// Replays `queries` against a running service from `concurrency` client
// threads and reports end-to-end latency percentiles.
LatencyReport measure_latency(const std::string& host, int port,
                              std::span<const std::string> queries,
                              std::size_t concurrency, std::size_t k);

}  // namespace typosearch
