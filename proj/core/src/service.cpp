#include "typosearch/service.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

// httplib's default backlog of 5 drops SYNs when a burst of clients connects
// at once, and each dropped SYN costs a one-second retransmit.
#define CPPHTTPLIB_LISTEN_BACKLOG 128
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "typosearch/error.hpp"

namespace typosearch {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Kept above the number of concurrent keep-alive clients so control requests
// such as reload still find a free worker under load.
constexpr std::size_t kServerThreads = 32;
// httplib closes a keep-alive connection after 5 requests by default, which
// makes steady clients reconnect constantly.
constexpr std::size_t kKeepAliveMaxRequests = 100000;

}  // namespace

void ServiceConfig::validate() const {
  if (default_k < 1) throw Error(ErrorCode::kConfiguration, "default k must be >= 1");
  if (!(latency_budget_ms > 0.0)) {
    throw Error(ErrorCode::kConfiguration, "latency budget must be > 0");
  }
  if (max_query_length < 1) {
    throw Error(ErrorCode::kConfiguration, "max query length must be >= 1");
  }
  if (port < 0 || port > 65535) throw Error(ErrorCode::kConfiguration, "invalid port");
}

std::string CorrectionResponse::to_json() const {
  nlohmann::ordered_json out;
  out["query"] = query;
  out["canonical"] = canonical;
  out["exact"] = exact;
  auto& list = out["matches"] = nlohmann::ordered_json::array();
  for (const auto& m : matches) {
    list.push_back({{"name", m.name}, {"class", m.class_index}, {"score", m.similarity}});
  }
  out["latency_ms"] = latency_ms;
  out["index_digest"] = index_digest;
  return out.dump();
}

// ---------------------------------------------------------------------------

Snapshot::Snapshot(Checkpoint checkpoint, EmbeddingIndex index)
    : checkpoint_(std::move(checkpoint)),
      index_(std::move(index)),
      alphabet_(checkpoint_.alphabet),
      checkpoint_digest_(typosearch::checkpoint_digest(checkpoint_)),
      index_digest_(typosearch::index_digest(index_)) {
  if (index_.checkpoint_digest != checkpoint_digest_) {
    throw Error(ErrorCode::kStaleIndex, "index was built from checkpoint " +
                                            index_.checkpoint_digest + ", loaded " +
                                            checkpoint_digest_);
  }
  if (index_.dims() != checkpoint_.params.config.dense_size) {
    throw Error(ErrorCode::kLoad, "index dimension does not match the checkpoint");
  }
  if (index_.size() == 0) throw Error(ErrorCode::kLoad, "index is empty");
}

std::shared_ptr<const Snapshot> Snapshot::load(const std::filesystem::path& checkpoint_path,
                                               const std::filesystem::path& index_path) {
  Checkpoint checkpoint = load_checkpoint_file(checkpoint_path);
  const std::string digest = typosearch::checkpoint_digest(checkpoint);
  EmbeddingIndex index = load_index_file(index_path, digest);
  return std::make_shared<const Snapshot>(std::move(checkpoint), std::move(index));
}

CorrectionResponse Snapshot::correct(std::string_view q, std::size_t k) const {
  const auto start = Clock::now();
  CorrectionResponse response;
  response.query = std::string(q);
  response.canonical = alphabet_.canonicalize(q);
  if (response.canonical.empty()) {
    throw Error(ErrorCode::kEmptyQuery, "query is empty after canonicalization");
  }
  response.matches = query_embedding(
      index_, embed(checkpoint_.params, response.canonical, alphabet_), k);
  response.exact =
      !response.matches.empty() && response.matches.front().similarity >= kExactSimilarity;
  response.index_digest = index_digest_;
  response.latency_ms = elapsed_ms(start);
  return response;
}

// ---------------------------------------------------------------------------

struct CorrectionService::Server {
  httplib::Server http;
};

CorrectionService::CorrectionService(ServiceConfig config)
    : CorrectionService(config, Snapshot::load(config.checkpoint_path, config.index_path)) {}

CorrectionService::CorrectionService(ServiceConfig config,
                                     std::shared_ptr<const Snapshot> initial)
    : config_(std::move(config)), snapshot_(std::move(initial)) {
  config_.validate();
  if (!snapshot_) throw std::invalid_argument("service needs an initial snapshot");
}

CorrectionService::~CorrectionService() { stop(); }

std::shared_ptr<const Snapshot> CorrectionService::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

void CorrectionService::swap_snapshot(std::shared_ptr<const Snapshot> next) {
  if (!next) throw std::invalid_argument("swap_snapshot: null snapshot");
  std::lock_guard lock(snapshot_mutex_);
  snapshot_.swap(next);
}

void CorrectionService::reload(const std::filesystem::path& checkpoint_path,
                               const std::filesystem::path& index_path) {
  swap_snapshot(Snapshot::load(checkpoint_path, index_path));
}

namespace {

void reply(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

nlohmann::ordered_json error_body(std::string_view message, double latency_ms) {
  nlohmann::ordered_json out;
  out["error"] = message;
  out["latency_ms"] = latency_ms;
  return out;
}

}  // namespace

int CorrectionService::start() {
  if (server_) throw std::logic_error("service already started");
  server_ = std::make_unique<Server>();
  auto& http = server_->http;
  http.new_task_queue = [] { return new httplib::ThreadPool(kServerThreads); };
  // Responses are small; without TCP_NODELAY, Nagle plus delayed ACK stalls
  // keep-alive round trips by about 40 ms.
  http.set_tcp_nodelay(true);
  http.set_keep_alive_max_count(kKeepAliveMaxRequests);

  http.Get("/v1/correct", [this](const httplib::Request& req, httplib::Response& res) {
    const auto start = Clock::now();
    const auto snap = snapshot();
    if (!req.has_param("q") || req.get_param_value("q").empty()) {
      reply(res, 400, error_body("missing or empty q", elapsed_ms(start)));
      return;
    }
    const std::string q = req.get_param_value("q");
    if (q.size() > config_.max_query_length) {
      reply(res, 400,
            error_body("q longer than " + std::to_string(config_.max_query_length) +
                           " bytes",
                       elapsed_ms(start)));
      return;
    }
    std::size_t k = config_.default_k;
    if (req.has_param("k")) {
      const std::string text = req.get_param_value("k");
      std::size_t used = 0;
      long long parsed = 0;
      try {
        parsed = std::stoll(text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != text.size() || text.empty() || parsed < 1) {
        reply(res, 400, error_body("k must be a positive integer", elapsed_ms(start)));
        return;
      }
      k = static_cast<std::size_t>(parsed);
    }
    try {
      CorrectionResponse response = snap->correct(q, k);
      response.latency_ms = elapsed_ms(start);
      res.status = 200;
      res.set_content(response.to_json(), "application/json");
    } catch (const Error& e) {
      reply(res, 400, error_body(e.what(), elapsed_ms(start)));
    }
  });

  http.Get("/v1/healthz", [this](const httplib::Request&, httplib::Response& res) {
    const auto start = Clock::now();
    const auto snap = snapshot();
    nlohmann::ordered_json out;
    out["status"] = "ok";
    out["index_digest"] = snap->index_digest();
    out["catalog_size"] = snap->catalog_size();
    out["latency_ms"] = elapsed_ms(start);
    reply(res, 200, out);
  });

  http.Post("/v1/reload", [this](const httplib::Request& req, httplib::Response& res) {
    const auto start = Clock::now();
    auto failure = [&](int status, std::string_view message) {
      nlohmann::ordered_json out;
      out["swapped"] = false;
      out["index_digest"] = snapshot()->index_digest();
      out["error"] = message;
      out["latency_ms"] = elapsed_ms(start);
      reply(res, status, out);
    };
    std::string checkpoint_path;
    std::string index_path;
    try {
      const auto body = nlohmann::json::parse(req.body);
      checkpoint_path = body.at("checkpoint").get<std::string>();
      index_path = body.at("index").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      failure(400, "body must be {\"checkpoint\": path, \"index\": path}");
      return;
    }
    std::shared_ptr<const Snapshot> next;
    try {
      next = Snapshot::load(checkpoint_path, index_path);
    } catch (const Error& e) {
      failure(e.code() == ErrorCode::kStaleIndex ? 409 : 422, e.what());
      return;
    }
    swap_snapshot(next);
    nlohmann::ordered_json out;
    out["swapped"] = true;
    out["index_digest"] = next->index_digest();
    out["latency_ms"] = elapsed_ms(start);
    reply(res, 200, out);
  });

  int port = config_.port;
  if (port == 0) {
    port = http.bind_to_any_port(config_.host);
    if (port < 0) throw Error(ErrorCode::kIo, "cannot bind " + config_.host);
  } else if (!http.bind_to_port(config_.host, port)) {
    throw Error(ErrorCode::kIo,
                "cannot bind " + config_.host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->http.listen_after_bind(); });
  http.wait_until_ready();
  return port;
}

void CorrectionService::run() {
  start();
  thread_.join();
}

void CorrectionService::stop() {
  if (!server_) return;
  server_->http.stop();
  if (thread_.joinable()) thread_.join();
  server_.reset();
}

// ---------------------------------------------------------------------------

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) throw std::invalid_argument("percentile of an empty sample");
  if (!(q > 0.0) || q > 1.0) throw std::invalid_argument("percentile q must be in (0, 1]");
  std::sort(samples.begin(), samples.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(samples.size()) - 1e-9));
  return samples[std::clamp<std::size_t>(rank, 1, samples.size()) - 1];
}

LatencyReport measure_latency(const std::string& host, int port,
                              std::span<const std::string> queries,
                              std::size_t concurrency, std::size_t k) {
  concurrency = std::max<std::size_t>(concurrency, 1);
  std::vector<double> latencies(queries.size(), 0.0);
  std::vector<char> failed(queries.size(), 0);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> clients;
  for (std::size_t c = 0; c < concurrency; ++c) {
    clients.emplace_back([&] {
      httplib::Client client(host, port);
      client.set_keep_alive(true);
      client.set_tcp_nodelay(true);
      for (std::size_t i = next++; i < queries.size(); i = next++) {
        const httplib::Params params{{"q", queries[i]}, {"k", std::to_string(k)}};
        const auto start = Clock::now();
        auto res = client.Get("/v1/correct", params, httplib::Headers{});
        latencies[i] = elapsed_ms(start);
        if (!res || res->status != 200) failed[i] = 1;
      }
    });
  }
  for (auto& t : clients) t.join();

  LatencyReport report;
  report.requests = queries.size();
  report.errors = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  if (latencies.empty()) return report;
  report.p50_ms = percentile(latencies, 0.50);
  report.p99_ms = percentile(latencies, 0.99);
  report.p999_ms = percentile(latencies, 0.999);
  report.max_ms = *std::max_element(latencies.begin(), latencies.end());
  report.mean_ms = std::accumulate(latencies.begin(), latencies.end(), 0.0) /
                   static_cast<double>(latencies.size());
  return report;
}

}  // namespace typosearch
