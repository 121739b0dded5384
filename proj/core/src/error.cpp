#include "typosearch/error.hpp"

namespace typosearch {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kEmptyCorpus: return "empty-corpus";
    case ErrorCode::kEmptyStats: return "empty-stats";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kLoad: return "load";
    case ErrorCode::kGenerationExhausted: return "generation-exhausted";
    case ErrorCode::kCatalog: return "catalog";
    case ErrorCode::kTrainingDiverged: return "training-diverged";
    case ErrorCode::kZeroEmbedding: return "zero-embedding";
    case ErrorCode::kEmptyQuery: return "empty-query";
    case ErrorCode::kStaleIndex: return "stale-index";
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kBudget: return "budget";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

}  // namespace typosearch
