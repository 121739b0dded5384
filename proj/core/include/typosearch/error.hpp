#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace typosearch {

enum class ErrorCode {
  kIo,
  kEmptyCorpus,
  kEmptyStats,
  kDomain,
  kValidation,
  kLoad,
  kGenerationExhausted,
  kCatalog,
  kTrainingDiverged,
  kZeroEmbedding,
  kEmptyQuery,
  kStaleIndex,
  kConfiguration,
  kBudget,
};

std::string_view error_code_name(ErrorCode code) noexcept;

// Every recoverable failure in the library is reported as an Error carrying
// a machine-checkable code. Contract violations (bad indices, shape
// mismatches) throw std::invalid_argument / std::out_of_range instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace typosearch
