#pragma once

#include <stdexcept>
#include <string>

namespace wgpnn {

/// Broad failure class; the CLI maps each to its own exit code.
enum class ErrorCategory {
  kParse = 3,
  kDictionary = 4,
  kConfig = 5,
  kNumeric = 6,
  kIo = 7,
  kCompatibility = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

const char* category_name(ErrorCategory category) noexcept;

}  // namespace wgpnn
