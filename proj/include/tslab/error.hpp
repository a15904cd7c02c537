#pragma once

#include <stdexcept>
#include <string>

namespace tslab {

enum class ErrorCode {
  invalid_spec = 1,
  domain,
  singularity,
  accuracy,
  scale_exceeded,
  numeric_degeneracy,
  classification,
  near_edge,
  edge_singularity,
  refinement,
  configuration,
  stability,
  domain_size,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

}  // namespace tslab
