#pragma once

#include <stdexcept>
#include <string>

namespace fspec {

enum class ErrorCode {
  invalid_argument,
  parse,
  dimension_mismatch,
  truncation,   // requested FT accuracy needs more product factors than allowed
  budget,       // atom / lattice / sample budget exceeded
  degenerate,   // regression or box count has nothing to fit
  numerical,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace fspec
