#pragma once

#include <stdexcept>
#include <string>

namespace faithbench {

// Error taxonomy shared by the C++ core and the C API status codes.
enum class ErrorCode {
    invalid_argument,  // bad config values, out-of-range parameters
    io,                // missing or unwritable files
    parse,             // malformed CSV/JSON content
    schema,            // schema violations: missing columns, bad labels, one-hot integrity
    shape,             // dimension mismatches between datasets, models and tables
    numeric,           // non-convergent training, singular systems, undefined AUROC
    unavailable,       // requested artifact cannot be built (e.g. no opposite-class rows)
    internal,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool ok, ErrorCode code, const std::string& message) {
    if (!ok) raise(code, message);
}

}  // namespace faithbench
