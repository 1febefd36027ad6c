#ifndef EMBEVAL_ERRORS_H
#define EMBEVAL_ERRORS_H

#include <stdexcept>
#include <string>

namespace embeval {

enum class ErrorCode {
    parse_error,
    vocabulary_error,
    unknown_object,
    unknown_predicate,
    unknown_action,
    arity_error,
    binding_error,
    validation_error,
    conflicting_delta,
    universe_mismatch,
    precondition_violated,
    io_error,
    internal_error,
};

const char *error_code_name(ErrorCode code);

// Single exception type for all module-level failures; the code tells callers
// what went wrong, the message carries context (offending token, object name,
// byte offset, ...).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace embeval

#endif
