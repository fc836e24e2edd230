#pragma once

#include <stdexcept>
#include <string>

namespace lrsa {

enum class ErrorCategory { io, parse, validation, numeric, usage };

inline const char* to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::io: return "io";
        case ErrorCategory::parse: return "parse";
        case ErrorCategory::validation: return "validation";
        case ErrorCategory::numeric: return "numeric";
        case ErrorCategory::usage: return "usage";
    }
    return "unknown";
}

// All library failures surface as Error; the CLI maps category to an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const { return category_; }

private:
    ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& msg) {
    throw Error(c, msg);
}

}
