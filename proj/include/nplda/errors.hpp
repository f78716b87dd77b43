#pragma once

#include <stdexcept>
#include <string>

namespace nplda {

// Base for all library errors. `code()` is a stable machine-readable
// identifier; the CLI prints it verbatim on failure.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct InvalidLevel : Error {
    explicit InvalidLevel(const std::string& what) : Error("invalid_level", what) {}
};

struct NotPositiveDefinite : Error {
    explicit NotPositiveDefinite(const std::string& what) : Error("not_positive_definite", what) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error("dimension_mismatch", what) {}
};

struct InsufficientSamples : Error {
    explicit InsufficientSamples(const std::string& what) : Error("insufficient_samples", what) {}
};

struct NonPositiveSignal : Error {
    explicit NonPositiveSignal(const std::string& what) : Error("non_positive_signal", what) {}
};

struct RatioOutOfRange : Error {
    explicit RatioOutOfRange(const std::string& what) : Error("ratio_out_of_range", what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config_error", what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error("io_error", what) {}
};

// Non-fatal diagnostics (degenerate but runnable configurations) go through
// here so tests can intercept them.
void warn(const std::string& message);

using WarnHandler = void (*)(const std::string&);
WarnHandler set_warn_handler(WarnHandler handler);  // returns previous handler

}  // namespace nplda
