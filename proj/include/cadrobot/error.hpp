#pragma once

#include <stdexcept>
#include <string>

namespace cadrobot {

/// Base class for every error raised by the library.  The `category()` tag is
/// a short machine-readable word used by the CLI as its error prefix.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

/// Invalid value handed to a geometric constructor (non-orthonormal matrix,
/// non-unit quaternion, non-finite component).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message) : Error("validation", message) {}
};

/// Planning failure: unknown frame, dangling tool frame, degenerate section.
class PlanError : public Error {
public:
    explicit PlanError(const std::string& message) : Error("plan", message) {}
};

}  // namespace cadrobot
