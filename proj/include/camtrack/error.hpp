#pragma once

#include <stdexcept>
#include <string>

namespace camtrack {

enum class ErrorKind {
    malformed_frame,
    empty_region,
    invalid_parameter,
    io,
    resolution_mismatch,
    length_mismatch,
    config,
};

/// Base exception for every recoverable failure raised by the toolkit.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace camtrack
