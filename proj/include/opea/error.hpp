#pragma once

#include <stdexcept>
#include <string>

namespace opea {

enum class ErrorKind {
    NotInVbbK,
    InfiniteCoefficientSum,
    NotInBracketSpace,
    SectorMismatch,
    NotLocal,
    WindowTooSmall,
    InvalidSpec,
    ParseError,
    NotSpanning,
    NotDual,
    Inconsistent,
    UnknownField,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace opea
