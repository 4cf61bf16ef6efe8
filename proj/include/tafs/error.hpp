#pragma once

#include <stdexcept>
#include <string>

namespace tafs {

/// Failure categories. Each maps onto one CLI exit code / C API status.
enum class ErrorKind {
    Config,   // bad experiment/regressor configuration, unknown names, conflicts
    Data,     // schema, ordering, empty input, insufficient history/samples, shape
    Numeric,  // non-finite inputs to a numeric routine
    Io,       // unreadable or unwritable files
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string what) : std::runtime_error(std::move(what)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define TAFS_DEFINE_ERROR(Name, Kind)                                             \
    class Name : public Error {                                                   \
    public:                                                                       \
        explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {}  \
    }

TAFS_DEFINE_ERROR(ConfigError, Config);
TAFS_DEFINE_ERROR(UnknownIndicatorError, Config);
TAFS_DEFINE_ERROR(ConflictError, Config);
TAFS_DEFINE_ERROR(SchemaError, Data);
TAFS_DEFINE_ERROR(OrderingError, Data);
TAFS_DEFINE_ERROR(EmptyInputError, Data);
TAFS_DEFINE_ERROR(DegenerateColumnError, Data);
TAFS_DEFINE_ERROR(InsufficientHistoryError, Data);
TAFS_DEFINE_ERROR(InsufficientSamplesError, Data);
TAFS_DEFINE_ERROR(ShapeError, Data);
TAFS_DEFINE_ERROR(ReferenceError, Data);
TAFS_DEFINE_ERROR(NumericInputError, Numeric);
TAFS_DEFINE_ERROR(IoError, Io);

#undef TAFS_DEFINE_ERROR

}  // namespace tafs
