#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mprfill {

// Machine-parseable failure classes. The CLI prints the class name verbatim.
enum class ErrorClass {
    InvalidArgument,
    IndexOutOfRange,
    DegenerateRange,
    NoSampleBonds,
    NoSamples,
    NoNeighbors,
    IoNotFound,
    IoError,
    ParseError,
    CountMismatch,
    SentinelCollision,
};

constexpr std::string_view error_class_name(ErrorClass c) noexcept {
    switch (c) {
    case ErrorClass::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorClass::IndexOutOfRange: return "INDEX_OUT_OF_RANGE";
    case ErrorClass::DegenerateRange: return "DEGENERATE_RANGE";
    case ErrorClass::NoSampleBonds: return "NO_SAMPLE_BONDS";
    case ErrorClass::NoSamples: return "NO_SAMPLES";
    case ErrorClass::NoNeighbors: return "NO_NEIGHBORS";
    case ErrorClass::IoNotFound: return "IO_NOT_FOUND";
    case ErrorClass::IoError: return "IO_ERROR";
    case ErrorClass::ParseError: return "PARSE_ERROR";
    case ErrorClass::CountMismatch: return "COUNT_MISMATCH";
    case ErrorClass::SentinelCollision: return "SENTINEL_COLLISION";
    }
    return "UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what)
        : std::runtime_error(what), cls_(cls) {}

    ErrorClass error_class() const noexcept { return cls_; }

private:
    ErrorClass cls_;
};

} // namespace mprfill
