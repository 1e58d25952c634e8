#pragma once

#include <stdexcept>
#include <string>

namespace tsa {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// data-model
struct ParseError : Error {
    ParseError(std::size_t line, const std::string& what)
        : Error("parse error at line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};
struct InvariantViolation : Error {
    InvariantViolation(std::size_t line, const std::string& field, const std::string& what)
        : Error("invariant violation at line " + std::to_string(line) + ", field '" + field +
                "': " + what),
          line(line), field(field) {}
    std::size_t line;
    std::string field;
};
struct SpanLost : Error {
    explicit SpanLost(const std::string& what) : Error("target span lost: " + what) {}
};
struct DegenerateSplit : Error {
    explicit DegenerateSplit(const std::string& what) : Error("degenerate split: " + what) {}
};

// tokenizer
struct SizeTooSmall : Error {
    explicit SizeTooSmall(const std::string& what) : Error("vocab size too small: " + what) {}
};
struct TargetTooLong : Error {
    explicit TargetTooLong(const std::string& what) : Error("target too long: " + what) {}
};

// tensor
struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& what) : Error("shape mismatch: " + what) {}
};
struct RangeOutOfBounds : Error {
    explicit RangeOutOfBounds(const std::string& what) : Error("range out of bounds: " + what) {}
};
struct InvalidClass : Error {
    explicit InvalidClass(const std::string& what) : Error("invalid class: " + what) {}
};
struct NotScalar : Error {
    explicit NotScalar(const std::string& what) : Error("not a scalar: " + what) {}
};
struct IdOutOfRange : Error {
    explicit IdOutOfRange(const std::string& what) : Error("token id out of range: " + what) {}
};

// heads
struct NotMarked : Error {
    explicit NotMarked(const std::string& what) : Error("example is not marked: " + what) {}
};

// training
struct EmptyClass : Error {
    explicit EmptyClass(const std::string& what) : Error("empty class: " + what) {}
};
struct NonFiniteLoss : Error {
    explicit NonFiniteLoss(const std::string& what) : Error("non-finite loss: " + what) {}
};
struct CorruptCheckpoint : Error {
    explicit CorruptCheckpoint(const std::string& what) : Error("corrupt checkpoint: " + what) {}
};
struct VersionMismatch : Error {
    explicit VersionMismatch(const std::string& what) : Error("checkpoint version mismatch: " + what) {}
};

// metrics
struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& what) : Error("length mismatch: " + what) {}
};
struct EmptyMatrix : Error {
    explicit EmptyMatrix(const std::string& what) : Error("empty confusion matrix: " + what) {}
};

// config / io
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};
struct IoError : Error {
    explicit IoError(const std::string& what) : Error("io error: " + what) {}
};

}  // namespace tsa
