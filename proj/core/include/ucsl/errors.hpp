// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ucsl {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A column of an embedding matrix has (near-)zero norm and cannot be normalized.
class ZeroColumnError : public Error {
public:
    explicit ZeroColumnError(int col)
        : Error("zero-norm column at index " + std::to_string(col)), column(col) {}
    int column;
};

class DimMismatchError : public Error {
public:
    using Error::Error;
};

class ShapeMismatchError : public Error {
public:
    using Error::Error;
};

class EmptyMatrixError : public Error {
public:
    using Error::Error;
};

class EmptyFrameError : public Error {
public:
    using Error::Error;
};

class LengthMismatchError : public Error {
public:
    using Error::Error;
};

class NonFiniteLossError : public Error {
public:
    using Error::Error;
};

class InvalidSpecError : public Error {
public:
    using Error::Error;
};

class OutOfRangeError : public Error {
public:
    using Error::Error;
};

class DegenerateBoxError : public Error {
public:
    using Error::Error;
};

class NonFiniteStateError : public Error {
public:
    using Error::Error;
};

class NonMonotoneFramesError : public Error {
public:
    using Error::Error;
};

/// Malformed line in a comma-separated record file; `line` is 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line_number, const std::string& reason)
        : Error("line " + std::to_string(line_number) + ": " + reason), line(line_number) {}
    std::size_t line;
};

class IdRequiredError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class HeaderMismatchError : public Error {
public:
    using Error::Error;
};

class CountMismatchError : public Error {
public:
    using Error::Error;
};

class EmptyGroundTruthError : public Error {
public:
    using Error::Error;
};

}  // namespace ucsl
