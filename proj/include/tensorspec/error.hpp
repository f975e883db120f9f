#pragma once

#include <stdexcept>
#include <string>

namespace tensorspec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A multi-index, mode number or linear rank falls outside its range.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Operand shapes or sizes are incompatible.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A value violates a precondition (non-finite entry, bad partition, etc.).
class ValueError : public Error {
public:
    using Error::Error;
};

/// Malformed serialized input.
class ParseError : public Error {
public:
    using Error::Error;
};

namespace detail {

template <class E = ValueError>
inline void require(bool cond, const std::string& what)
{
    if (!cond) throw E(what);
}

} // namespace detail
} // namespace tensorspec
