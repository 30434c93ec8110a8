#pragma once

#include <stdexcept>
#include <string>

namespace orderbench {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad flags or arguments supplied by a caller.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Malformed corpus, report or permutation data.
class DataError : public Error {
public:
    using Error::Error;
};

/// Transport failure or wire-protocol violation while talking to an external orderer.
class ProtocolError : public Error {
public:
    using Error::Error;
};

class TimeoutError : public ProtocolError {
public:
    using ProtocolError::ProtocolError;
};

} // namespace orderbench
