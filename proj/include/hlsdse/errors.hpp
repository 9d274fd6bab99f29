// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace hlsdse {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Enumeration would visit more configurations than the configured cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class UnsupportedModel : public Error {
public:
    using Error::Error;
};

class RetriesExhausted : public Error {
public:
    using Error::Error;
};

class InvalidPragma : public Error {
public:
    using Error::Error;
};

class UnknownBenchmark : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Session-level misuse: stepping a finished session.
class SessionTerminated : public Error {
public:
    using Error::Error;
};

/// A policy proposed an action that does not fit the session's design.
class InvalidAction : public Error {
public:
    using Error::Error;
};

/// A policy could not produce an action at all (broken process, protocol).
class PolicyError : public Error {
public:
    using Error::Error;
};

} // namespace hlsdse
