#pragma once

#include <stdexcept>
#include <string>

namespace c3dc {

// Base class for all library errors. Subclasses identify the failing layer
// so the CLI can map them to distinct exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Symbol/bit-level codec failures (bad widths, corrupt mangled records).
class CodecError : public Error {
public:
    using Error::Error;
};

// Key construction and key-file parsing failures.
class KeyError : public Error {
public:
    using Error::Error;
};

// Encryption/decryption failures (out-of-range coordinates, wrong key).
class CipherError : public Error {
public:
    using Error::Error;
};

// Packet construction/parsing failures.
class FramingError : public Error {
public:
    using Error::Error;
};

// Channel and sender/receiver state-machine failures.
class TransportError : public Error {
public:
    using Error::Error;
};

}  // namespace c3dc
