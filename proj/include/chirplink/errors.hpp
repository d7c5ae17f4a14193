#pragma once

#include <stdexcept>
#include <string>

namespace chirplink {

// Error taxonomy shared by the whole stack.  Hot-path decode failures
// (header/FEC/CRC) are reported as status codes, not exceptions; these
// types cover contract violations and environment faults.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

struct OversizePayload : std::length_error {
    explicit OversizePayload(const std::string& what) : std::length_error(what) {}
};

struct FramingError : std::runtime_error {
    explicit FramingError(const std::string& what) : std::runtime_error(what) {}
};

struct CalibrationError : std::runtime_error {
    explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

struct MissingEvent : std::runtime_error {
    explicit MissingEvent(const std::string& what) : std::runtime_error(what) {}
};

struct TransportError : std::runtime_error {
    explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace chirplink
