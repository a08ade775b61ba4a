#pragma once

#include <stdexcept>
#include <string>

namespace delib {

/// Base class for all engine errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- configuration / model loading ---

struct ConfigError : Error {
    using Error::Error;
};
/// Field missing or wrongly typed in a config document.
struct SchemaError : ConfigError {
    using ConfigError::ConfigError;
};
/// A referenced id (agent, tool, criterion, dimension) does not exist.
struct ReferenceError : ConfigError {
    using ConfigError::ConfigError;
};
/// A collection violates a size constraint (e.g. criterion with no experts).
struct CardinalityError : ConfigError {
    using ConfigError::ConfigError;
};

// --- prompt rendering ---

struct RenderError : Error {
    using Error::Error;
};
struct MalformedTokenError : RenderError {
    using RenderError::RenderError;
};
struct MissingBindingError : RenderError {
    MissingBindingError(const std::string& token)
        : RenderError("missing binding for token '" + token + "'"), token(token) {}
    std::string token;
};
/// Requested (agent, criterion) pair is not a participant mapping.
struct ParticipationError : Error {
    using Error::Error;
};

// --- transcript protocol ---

struct ProtocolError : Error {
    using Error::Error;
};
struct OffScaleRatingError : ProtocolError {
    OffScaleRatingError(double value, const std::string& msg)
        : ProtocolError(msg), value(value) {}
    double value;
};
struct MalformedRoutingError : ProtocolError {
    MalformedRoutingError(const std::string& line)
        : ProtocolError("no routing name recognized in line '" + line + "'"), line(line) {}
    std::string line;
};
struct UnknownToolNoticeError : ProtocolError {
    UnknownToolNoticeError(const std::string& tool, const std::string& msg)
        : ProtocolError(msg), tool(tool) {}
    std::string tool;
};

// --- tool pool ---

struct ToolError : Error {
    using Error::Error;
};
struct UnknownToolError : ToolError {
    using ToolError::ToolError;
};
/// Agent invoked a tool it is not bound to in the model.
struct BindingViolationError : ToolError {
    using ToolError::ToolError;
};

// --- chat backends ---

struct BackendError : Error {
    using Error::Error;
};
/// Scripted backend has no further line for the conversation.
struct ScriptExhaustedError : BackendError {
    using BackendError::BackendError;
};
/// Engine asked for an agent out of script order.
struct ScriptDivergenceError : BackendError {
    ScriptDivergenceError(const std::string& expected, const std::string& got)
        : BackendError("script divergence (expected " + expected + ", got " + got + ")"),
          expected(expected),
          got(got) {}
    std::string expected;
    std::string got;
};
struct TransportError : BackendError {
    using BackendError::BackendError;
};

// --- tables / scoring ---

struct TableError : Error {
    using Error::Error;
};

// --- fixtures / io ---

struct FixtureError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

}  // namespace delib
