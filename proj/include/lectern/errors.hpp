// Error types shared across the lectern library.
#pragma once

#include <stdexcept>
#include <string>

namespace lectern {

// Malformed input file (transcript, index, nav tree, lexicon).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid input that violates a documented invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Base class for inference-endpoint failures. The two subclasses below are
// deliberately distinct: fallback logic treats an unreachable server
// differently from a server that answered with garbage.
class GatewayError : public std::runtime_error {
 public:
  explicit GatewayError(const std::string& msg) : std::runtime_error(msg) {}
};

// Endpoint unreachable (connection refused, timeout after retries).
class GatewayUnavailable : public GatewayError {
 public:
  explicit GatewayUnavailable(const std::string& msg) : GatewayError(msg) {}
};

// Endpoint answered but the payload is not decodable JSON.
class MalformedOutput : public GatewayError {
 public:
  explicit MalformedOutput(const std::string& msg) : GatewayError(msg) {}
};

// Model echoed a blacklisted placeholder literal instead of a real value.
class PlaceholderError : public GatewayError {
 public:
  explicit PlaceholderError(const std::string& msg) : GatewayError(msg) {}
};

// Decodable JSON missing a required field (under every alias) or of the
// wrong shape.
class SchemaError : public GatewayError {
 public:
  explicit SchemaError(const std::string& msg) : GatewayError(msg) {}
};

}  // namespace lectern
