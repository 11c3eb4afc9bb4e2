#pragma once

#include <stdexcept>
#include <string>

namespace auxlearn {

/// Raised when a structured input file (synset mapping, manifest, dataset,
/// checkpoint, chain description) cannot be parsed. Messages carry the
/// offending line or field.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when routing through a classifier composition fails; the message
/// names the node at which routing broke down.
class RoutingError : public std::runtime_error {
 public:
  explicit RoutingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace auxlearn
