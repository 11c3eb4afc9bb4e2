#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "auxlearn/model.hpp"
#include "auxlearn/types.hpp"

namespace auxlearn {

/// One frozen classifier in a composed system. A predicted class with a
/// successor dispatches the same feature vector to that downstream node
/// (point of succession). The auxiliary class, when set, is reserved for
/// handing off to the next chain element (point of fusion) and may not have
/// a successor.
struct ClassifierNode {
  std::string id;
  MlpModel model;
  std::vector<std::string> class_names;
  std::optional<int> auxiliary_class;
  std::map<int, std::unique_ptr<ClassifierNode>> successors;
};

/// An ordered sequence of classifier hierarchies. A node resolving to its
/// auxiliary class hands the input to the next node; if every node does,
/// the result is `fallback_label`.
struct FusionChain {
  std::vector<std::unique_ptr<ClassifierNode>> nodes;
  std::string fallback_label = "Others";
};

struct RoutingStep {
  std::string node_id;
  std::string predicted_class;
};

struct RoutingTrace {
  std::vector<RoutingStep> steps;
  std::string final_label;
};

/// Structural validation: class-name/model agreement, successor keys in
/// range, auxiliary class in range and successor-free, no node reachable
/// twice. Throws std::invalid_argument on violation.
void validate_node(const ClassifierNode& node);

/// validate_node for every element plus the chain rule: every node except
/// possibly the last must have an auxiliary class.
void validate_chain(const FusionChain& chain);

/// Predicts at `node`; recurses into the successor of the predicted class
/// when present, otherwise stops there. The trace records one step per hop.
/// Throws RoutingError, naming the node, on a feature-dimension mismatch.
RoutingTrace route_hierarchy(const ClassifierNode& node, const Vector& features);

/// Runs route_hierarchy on each chain node in order. A final label equal to
/// the node's auxiliary class name moves on to the next node; any other
/// label terminates the chain. If every node resolves to its auxiliary
/// class, final_label is chain.fallback_label.
RoutingTrace route_chain(const FusionChain& chain, const Vector& features);

/// Loads a chain description: a JSON object with a node table (checkpoint
/// path, class names, optional auxiliary index and successor edges per
/// node) and the ordered list of chain roots. Checkpoint paths resolve
/// relative to the description file's directory. Every node must be
/// referenced exactly once (as a chain root or as a successor), which rules
/// out cycles and sharing. Throws ParseError on malformed or inconsistent
/// input.
FusionChain load_chain(const std::filesystem::path& path);

}  // namespace auxlearn
