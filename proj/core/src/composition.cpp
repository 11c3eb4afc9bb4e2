#include "auxlearn/composition.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "auxlearn/checkpoint.hpp"
#include "auxlearn/errors.hpp"

#include "json.hpp"

namespace auxlearn {

namespace {

void validate_node_impl(const ClassifierNode& node,
                        std::set<const ClassifierNode*>& visited,
                        std::set<std::string>& ids) {
  if (!visited.insert(&node).second) {
    throw std::invalid_argument("classifier node '" + node.id +
                                "' is reachable more than once");
  }
  if (node.id.empty()) {
    throw std::invalid_argument("classifier node without an id");
  }
  if (!ids.insert(node.id).second) {
    throw std::invalid_argument("duplicate classifier node id '" + node.id + "'");
  }
  if (node.model.layer_dims.size() < 2) {
    throw std::invalid_argument("node '" + node.id + "': model has no layers");
  }
  const int k = node.model.num_classes();
  if (static_cast<int>(node.class_names.size()) != k) {
    throw std::invalid_argument("node '" + node.id +
                                "': class_names do not match the model output size");
  }
  for (const std::string& name : node.class_names) {
    if (name.empty()) {
      throw std::invalid_argument("node '" + node.id + "': empty class name");
    }
  }
  if (node.auxiliary_class) {
    const int aux = *node.auxiliary_class;
    if (aux < 0 || aux >= k) {
      throw std::invalid_argument("node '" + node.id +
                                  "': auxiliary class index out of range");
    }
    if (node.successors.count(aux) != 0) {
      throw std::invalid_argument("node '" + node.id +
                                  "': the auxiliary class may not have a successor");
    }
  }
  for (const auto& [index, successor] : node.successors) {
    if (index < 0 || index >= k) {
      throw std::invalid_argument("node '" + node.id +
                                  "': successor key out of range");
    }
    if (!successor) {
      throw std::invalid_argument("node '" + node.id + "': null successor");
    }
    validate_node_impl(*successor, visited, ids);
  }
}

}  // namespace

void validate_node(const ClassifierNode& node) {
  std::set<const ClassifierNode*> visited;
  std::set<std::string> ids;
  validate_node_impl(node, visited, ids);
}

void validate_chain(const FusionChain& chain) {
  if (chain.nodes.empty()) {
    throw std::invalid_argument("fusion chain has no nodes");
  }
  if (chain.fallback_label.empty()) {
    throw std::invalid_argument("fusion chain needs a fallback label");
  }
  std::set<const ClassifierNode*> visited;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < chain.nodes.size(); ++i) {
    if (!chain.nodes[i]) {
      throw std::invalid_argument("fusion chain contains a null node");
    }
    validate_node_impl(*chain.nodes[i], visited, ids);
    if (i + 1 < chain.nodes.size() && !chain.nodes[i]->auxiliary_class) {
      throw std::invalid_argument(
          "node '" + chain.nodes[i]->id +
          "': every chain node except the last needs an auxiliary class");
    }
  }
}

RoutingTrace route_hierarchy(const ClassifierNode& node, const Vector& features) {
  RoutingTrace trace;
  const ClassifierNode* current = &node;
  while (true) {
    if (features.size() != current->model.input_dim()) {
      throw RoutingError("node '" + current->id + "': feature size " +
                         std::to_string(features.size()) + " does not match input size " +
                         std::to_string(current->model.input_dim()));
    }
    const int predicted = predict(current->model, features);
    if (predicted >= static_cast<int>(current->class_names.size())) {
      throw RoutingError("node '" + current->id + "': predicted class " +
                         std::to_string(predicted) + " has no name");
    }
    trace.steps.push_back({current->id, current->class_names[predicted]});
    const auto it = current->successors.find(predicted);
    if (it == current->successors.end()) {
      trace.final_label = current->class_names[predicted];
      return trace;
    }
    current = it->second.get();
  }
}

RoutingTrace route_chain(const FusionChain& chain, const Vector& features) {
  if (chain.nodes.empty()) {
    throw std::invalid_argument("route_chain: empty chain");
  }
  RoutingTrace trace;
  for (const auto& node : chain.nodes) {
    RoutingTrace sub = route_hierarchy(*node, features);
    trace.steps.insert(trace.steps.end(), sub.steps.begin(), sub.steps.end());
    if (node->auxiliary_class &&
        sub.final_label == node->class_names[static_cast<std::size_t>(
                               *node->auxiliary_class)]) {
      continue;  // fusion hand-off: try the next node
    }
    trace.final_label = std::move(sub.final_label);
    return trace;
  }
  trace.final_label = chain.fallback_label;
  return trace;
}

namespace {

using nlohmann::json;

[[noreturn]] void chain_error(const std::filesystem::path& path,
                              const std::string& message) {
  throw ParseError(path.string() + ": " + message);
}

struct NodeSpec {
  std::string checkpoint;
  std::vector<std::string> class_names;
  std::optional<int> auxiliary_class;
  std::map<int, std::string> successors;  // class index -> node id
};

}  // namespace

FusionChain load_chain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    chain_error(path, "cannot open file");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    chain_error(path, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    chain_error(path, "top level must be an object");
  }

  FusionChain chain;
  if (doc.contains("fallback_label")) {
    if (!doc["fallback_label"].is_string()) {
      chain_error(path, "'fallback_label' must be a string");
    }
    chain.fallback_label = doc["fallback_label"].get<std::string>();
  }

  if (!doc.contains("nodes") || !doc["nodes"].is_array() || doc["nodes"].empty()) {
    chain_error(path, "'nodes' must be a nonempty array");
  }
  if (!doc.contains("chain") || !doc["chain"].is_array() || doc["chain"].empty()) {
    chain_error(path, "'chain' must be a nonempty array of node ids");
  }

  std::map<std::string, NodeSpec> specs;
  for (const json& entry : doc["nodes"]) {
    if (!entry.is_object()) {
      chain_error(path, "every node entry must be an object");
    }
    if (!entry.contains("id") || !entry["id"].is_string()) {
      chain_error(path, "node entry without a string 'id'");
    }
    const std::string id = entry["id"].get<std::string>();
    if (id.empty()) {
      chain_error(path, "node id must not be empty");
    }
    NodeSpec spec;
    if (!entry.contains("checkpoint") || !entry["checkpoint"].is_string()) {
      chain_error(path, "node '" + id + "': missing string 'checkpoint'");
    }
    spec.checkpoint = entry["checkpoint"].get<std::string>();
    if (!entry.contains("class_names") || !entry["class_names"].is_array() ||
        entry["class_names"].empty()) {
      chain_error(path, "node '" + id + "': 'class_names' must be a nonempty array");
    }
    for (const json& name : entry["class_names"]) {
      if (!name.is_string()) {
        chain_error(path, "node '" + id + "': class names must be strings");
      }
      spec.class_names.push_back(name.get<std::string>());
    }
    if (entry.contains("auxiliary_class")) {
      if (!entry["auxiliary_class"].is_number_integer()) {
        chain_error(path, "node '" + id + "': 'auxiliary_class' must be an integer");
      }
      spec.auxiliary_class = entry["auxiliary_class"].get<int>();
    }
    if (entry.contains("successors")) {
      if (!entry["successors"].is_object()) {
        chain_error(path, "node '" + id +
                              "': 'successors' must map class indices to node ids");
      }
      for (const auto& [key, value] : entry["successors"].items()) {
        int index = -1;
        const auto res = std::from_chars(key.data(), key.data() + key.size(), index);
        if (res.ec != std::errc() || res.ptr != key.data() + key.size()) {
          chain_error(path, "node '" + id + "': successor key '" + key +
                                "' is not a class index");
        }
        if (!value.is_string()) {
          chain_error(path, "node '" + id + "': successor values must be node ids");
        }
        spec.successors[index] = value.get<std::string>();
      }
    }
    if (!specs.emplace(id, std::move(spec)).second) {
      chain_error(path, "duplicate node id '" + id + "'");
    }
  }

  // Each node must be referenced exactly once, as a chain root or as a
  // successor; together with existence this makes the structure a forest.
  std::map<std::string, int> references;
  std::vector<std::string> roots;
  for (const json& id : doc["chain"]) {
    if (!id.is_string()) {
      chain_error(path, "'chain' entries must be node ids");
    }
    roots.push_back(id.get<std::string>());
    ++references[roots.back()];
  }
  for (const auto& [id, spec] : specs) {
    for (const auto& [index, successor_id] : spec.successors) {
      ++references[successor_id];
    }
  }
  for (const auto& [id, count] : references) {
    if (specs.find(id) == specs.end()) {
      chain_error(path, "unknown node id '" + id + "'");
    }
    if (count != 1) {
      chain_error(path, "node '" + id + "' is referenced " + std::to_string(count) +
                            " times; expected exactly once");
    }
  }
  for (const auto& [id, spec] : specs) {
    if (references.find(id) == references.end()) {
      chain_error(path, "node '" + id +
                            "' is neither a chain root nor a successor");
    }
  }

  const std::filesystem::path base = path.has_parent_path()
                                         ? path.parent_path()
                                         : std::filesystem::path(".");

  // Build recursively from the roots; the exactly-once rule above guarantees
  // each spec is consumed once and the recursion terminates.
  auto build = [&](auto&& self, const std::string& id) -> std::unique_ptr<ClassifierNode> {
    const auto it = specs.find(id);
    if (it == specs.end()) {
      chain_error(path, "node '" + id + "' consumed twice (cycle?)");
    }
    NodeSpec spec = std::move(it->second);
    specs.erase(it);
    auto node = std::make_unique<ClassifierNode>();
    node->id = id;
    std::filesystem::path checkpoint(spec.checkpoint);
    if (checkpoint.is_relative()) {
      checkpoint = base / checkpoint;
    }
    try {
      node->model = load_model(checkpoint);
    } catch (const ParseError& e) {
      chain_error(path, "node '" + id + "': " + e.what());
    }
    node->class_names = std::move(spec.class_names);
    node->auxiliary_class = spec.auxiliary_class;
    for (const auto& [index, successor_id] : spec.successors) {
      node->successors[index] = self(self, successor_id);
    }
    return node;
  };
  for (const std::string& root : roots) {
    chain.nodes.push_back(build(build, root));
  }

  try {
    validate_chain(chain);
  } catch (const std::invalid_argument& e) {
    chain_error(path, e.what());
  }
  return chain;
}

}  // namespace auxlearn
