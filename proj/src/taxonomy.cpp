#include "hat/taxonomy.hpp"

#include <algorithm>
#include <map>

#include "hat/error.hpp"

namespace hat {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Internal: return "internal";
    case NodeKind::SeenLeaf: return "seen";
    case NodeKind::UnseenLeaf: return "unseen";
  }
  return "internal";
}

NodeKind node_kind_from_string(std::string_view text) {
  if (text == "internal") return NodeKind::Internal;
  if (text == "seen") return NodeKind::SeenLeaf;
  if (text == "unseen") return NodeKind::UnseenLeaf;
  throw Error(ErrorCode::SchemaError, "unknown node kind '" + std::string(text) + "'");
}

Taxonomy Taxonomy::build(std::vector<Node> nodes, const std::vector<Edge>& edges) {
  Taxonomy t;
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!t.index_.emplace(nodes[i].id, i).second) {
      throw Error(ErrorCode::DuplicateNode, "node '" + nodes[i].id + "' declared twice");
    }
  }
  t.nodes_ = std::move(nodes);
  const std::size_t n = t.nodes_.size();
  if (n == 0) throw Error(ErrorCode::SchemaError, "taxonomy has no nodes");

  t.parent_.assign(n, npos);
  t.children_.assign(n, {});
  for (const auto& [parent_id, child_id] : edges) {
    auto p = t.index_.find(parent_id);
    auto c = t.index_.find(child_id);
    if (p == t.index_.end() || c == t.index_.end()) {
      throw Error(ErrorCode::DanglingEdge, "edge (" + parent_id + ", " + child_id + ") references an unknown node");
    }
    if (p->second == c->second) throw Error(ErrorCode::CycleDetected, "self-loop at '" + parent_id + "'");
    if (t.parent_[c->second] != npos) {
      throw Error(ErrorCode::MultipleParents, "node '" + child_id + "' has more than one parent");
    }
    t.parent_[c->second] = p->second;
    t.children_[p->second].push_back(c->second);
  }
  for (auto& kids : t.children_) std::sort(kids.begin(), kids.end());

  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i) {
    if (t.parent_[i] == npos) roots.push_back(i);
  }
  if (roots.empty()) throw Error(ErrorCode::CycleDetected, "no parentless node");
  if (roots.size() > 1) {
    throw Error(ErrorCode::MultipleRoots,
                "nodes '" + t.nodes_[roots[0]].id + "' and '" + t.nodes_[roots[1]].id + "' have no parent");
  }
  t.root_ = roots.front();

  // Iterative DFS from the root; anything not reached sits on a parent cycle.
  t.depth_.assign(n, 0);
  std::vector<std::size_t> pre_order;
  pre_order.reserve(n);
  std::vector<std::size_t> stack{t.root_};
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    pre_order.push_back(v);
    const auto& kids = t.children_[v];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      t.depth_[*it] = t.depth_[v] + 1;
      stack.push_back(*it);
    }
  }
  if (pre_order.size() != n) {
    std::vector<bool> seen(n, false);
    for (auto v : pre_order) seen[v] = true;
    auto it = std::find(seen.begin(), seen.end(), false);
    throw Error(ErrorCode::CycleDetected,
                "node '" + t.nodes_[static_cast<std::size_t>(it - seen.begin())].id + "' is not reachable from the root");
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (t.nodes_[i].is_leaf() && !t.children_[i].empty()) {
      throw Error(ErrorCode::LeafWithChildren, "leaf '" + t.nodes_[i].id + "' has children");
    }
    if (!t.nodes_[i].is_leaf() && t.children_[i].empty()) {
      throw Error(ErrorCode::EmptyInternalNode, "internal node '" + t.nodes_[i].id + "' has no children");
    }
  }

  // Reversed pre-order (with reversed child order) is a post-order.
  t.post_order_.assign(pre_order.rbegin(), pre_order.rend());
  return t;
}

bool Taxonomy::contains(std::string_view id) const { return index_.find(std::string(id)) != index_.end(); }

std::size_t Taxonomy::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw Error(ErrorCode::UnknownNode, "no node '" + std::string(id) + "'");
  return it->second;
}

const std::string* Taxonomy::parent(std::string_view id) const {
  std::size_t p = parent_[index_of(id)];
  return p == npos ? nullptr : &nodes_[p].id;
}

std::vector<std::string> Taxonomy::children(std::string_view id) const {
  std::vector<std::string> out;
  for (auto c : children_[index_of(id)]) out.push_back(nodes_[c].id);
  return out;
}

std::vector<std::size_t> Taxonomy::ancestor_indices(std::size_t index) const {
  std::vector<std::size_t> out;
  for (std::size_t p = parent_[index]; p != npos; p = parent_[p]) out.push_back(p);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<std::string> Taxonomy::ancestors(std::string_view id) const {
  std::vector<std::string> out;
  for (auto a : ancestor_indices(index_of(id))) out.push_back(nodes_[a].id);
  return out;
}

std::vector<std::string> Taxonomy::descendants(std::string_view id) const {
  std::vector<std::size_t> found;
  std::vector<std::size_t> stack(children_[index_of(id)]);
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    found.push_back(v);
    stack.insert(stack.end(), children_[v].begin(), children_[v].end());
  }
  std::sort(found.begin(), found.end());
  std::vector<std::string> out;
  for (auto v : found) out.push_back(nodes_[v].id);
  return out;
}

std::vector<Edge> Taxonomy::edges() const {
  std::vector<Edge> out;
  for (std::size_t p = 0; p < nodes_.size(); ++p) {
    for (auto c : children_[p]) out.emplace_back(nodes_[p].id, nodes_[c].id);
  }
  return out;
}

std::vector<std::string> Taxonomy::leaves(NodeKind kind) const {
  std::vector<std::string> out;
  for (const auto& node : nodes_) {
    if (node.kind == kind) out.push_back(node.id);
  }
  return out;
}

Taxonomy taxonomy_from_json(const nlohmann::json& document) {
  if (!document.is_object() || !document.contains("nodes") || !document.contains("edges")) {
    throw Error(ErrorCode::SchemaError, "taxonomy document needs 'nodes' and 'edges'");
  }
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  try {
    for (const auto& entry : document.at("nodes")) {
      Node node;
      node.id = entry.at("id").get<std::string>();
      node.label = entry.contains("label") ? entry.at("label").get<std::string>() : node.id;
      node.kind = node_kind_from_string(entry.at("kind").get<std::string>());
      nodes.push_back(std::move(node));
    }
    for (const auto& entry : document.at("edges")) {
      if (!entry.is_array() || entry.size() != 2) throw Error(ErrorCode::SchemaError, "edge must be [parent, child]");
      edges.emplace_back(entry[0].get<std::string>(), entry[1].get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, e.what());
  }
  return Taxonomy::build(std::move(nodes), edges);
}

Taxonomy parse_taxonomy(std::string_view document) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return taxonomy_from_json(parsed);
}

nlohmann::json taxonomy_to_json(const Taxonomy& t) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& node : t.nodes()) {
    nodes.push_back({{"id", node.id}, {"label", node.label}, {"kind", std::string(to_string(node.kind))}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [p, c] : t.edges()) edges.push_back({p, c});
  return {{"nodes", nodes}, {"edges", edges}};
}

Taxonomy prune_single_child(const Taxonomy& t) {
  const std::size_t n = t.size();
  auto removable = [&](std::size_t v) {
    return v != t.root_index() && !t.node_at(v).is_leaf() && t.child_indices(v).size() == 1;
  };
  // Splicing never changes the child count of a surviving node, so one pass reaches the fixpoint.
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < n; ++v) {
    if (removable(v)) continue;
    nodes.push_back(t.node_at(v));
    if (v == t.root_index()) continue;
    std::size_t p = t.parent_index(v);
    while (removable(p)) p = t.parent_index(p);
    edges.emplace_back(t.node_at(p).id, t.node_at(v).id);
  }
  return Taxonomy::build(std::move(nodes), edges);
}

Taxonomy attach_unseen(const Taxonomy& t, const std::string& id, const std::string& label, std::string_view parent) {
  const Node& p = t.node(parent);
  if (p.is_leaf()) {
    throw Error(ErrorCode::InvalidParentKind, "cannot attach '" + id + "' under leaf '" + p.id + "'");
  }
  if (t.contains(id)) throw Error(ErrorCode::DuplicateNode, "node '" + id + "' already exists");
  std::vector<Node> nodes = t.nodes();
  nodes.push_back({id, label, NodeKind::UnseenLeaf});
  std::vector<Edge> edges = t.edges();
  edges.emplace_back(p.id, id);
  return Taxonomy::build(std::move(nodes), edges);
}

Taxonomy with_seen_leaves(const Taxonomy& t, const std::set<std::string>& seen) {
  std::vector<Node> nodes = t.nodes();
  for (auto& node : nodes) {
    if (node.is_leaf()) node.kind = seen.count(node.id) ? NodeKind::SeenLeaf : NodeKind::UnseenLeaf;
  }
  return Taxonomy::build(std::move(nodes), t.edges());
}

}  // namespace hat
