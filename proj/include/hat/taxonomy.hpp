#pragma once

#include <cstddef>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hat {

enum class NodeKind { Internal, SeenLeaf, UnseenLeaf };

std::string_view to_string(NodeKind kind);
NodeKind node_kind_from_string(std::string_view text);

struct Node {
  std::string id;
  std::string label;
  NodeKind kind = NodeKind::Internal;

  bool is_leaf() const { return kind != NodeKind::Internal; }
  friend bool operator==(const Node&, const Node&) = default;
};

using Edge = std::pair<std::string, std::string>;

// Rooted tree over category nodes. Nodes are stored sorted by id so every
// iteration order in the library is lexicographic and deterministic.
// Immutable once built; transformations return new values.
class Taxonomy {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  Taxonomy() = default;

  // Validates the tree invariants and throws hat::Error on violation.
  static Taxonomy build(std::vector<Node> nodes, const std::vector<Edge>& edges);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(std::string_view id) const { return nodes_[index_of(id)]; }
  const Node& node_at(std::size_t index) const { return nodes_[index]; }
  bool contains(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;

  const std::string& root() const { return nodes_[root_].id; }
  std::size_t root_index() const { return root_; }

  std::size_t parent_index(std::size_t index) const { return parent_[index]; }
  const std::vector<std::size_t>& child_indices(std::size_t index) const { return children_[index]; }
  // Children strictly before parents; siblings in id order.
  const std::vector<std::size_t>& post_order() const { return post_order_; }
  std::size_t depth_at(std::size_t index) const { return depth_[index]; }

  const std::string* parent(std::string_view id) const;
  std::vector<std::string> children(std::string_view id) const;
  // Strict ancestors ordered root-first.
  std::vector<std::string> ancestors(std::string_view id) const;
  std::vector<std::size_t> ancestor_indices(std::size_t index) const;
  // Strict descendants in id order.
  std::vector<std::string> descendants(std::string_view id) const;
  std::size_t depth(std::string_view id) const { return depth_[index_of(id)]; }

  std::vector<Edge> edges() const;
  std::vector<std::string> leaves(NodeKind kind) const;

  friend bool operator==(const Taxonomy& a, const Taxonomy& b) {
    return a.nodes_ == b.nodes_ && a.parent_ == b.parent_;
  }

 private:
  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> parent_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> post_order_;
  std::vector<std::size_t> depth_;
  std::size_t root_ = 0;
};

Taxonomy parse_taxonomy(std::string_view document);
Taxonomy taxonomy_from_json(const nlohmann::json& document);
nlohmann::json taxonomy_to_json(const Taxonomy& t);

// Splices out every non-root internal node with exactly one child.
Taxonomy prune_single_child(const Taxonomy& t);

Taxonomy attach_unseen(const Taxonomy& t, const std::string& id, const std::string& label,
                       std::string_view parent);

// Reassigns leaf kinds: leaves in `seen` become seen-leaves, all other leaves unseen.
Taxonomy with_seen_leaves(const Taxonomy& t, const std::set<std::string>& seen);

}  // namespace hat
