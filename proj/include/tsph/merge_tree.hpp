#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace tsph {

using NodeId = std::size_t;

struct TreeNode {
  double height = 0.0;
  // Sample of the generating series, when the tree was built from one.
  std::optional<std::size_t> sample_index;
  // Left-to-right order along the time axis.
  std::vector<NodeId> children;
};

/// Rooted plane merge tree. Leaves sit at local-minimum heights, binary
/// internal nodes at merge heights, and the root (one child) at the global
/// maximum.
class PlaneMergeTree {
 public:
  PlaneMergeTree() = default;

  NodeId add_node(double height, std::optional<std::size_t> sample_index = {});
  void set_root(NodeId root) { root_ = root; }
  void add_child(NodeId parent, NodeId child) { nodes_.at(parent).children.push_back(child); }

  NodeId root() const { return root_; }
  std::size_t size() const { return nodes_.size(); }
  const TreeNode& node(NodeId id) const { return nodes_.at(id); }
  TreeNode& node(NodeId id) { return nodes_.at(id); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  bool is_leaf(NodeId id) const { return nodes_.at(id).children.empty(); }
  std::size_t leaf_count() const;

  /// Throws ValidationError unless: every node but the root has exactly one
  /// parent, the root has one child, other internal nodes have two,
  /// heights strictly increase towards the root, all heights are distinct,
  /// and the leftmost leaf is the lowest one.
  void validate() const;

 private:
  std::vector<TreeNode> nodes_;
  NodeId root_ = 0;
};

/// Equality as plane trees: same shape, same child order, same heights.
bool plane_isomorphic(const PlaneMergeTree& a, const PlaneMergeTree& b);

}  // namespace tsph
