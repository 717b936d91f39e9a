#include "tsph/merge_tree.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "tsph/error.hpp"

namespace tsph {

NodeId PlaneMergeTree::add_node(double height, std::optional<std::size_t> sample_index) {
  nodes_.push_back({height, sample_index, {}});
  return nodes_.size() - 1;
}

std::size_t PlaneMergeTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(),
                    [](const TreeNode& n) { return n.children.empty(); }));
}

void PlaneMergeTree::validate() const {
  if (nodes_.size() < 2) throw ValidationError("a merge tree needs a leaf and a root");
  if (root_ >= nodes_.size()) throw ValidationError("root id out of range");

  std::vector<int> parents(nodes_.size(), 0);
  for (const auto& n : nodes_) {
    for (NodeId c : n.children) {
      if (c >= nodes_.size()) throw ValidationError("child id out of range");
      ++parents[c];
    }
  }
  if (parents[root_] != 0) throw ValidationError("root has a parent");
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (id != root_ && parents[id] != 1) {
      throw ValidationError("node " + std::to_string(id) + " does not have exactly one parent");
    }
  }

  std::vector<NodeId> stack{root_};
  std::size_t visited = 0;
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    ++visited;
    const auto& n = nodes_[id];
    const std::size_t expected = id == root_ ? 1 : (n.children.empty() ? 0 : 2);
    if (n.children.size() != expected) {
      throw ValidationError("node " + std::to_string(id) + " has " +
                            std::to_string(n.children.size()) + " children");
    }
    for (NodeId c : n.children) {
      if (!(nodes_[c].height < n.height)) {
        throw ValidationError("heights must increase towards the root at node " +
                              std::to_string(id));
      }
      stack.push_back(c);
    }
  }
  if (visited != nodes_.size()) throw ValidationError("tree is not connected");

  std::vector<double> heights;
  heights.reserve(nodes_.size());
  for (const auto& n : nodes_) heights.push_back(n.height);
  std::sort(heights.begin(), heights.end());
  if (std::adjacent_find(heights.begin(), heights.end()) != heights.end()) {
    throw ValidationError("non-generic tree: repeated heights");
  }

  NodeId leftmost = root_;
  while (!nodes_[leftmost].children.empty()) leftmost = nodes_[leftmost].children.front();
  if (nodes_[leftmost].height != heights.front()) {
    throw ValidationError("leftmost leaf must be the global minimum");
  }
}

bool plane_isomorphic(const PlaneMergeTree& a, const PlaneMergeTree& b) {
  if (a.size() != b.size() || a.size() == 0) return a.size() == b.size();
  std::vector<std::pair<NodeId, NodeId>> stack{{a.root(), b.root()}};
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    const auto& nx = a.node(x);
    const auto& ny = b.node(y);
    if (nx.height != ny.height || nx.children.size() != ny.children.size()) return false;
    for (std::size_t i = 0; i < nx.children.size(); ++i) {
      stack.push_back({nx.children[i], ny.children[i]});
    }
  }
  return true;
}

}  // namespace tsph
