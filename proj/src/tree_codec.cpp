#include "tsph/tree_codec.hpp"

#include <algorithm>
#include <string>

#include "tsph/error.hpp"

namespace tsph {

namespace {

void validate_pile(const StemPile& pile) {
  const std::size_t n = pile.bars.size();
  if (!(pile.stem.birth < pile.stem.death)) throw ValidationError("stem needs birth < death");

  std::vector<double> endpoints{pile.stem.birth, pile.stem.death};
  for (std::size_t k = 0; k < n; ++k) {
    const Bar& bar = pile.bars[k];
    const std::string name = "bar " + std::to_string(k + 1);
    if (!(bar.birth < bar.death)) throw ValidationError(name + " needs birth < death");
    if (!bar.parent) throw ValidationError(name + " has no parent");
    if (*bar.parent > n) throw ValidationError(name + " has an unknown parent");
    if (*bar.parent == k + 1) throw ValidationError(name + " is its own parent");
    const Bar& parent = pile.bar(*bar.parent);
    if (!(parent.birth < bar.birth && bar.death < parent.death)) {
      throw ValidationError(name + " is not straddled by its parent");
    }
    if (*bar.parent == kStemId && bar.chirality == Chirality::M) {
      throw ValidationError(name + ": children of the stem must be F");
    }
    endpoints.push_back(bar.birth);
    endpoints.push_back(bar.death);
  }

  // 0 = unvisited, 1 = on the current chain, 2 = known to reach the stem.
  std::vector<int> state(n + 1, 0);
  state[kStemId] = 2;
  for (BarId start = 1; start <= n; ++start) {
    std::vector<BarId> chain;
    BarId cur = start;
    while (state[cur] == 0) {
      state[cur] = 1;
      chain.push_back(cur);
      cur = *pile.bar(cur).parent;
    }
    if (state[cur] == 1) throw ValidationError("cyclic parentage in pile");
    for (BarId id : chain) state[id] = 2;
  }

  std::sort(endpoints.begin(), endpoints.end());
  if (std::adjacent_find(endpoints.begin(), endpoints.end()) != endpoints.end()) {
    throw NonGenericError("pile endpoints must be pairwise distinct");
  }
}

}  // namespace

PlaneMergeTree reconstruct_tree(const StemPile& pile) {
  validate_pile(pile);
  const std::size_t n = pile.bars.size();

  std::vector<std::vector<BarId>> kids(n + 1);
  for (std::size_t k = 0; k < n; ++k) kids[*pile.bars[k].parent].push_back(k + 1);

  // Children before parents.
  std::vector<BarId> order;
  order.reserve(n + 1);
  std::vector<BarId> stack{kStemId};
  while (!stack.empty()) {
    const BarId id = stack.back();
    stack.pop_back();
    order.push_back(id);
    for (BarId c : kids[id]) stack.push_back(c);
  }

  PlaneMergeTree tree;
  std::vector<NodeId> top(n + 1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const BarId id = *it;
    auto& ch = kids[id];
    std::sort(ch.begin(), ch.end(),
              [&](BarId a, BarId b) { return pile.bar(a).death < pile.bar(b).death; });
    NodeId below = tree.add_node(pile.bar(id).birth);
    for (BarId c : ch) {
      const NodeId junction = tree.add_node(pile.bar(c).death);
      if (pile.bar(c).chirality == Chirality::M) {
        tree.add_child(junction, top[c]);
        tree.add_child(junction, below);
      } else {
        tree.add_child(junction, below);
        tree.add_child(junction, top[c]);
      }
      below = junction;
    }
    top[id] = below;
  }
  const NodeId root = tree.add_node(pile.stem.death);
  tree.add_child(root, top[kStemId]);
  tree.set_root(root);
  return tree;
}

TimeSeries contour_walk(const PlaneMergeTree& tree) {
  tree.validate();
  std::vector<double> heights;
  heights.reserve(2 * tree.size());
  bool started = false;

  struct Frame {
    NodeId id;
    std::size_t next;
  };
  std::vector<Frame> stack{{tree.root(), 0}};
  auto visit = [&](NodeId id) {
    started = started || tree.is_leaf(id);
    if (started) heights.push_back(tree.node(id).height);
  };
  visit(tree.root());
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& ch = tree.node(f.id).children;
    if (f.next < ch.size()) {
      const NodeId child = ch[f.next++];
      stack.push_back({child, 0});
      visit(child);
    } else {
      stack.pop_back();
      if (!stack.empty()) visit(stack.back().id);
    }
  }
  return TimeSeries::from_values(std::move(heights));
}

}  // namespace tsph
