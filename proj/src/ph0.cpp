#include "tsph/ph0.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "tsph/error.hpp"

namespace tsph {

char to_char(Chirality c) { return c == Chirality::M ? 'M' : 'F'; }

Chirality chirality_from_char(char c) {
  if (c == 'M') return Chirality::M;
  if (c == 'F') return Chirality::F;
  throw ValidationError(std::string("unknown chirality '") + c + "'");
}

namespace {

struct StackEntry {
  std::size_t index;
  double value;
};

struct PoppedBar {
  std::size_t birth_index;
  std::size_t death_index;
  std::optional<std::size_t> parent_birth_index;
};

// M bars popped during a descent merge into the region to their right,
// whose elder minimum is whatever occupies the minima-stack slot of `cell`
// when the series first rises above `threshold`. A later descent below that
// slot moves the region's minimum down, so cells are merged and clamped.
struct PendingParent {
  double threshold;
  std::size_t bar;
  std::size_t cell;
};

class SlotCells {
 public:
  // Clamps every open cell at or above `slot` into one cell at `slot`.
  std::size_t open(std::size_t slot) {
    const std::size_t c = parent_.size();
    parent_.push_back(c);
    slot_.push_back(slot);
    while (!open_.empty() && slot_[open_.back()] >= slot) {
      parent_[open_.back()] = c;
      open_.pop_back();
    }
    open_.push_back(c);
    return c;
  }
  std::size_t slot(std::size_t cell) {
    while (parent_[cell] != cell) cell = parent_[cell] = parent_[parent_[cell]];
    return slot_[cell];
  }

 private:
  std::vector<std::size_t> parent_, slot_, open_;
};

struct SweepResult {
  std::vector<PoppedBar> bars;
  StackProfile profile;
};

void check_input(const TimeSeries& series) {
  if (!is_augmented(series)) {
    throw ValidationError(
        "series must be augmented: first sample the strict minimum, last the strict maximum");
  }
  (void)critical_points(series);  // throws on tied extrema
}

SweepResult sweep(const TimeSeries& series) {
  const auto& v = series.values();
  const std::size_t n = v.size();

  SweepResult out;
  out.profile.trace.resize(n);
  std::vector<StackEntry> minima{{0, v[0]}};
  std::vector<StackEntry> maxima;
  // Min-heap on threshold: a descent can pop maxima older and higher than
  // thresholds already waiting.
  auto later = [](const PendingParent& a, const PendingParent& b) { return a.threshold > b.threshold; };
  std::priority_queue<PendingParent, std::vector<PendingParent>, decltype(later)> pending(later);
  std::vector<std::size_t> batch;      // M pops of the current descent
  SlotCells cells;
  int direction = +1;
  std::size_t candidate = 0;

  auto depth = [&] { return minima.size() + maxima.size(); };
  out.profile.trace[0] = depth();
  out.profile.max_depth = depth();

  auto pop_pair = [&]() -> std::size_t {
    const StackEntry lo = minima.back();
    const StackEntry hi = maxima.back();
    minima.pop_back();
    maxima.pop_back();
    // No critical point strictly inside the popped span may remain stacked.
    if ((!minima.empty() && !(minima.back().value < lo.value)) ||
        (!maxima.empty() && !(maxima.back().value > hi.value))) {
      throw std::logic_error("stack invariant violated: popped pair does not span the stack tops");
    }
    out.bars.push_back({lo.index, hi.index, std::nullopt});
    return out.bars.size() - 1;
  };

  for (std::size_t i = 1; i < n; ++i) {
    const double diff = v[i] - v[i - 1];
    if (diff != 0.0) {
      if ((diff > 0.0 ? 1 : -1) != direction) {
        if (direction > 0) {
          maxima.push_back({candidate, v[candidate]});
        } else {
          minima.push_back({candidate, v[candidate]});
          const std::size_t cell = cells.open(minima.size() - 1);
          for (std::size_t b : batch) pending.push({v[out.bars[b].death_index], b, cell});
          batch.clear();
        }
        direction = -direction;
      }
      candidate = i;

      if (direction > 0) {
        while (!pending.empty() && pending.top().threshold < v[i]) {
          out.bars[pending.top().bar].parent_birth_index = minima.at(cells.slot(pending.top().cell)).index;
          pending.pop();
        }
        while (!maxima.empty() && v[i] > maxima.back().value) {
          const std::size_t b = pop_pair();
          out.bars[b].parent_birth_index = minima.back().index;
        }
      } else {
        while (minima.size() > 1 && v[i] < minima.back().value) {
          batch.push_back(pop_pair());
        }
      }
    }
    out.profile.trace[i] = depth();
    out.profile.max_depth = std::max(out.profile.max_depth, depth());
  }
  if (minima.size() != 1 || !maxima.empty() || !pending.empty() || !batch.empty()) {
    throw std::logic_error("unbalanced stacks at the end of the sweep");
  }
  return out;
}

}  // namespace

PersistenceDiagram compute_ph0(const TimeSeries& series) {
  check_input(series);
  const auto result = sweep(series);
  const auto& v = series.values();
  const std::size_t last = series.size() - 1;

  PersistenceDiagram diagram;
  diagram.stem = {v[0], v[last], 0, last, Chirality::M, std::nullopt};
  diagram.max_stack_depth = result.profile.max_depth;

  std::map<std::size_t, BarId> id_by_birth{{0, kStemId}};
  for (std::size_t k = 0; k < result.bars.size(); ++k) {
    id_by_birth[result.bars[k].birth_index] = k + 1;
  }
  diagram.bars.reserve(result.bars.size());
  for (const auto& raw : result.bars) {
    Bar bar;
    bar.birth_index = raw.birth_index;
    bar.death_index = raw.death_index;
    bar.birth = v[raw.birth_index];
    bar.death = v[raw.death_index];
    bar.chirality = raw.birth_index < raw.death_index ? Chirality::M : Chirality::F;
    bar.parent = id_by_birth.at(raw.parent_birth_index.value());
    diagram.bars.push_back(bar);
  }
  return diagram;
}

StackProfile stack_depth_profile(const TimeSeries& series) {
  check_input(series);
  return sweep(series).profile;
}

std::size_t count_windings(const TimeSeries& series, double b, double d) {
  if (!(b < d)) throw ValidationError("windings need b < d");
  if (series.empty() || !(series.values().front() < b) || !(series.values().back() > d)) {
    throw CrossingError("series must start below b and end above d");
  }
  std::size_t count = 0;
  bool seeking_d = true;
  for (double x : series.values()) {
    if (seeking_d && x >= d) {
      seeking_d = false;
    } else if (!seeking_d && x <= b) {
      ++count;
      seeking_d = true;
    }
  }
  return count;
}

std::size_t quadrant_content(const PersistenceDiagram& diagram, double b, double d,
                             bool include_stem) {
  if (!(b < d)) throw ValidationError("quadrant apex needs b < d");
  auto inside = [&](const Bar& bar) { return bar.birth <= b && bar.death >= d; };
  std::size_t count = static_cast<std::size_t>(
      std::count_if(diagram.bars.begin(), diagram.bars.end(), inside));
  if (include_stem && inside(diagram.stem)) ++count;
  return count;
}

PlaneMergeTree build_merge_tree(const TimeSeries& series) {
  check_input(series);
  const auto seq = critical_points(series);
  const auto& pts = seq.points;

  // Cartesian tree over the alternating leaf/merge sequence; the last
  // critical point is the global maximum and becomes the root.
  PlaneMergeTree tree;
  std::vector<NodeId> spine;
  NodeId pending = tree.add_node(pts[0].value, pts[0].index);
  for (std::size_t j = 1; j + 1 < pts.size(); j += 2) {
    const NodeId merge = tree.add_node(pts[j].value, pts[j].index);
    while (!spine.empty() && tree.node(spine.back()).height < pts[j].value) {
      tree.add_child(spine.back(), pending);
      pending = spine.back();
      spine.pop_back();
    }
    tree.add_child(merge, pending);
    spine.push_back(merge);
    pending = tree.add_node(pts[j + 1].value, pts[j + 1].index);
  }
  while (!spine.empty()) {
    tree.add_child(spine.back(), pending);
    pending = spine.back();
    spine.pop_back();
  }
  const NodeId root = tree.add_node(pts.back().value, pts.back().index);
  tree.add_child(root, pending);
  tree.set_root(root);
  return tree;
}

PersistenceDiagram elder_decompose(const PlaneMergeTree& tree) {
  tree.validate();
  const std::size_t n = tree.size();

  // Post-order: lowest leaf of every subtree, and in-order positions used
  // as critical indices when nodes carry no sample index.
  std::vector<NodeId> lowest(n);
  std::vector<std::size_t> position(n, 0);
  {
    std::vector<NodeId> order;
    order.reserve(n);
    std::vector<NodeId> stack{tree.root()};
    while (!stack.empty()) {
      const NodeId id = stack.back();
      stack.pop_back();
      order.push_back(id);
      for (NodeId c : tree.node(id).children) stack.push_back(c);
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto& node = tree.node(*it);
      lowest[*it] = *it;
      for (NodeId c : node.children) {
        if (tree.node(lowest[c]).height < tree.node(lowest[*it]).height || lowest[*it] == *it) {
          lowest[*it] = lowest[c];
        }
      }
    }
    // In-order: first child, node, remaining children.
    std::size_t counter = 0;
    std::vector<std::pair<NodeId, bool>> walk{{tree.root(), false}};
    while (!walk.empty()) {
      auto [id, expanded] = walk.back();
      walk.pop_back();
      const auto& ch = tree.node(id).children;
      if (expanded || ch.empty()) {
        position[id] = counter++;
        continue;
      }
      for (std::size_t k = ch.size(); k-- > 1;) walk.push_back({ch[k], false});
      walk.push_back({id, true});
      walk.push_back({ch[0], false});
    }
  }
  auto index_of = [&](NodeId id) {
    return tree.node(id).sample_index.value_or(position[id]);
  };

  PersistenceDiagram diagram;
  const NodeId root = tree.root();
  const NodeId stem_leaf = lowest[root];
  diagram.stem = {tree.node(stem_leaf).height, tree.node(root).height,
                  index_of(stem_leaf),          index_of(root),
                  index_of(stem_leaf) < index_of(root) ? Chirality::M : Chirality::F,
                  std::nullopt};

  // Walk each stem from its top down to its lowest leaf; every off-stem
  // child hangs a new bar whose death is the junction height.
  struct Work {
    NodeId top;
    BarId bar;
  };
  std::vector<Work> work{{tree.node(root).children.front(), kStemId}};
  while (!work.empty()) {
    const Work w = work.back();
    work.pop_back();
    NodeId cur = w.top;
    while (!tree.is_leaf(cur)) {
      const auto& ch = tree.node(cur).children;
      const std::size_t on_stem = lowest[ch[0]] == lowest[cur] ? 0 : 1;
      const NodeId off = ch[1 - on_stem];
      const NodeId leaf = lowest[off];
      Bar bar;
      bar.birth = tree.node(leaf).height;
      bar.death = tree.node(cur).height;
      bar.birth_index = index_of(leaf);
      bar.death_index = index_of(cur);
      bar.chirality = on_stem == 1 ? Chirality::M : Chirality::F;
      bar.parent = w.bar;
      diagram.bars.push_back(bar);
      work.push_back({off, diagram.bars.size()});
      cur = ch[on_stem];
    }
  }
  return diagram;
}

namespace {

using BarKey = std::tuple<double, double, char, double, double, std::size_t, std::size_t>;

std::vector<BarKey> keys(const PersistenceDiagram& d, bool with_indices) {
  std::vector<BarKey> out;
  out.reserve(d.bars.size());
  for (const auto& bar : d.bars) {
    const Bar& parent = d.bar(bar.parent.value_or(kStemId));
    out.emplace_back(bar.birth, bar.death, to_char(bar.chirality), parent.birth, parent.death,
                     with_indices ? bar.birth_index : 0, with_indices ? bar.death_index : 0);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

bool same_diagram(const PersistenceDiagram& a, const PersistenceDiagram& b,
                  bool compare_indices) {
  if (a.stem.birth != b.stem.birth || a.stem.death != b.stem.death) return false;
  if (compare_indices &&
      (a.stem.birth_index != b.stem.birth_index || a.stem.death_index != b.stem.death_index)) {
    return false;
  }
  return keys(a, compare_indices) == keys(b, compare_indices);
}

}  // namespace tsph
