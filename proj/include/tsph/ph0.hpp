#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tsph/merge_tree.hpp"
#include "tsph/series.hpp"

namespace tsph {

/// M: the coupled minimum precedes the maximum. F: it follows it.
enum class Chirality { M, F };

char to_char(Chirality c);
Chirality chirality_from_char(char c);

/// Bar identifiers: 0 is the stem, i + 1 is `PersistenceDiagram::bars[i]`.
using BarId = std::size_t;
inline constexpr BarId kStemId = 0;

struct Bar {
  double birth = 0.0;
  double death = 0.0;
  std::size_t birth_index = 0;
  std::size_t death_index = 0;
  Chirality chirality = Chirality::M;
  std::optional<BarId> parent;

  friend bool operator==(const Bar&, const Bar&) = default;
};

struct PersistenceDiagram {
  Bar stem;
  std::vector<Bar> bars;  // finite bars in emission order
  std::size_t max_stack_depth = 0;

  const Bar& bar(BarId id) const { return id == kStemId ? stem : bars.at(id - 1); }
  std::size_t size() const { return bars.size(); }
};

/// One-pass two-stack computation of the 0-dimensional diagram of a
/// generic augmented series. Bars come out in pop order, each with its
/// chirality and elder-rule parent.
PersistenceDiagram compute_ph0(const TimeSeries& series);

struct StackProfile {
  std::size_t max_depth = 0;
  std::vector<std::size_t> trace;  // combined depth after each sample
};

StackProfile stack_depth_profile(const TimeSeries& series);

/// Windings around [b, d]: alternating first hits of d then b, counted on
/// completion of each b hit. Requires the series to start below b and end
/// above d.
std::size_t count_windings(const TimeSeries& series, double b, double d);

/// Bars with birth <= b and death >= d.
std::size_t quadrant_content(const PersistenceDiagram& diagram, double b, double d,
                             bool include_stem);

PlaneMergeTree build_merge_tree(const TimeSeries& series);

/// Recursive stem peeling of a plane merge tree.
PersistenceDiagram elder_decompose(const PlaneMergeTree& tree);

/// Multiset equality of (birth, death, chirality, parent's endpoints),
/// optionally including critical indices.
bool same_diagram(const PersistenceDiagram& a, const PersistenceDiagram& b,
                  bool compare_indices = false);

}  // namespace tsph
