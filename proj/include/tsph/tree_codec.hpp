#pragma once

#include "tsph/merge_tree.hpp"
#include "tsph/ph0.hpp"
#include "tsph/series.hpp"

namespace tsph {

/// Stems with their attachment (parent) and chirality, read as input for
/// reconstruction. Same layout as a persistence diagram.
using StemPile = PersistenceDiagram;

/// Rebuilds the unique plane merge tree of a pile. An M bar hangs to the
/// left of its parent stem, an F bar to the right; same-side siblings are
/// ordered by decreasing merge height from the outside in.
///
/// Throws ValidationError on a missing or cyclic parent, a parent that does
/// not strictly straddle its child, an M child of the stem, or repeated
/// endpoint values.
PlaneMergeTree reconstruct_tree(const StemPile& pile);

/// Height walk of a plane tree in plane order, one time unit per edge,
/// starting at the leftmost leaf and ending at the root.
TimeSeries contour_walk(const PlaneMergeTree& tree);

}  // namespace tsph
