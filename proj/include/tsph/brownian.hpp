#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsph/automata.hpp"
#include "tsph/ph0.hpp"
#include "tsph/series.hpp"
#include "tsph/stats.hpp"
#include "tsph/theory.hpp"

namespace tsph {

// ---------------------------------------------------------------------------
// Paths

/// When to stop a discretized path. At least one of the fields must be set;
/// levels are checked after every step.
struct StopRule {
  std::optional<double> horizon;
  std::optional<double> lower;
  std::optional<double> upper;
  std::size_t max_steps = 500'000'000;
};

enum class StopReason { Horizon, Lower, Upper };

/// Random-walk skeleton of B(t) + m t started at 0 with N(m dt, dt) steps.
struct DriftedPath {
  double m = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> values;
  StopReason reason = StopReason::Horizon;

  TimeSeries series() const;
};

DriftedPath sample_path(double m, double dt, const StopRule& stop, std::uint64_t seed);

/// Path from 0 for winding statistics around [b, d]. Sampling stops on
/// reaching d + margin; the return to b from there happens with probability
/// exp(-2m (d + margin - b)) and is spliced in as a jump to b, after which
/// sampling resumes. The hitting order of b and d, hence the winding count
/// around [b, d], has the law of the continuous path up to the step size.
DriftedPath sample_winding_path(double m, double dt, double b, double d, std::uint64_t seed,
                                double margin = 1.0);

// ---------------------------------------------------------------------------
// Exact chains

struct WindingChainSample {
  std::vector<std::size_t> states;
  std::map<std::string, std::size_t> counts;

  std::size_t count(const std::string& var) const;
};

/// Samples the symbolic chain of B(t) + m t on an automaton directly from
/// exit probabilities, without discretizing time.
class ChainSampler {
 public:
  /// Requires m > 0 and a span inside the positive half-line.
  ChainSampler(const LevelAutomaton& automaton, double m);

  WindingChainSample sample(Rng& rng) const;
  /// Traversal counts per variable, in the order of automaton.variables().
  std::vector<std::size_t> counts(Rng& rng) const;
  const std::vector<std::string>& variables() const { return vars_; }

 private:
  const LevelAutomaton* automaton_;
  std::vector<double> prob_;
  std::vector<std::string> vars_;
  std::vector<int> var_of_transition_;
};

WindingChainSample exact_winding_chain(const LevelAutomaton& automaton, double m, std::uint64_t seed);

/// Nearest-neighbour chain of a drifted Brownian path on an increasing
/// grid of levels, from below the grid until escape above it. The returned
/// values are the grid levels in the order the path hits them, bracketed by
/// grid.front() - 1 and grid.back() + 1.
TimeSeries level_skeleton(const std::vector<double>& grid, double m, Rng& rng);

// ---------------------------------------------------------------------------
// Trajectory split

struct TrajectorySplit {
  struct Piece {
    std::size_t begin = 0;  // sample indices, inclusive
    std::size_t end = 0;
  };
  std::vector<Piece> down;  // from a hit of d to the next hit of b
  std::vector<Piece> up;    // from a hit of b to the next hit of d
  std::vector<double> maxima;  // max over each down piece
  std::vector<double> minima;  // min over each up piece

  std::size_t k() const { return down.size(); }
};

/// Chops a path crossing [b, d] at the alternating hitting times of the
/// winding construction. Requires 0 < b < d.
TrajectorySplit split_trajectory(const TimeSeries& path, double b, double d);

// ---------------------------------------------------------------------------
// Rank permutations

/// sigma_plus: ranks 1..k of the maxima above d, left to right.
/// sigma_minus: 0 followed by ranks 1..k of the minima below b. Larger rank
/// means larger value.
struct RankPermutations {
  std::vector<int> sigma_plus;
  std::vector<int> sigma_minus;

  std::size_t k() const { return sigma_plus.size(); }
  void validate() const;
};

/// Nearest larger entries left and right of position l (1-based); 0 and
/// k + 1 when there is none.
std::pair<std::size_t, std::size_t> walls(const std::vector<int>& sigma, std::size_t l);

struct Coupling {
  std::size_t max_position = 0;  // l in 1..k
  std::size_t min_position = 0;  // m in 0..k
  Chirality chirality = Chirality::F;
};

/// Couples every maximum to its minimum. O(k log k).
std::vector<Coupling> couple(const RankPermutations& perms);

/// Number of F minus number of M couplings.
long chirality_excess(const std::vector<Coupling>& couplings);

/// The segment-reversal involution for a non-record index l: reverses
/// sigma_plus over (l_-, l_+) and sigma_minus over [l_-, l_+).
RankPermutations flip(const RankPermutations& perms, std::size_t l);

RankPermutations random_rank_permutations(std::size_t k, Rng& rng);

/// Piecewise-linear series realizing the ranks around [b, d]: alternating
/// minima below b and maxima above d, starting below every minimum and
/// ending above every maximum.
TimeSeries rank_realization(const RankPermutations& perms, double b, double d);

/// Ranks of the straddling maxima and minima of a series around [b, d].
RankPermutations ranks_of(const TimeSeries& series, double b, double d);

// ---------------------------------------------------------------------------
// Monte Carlo

struct McOptions {
  std::size_t n = 100'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct StraddleHistogram {
  std::vector<std::size_t> counts;  // counts[k] = samples with k windings
  Estimate mean;
};

/// Winding counts around [b, d] from exact chains.
StraddleHistogram mc_straddle_distribution(double m, double b, double d, const McOptions& opts);

/// Same histogram from discretized paths (sample_winding_path + count_windings).
StraddleHistogram mc_straddle_distribution_paths(double m, double b, double d, double dt,
                                                 const McOptions& opts);

struct ExcessResult {
  std::map<std::size_t, Estimate> conditional;  // keyed by k
  Estimate unconditional;
};

/// F - M among bars straddling [b, d]: k from the exact chain, chiralities
/// from uniformly random rank permutations.
ExcessResult mc_chirality_excess(double m, double b, double d, const McOptions& opts);

/// The same statistic read off compute_ph0 of discretized paths.
Estimate mc_chirality_excess_paths(double m, double b, double d, double dt, const McOptions& opts);

/// Sample covariance of the winding counts around two non-nested intervals.
Estimate mc_winding_covariance(double m, const theory::IntervalPair& iv, const McOptions& opts);

struct IntensityBin {
  double b_lo = 0.0, b_hi = 0.0, d_lo = 0.0, d_hi = 0.0;
  Estimate count;       // bars per path with birth in (b_lo, b_hi], death in [d_lo, d_hi)
  double theory = 0.0;  // q(b_hi,d_lo) - q(b_lo,d_lo) - q(b_hi,d_hi) + q(b_lo,d_hi)
};

/// Bar counts in the boxes (b, b+h] x [b+delta, b+delta+h) for each delta,
/// from exact level skeletons on a grid of spacing h.
std::vector<IntensityBin> mc_intensity(double m, double b, double h,
                                       const std::vector<double>& deltas, const McOptions& opts);

}  // namespace tsph
