#include "tsph/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tsph/error.hpp"

namespace tsph {

namespace {

void require_drift(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError("drift m must be positive");
}

void require_levels(double b, double d) {
  if (!(b > 0.0) || !(b < d) || !std::isfinite(d)) {
    throw ValidationError("levels must satisfy 0 < b < d");
  }
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace

TimeSeries DriftedPath::series() const {
  std::vector<double> t(values.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) * dt;
  return TimeSeries(std::move(t), values);
}

DriftedPath sample_path(double m, double dt, const StopRule& stop, std::uint64_t seed) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time step must be positive");
  if (!std::isfinite(m)) throw ValidationError("drift must be finite");
  if (!stop.horizon && !stop.lower && !stop.upper) throw ValidationError("stop rule is empty");
  if (stop.lower && stop.upper && !(*stop.lower < 0.0 && 0.0 < *stop.upper)) {
    throw ValidationError("stop levels must bracket the start at 0");
  }
  if (stop.horizon && !(*stop.horizon > 0.0)) throw ValidationError("horizon must be positive");

  DriftedPath path;
  path.m = m;
  path.dt = dt;
  path.seed = seed;
  path.values.push_back(0.0);
  Rng rng(seed);
  std::normal_distribution<double> step(m * dt, std::sqrt(dt));
  const std::size_t horizon_steps =
      stop.horizon ? static_cast<std::size_t>(std::llround(*stop.horizon / dt)) : stop.max_steps;
  double x = 0.0;
  for (std::size_t i = 0;; ++i) {
    if (i >= horizon_steps) {
      path.reason = StopReason::Horizon;
      break;
    }
    if (i >= stop.max_steps) throw ValidationError("path did not stop within max_steps");
    x += step(rng);
    path.values.push_back(x);
    if (stop.upper && x >= *stop.upper) {
      path.reason = StopReason::Upper;
      break;
    }
    if (stop.lower && x <= *stop.lower) {
      path.reason = StopReason::Lower;
      break;
    }
  }
  return path;
}

DriftedPath sample_winding_path(double m, double dt, double b, double d, std::uint64_t seed,
                                double margin) {
  require_drift(m);
  require_levels(b, d);
  if (!(dt > 0.0)) throw ValidationError("time step must be positive");
  if (!(margin > 0.0)) throw ValidationError("margin must be positive");
  DriftedPath path;
  path.m = m;
  path.dt = dt;
  path.seed = seed;
  path.reason = StopReason::Upper;
  path.values.push_back(0.0);
  Rng rng(seed);
  std::normal_distribution<double> step(m * dt, std::sqrt(dt));
  const double top = d + margin;
  const double return_prob = theory::decay(m, top - b);
  double x = 0.0;
  while (true) {
    x += step(rng);
    path.values.push_back(x);
    if (x >= top) {
      if (uniform01(rng) >= return_prob) break;
      x = b;
      path.values.push_back(x);
    }
  }
  return path;
}

// ---------------------------------------------------------------------------

std::size_t WindingChainSample::count(const std::string& var) const {
  const auto it = counts.find(var);
  return it == counts.end() ? 0 : it->second;
}

ChainSampler::ChainSampler(const LevelAutomaton& automaton, double m)
    : automaton_(&automaton), vars_(automaton.variables()) {
  require_drift(m);
  if (!(automaton.span().first > 0.0)) throw ValidationError("automaton span must be positive");
  prob_ = brownian_probabilities(automaton, m);
  for (const auto& t : automaton.transitions()) {
    int v = -1;
    if (t.var) v = static_cast<int>(std::find(vars_.begin(), vars_.end(), *t.var) - vars_.begin());
    var_of_transition_.push_back(v);
  }
}

namespace {

constexpr std::size_t kChainStepLimit = 1'000'000'000;

template <class OnStep>
void walk_chain(const LevelAutomaton& a, const std::vector<double>& prob, Rng& rng, OnStep on_step) {
  std::size_t state = a.start();
  for (std::size_t steps = 0; !a.is_absorbing(state); ++steps) {
    if (steps > kChainStepLimit) throw DivergenceError("chain did not reach an absorbing state");
    const std::size_t up = *a.up(state);
    std::size_t t = up;
    if (const auto down = a.down(state)) {
      if (uniform01(rng) < prob[*down]) t = *down;
    }
    state = a.transitions()[t].to;
    on_step(t, state);
  }
}

}  // namespace

WindingChainSample ChainSampler::sample(Rng& rng) const {
  WindingChainSample s;
  s.states.push_back(automaton_->start());
  walk_chain(*automaton_, prob_, rng, [&](std::size_t t, std::size_t state) {
    s.states.push_back(state);
    if (const auto& var = automaton_->transitions()[t].var) ++s.counts[*var];
  });
  return s;
}

std::vector<std::size_t> ChainSampler::counts(Rng& rng) const {
  std::vector<std::size_t> c(vars_.size(), 0);
  walk_chain(*automaton_, prob_, rng, [&](std::size_t t, std::size_t) {
    if (var_of_transition_[t] >= 0) ++c[static_cast<std::size_t>(var_of_transition_[t])];
  });
  return c;
}

WindingChainSample exact_winding_chain(const LevelAutomaton& automaton, double m, std::uint64_t seed) {
  Rng rng(seed);
  return ChainSampler(automaton, m).sample(rng);
}

namespace {

/// Visits grid indices in hitting order; calls visit(i) for each hit.
template <class Visit>
void skeleton_walk(const std::vector<double>& grid, double m, Rng& rng, Visit visit) {
  const std::size_t top = grid.size() - 1;
  std::vector<double> p_down(grid.size(), 0.0);
  for (std::size_t i = 1; i < top; ++i) {
    p_down[i] = theory::exit_probabilities(m, grid[i] - grid[i - 1], grid[i + 1] - grid[i]).down;
  }
  if (top > 0) p_down[top] = theory::decay(m, grid[top] - grid[top - 1]);
  std::size_t i = 0;
  visit(i);
  while (true) {
    // From the lowest level the path reaches the next one almost surely.
    const bool down = i > 0 && uniform01(rng) < p_down[i];
    if (down) {
      --i;
    } else if (i == top) {
      return;
    } else {
      ++i;
    }
    visit(i);
  }
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("level grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ValidationError("level grid must increase strictly");
  }
}

}  // namespace

TimeSeries level_skeleton(const std::vector<double>& grid, double m, Rng& rng) {
  require_drift(m);
  check_grid(grid);
  std::vector<double> v{grid.front() - 1.0};
  skeleton_walk(grid, m, rng, [&](std::size_t i) { v.push_back(grid[i]); });
  v.push_back(grid.back() + 1.0);
  return TimeSeries::from_values(std::move(v));
}

// ---------------------------------------------------------------------------

TrajectorySplit split_trajectory(const TimeSeries& path, double b, double d) {
  require_levels(b, d);
  const auto& v = path.values();
  if (v.empty() || !(v.front() < b) || !(v.back() > d)) {
    throw CrossingError("path must start below b and end above d");
  }
  // Alternating hitting times: first d, then b, then d, ...
  std::vector<std::size_t> hits;
  bool seeking_d = true;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (seeking_d ? v[i] >= d : v[i] <= b) {
      hits.push_back(i);
      seeking_d = !seeking_d;
    }
  }
  // hits = t^d_1, t^b_1, ..., t^d_k, t^b_k, t^d_{k+1}
  TrajectorySplit split;
  for (std::size_t l = 0; l + 2 < hits.size(); l += 2) {
    TrajectorySplit::Piece down{hits[l], hits[l + 1]};
    TrajectorySplit::Piece up{hits[l + 1], hits[l + 2]};
    split.down.push_back(down);
    split.up.push_back(up);
    split.maxima.push_back(*std::max_element(v.begin() + down.begin, v.begin() + down.end + 1));
    split.minima.push_back(*std::min_element(v.begin() + up.begin, v.begin() + up.end + 1));
  }
  return split;
}

// ---------------------------------------------------------------------------

void RankPermutations::validate() const {
  const std::size_t k = sigma_plus.size();
  if (sigma_minus.size() != k + 1) throw ValidationError("sigma_minus must have k + 1 entries");
  if (sigma_minus.front() != 0) throw ValidationError("sigma_minus must start with 0");
  auto is_perm = [k](auto first, auto last) {
    std::vector<bool> seen(k + 1, false);
    for (auto it = first; it != last; ++it) {
      if (*it < 1 || static_cast<std::size_t>(*it) > k || seen[*it]) return false;
      seen[*it] = true;
    }
    return true;
  };
  if (!is_perm(sigma_plus.begin(), sigma_plus.end())) {
    throw ValidationError("sigma_plus is not a permutation of 1..k");
  }
  if (!is_perm(sigma_minus.begin() + 1, sigma_minus.end())) {
    throw ValidationError("sigma_minus is not 0 followed by a permutation of 1..k");
  }
}

std::pair<std::size_t, std::size_t> walls(const std::vector<int>& sigma, std::size_t l) {
  const std::size_t k = sigma.size();
  if (l < 1 || l > k) throw ValidationError("wall index out of range");
  const int s = sigma[l - 1];
  std::size_t left = 0;
  for (std::size_t m = l - 1; m >= 1; --m) {
    if (sigma[m - 1] > s) {
      left = m;
      break;
    }
  }
  std::size_t right = k + 1;
  for (std::size_t m = l + 1; m <= k; ++m) {
    if (sigma[m - 1] > s) {
      right = m;
      break;
    }
  }
  return {left, right};
}

namespace {

/// Range argmin over a fixed array by sparse table.
class RangeMin {
 public:
  explicit RangeMin(const std::vector<int>& a) : a_(a) {
    const std::size_t n = a.size();
    table_.push_back(std::vector<std::size_t>(n));
    std::iota(table_[0].begin(), table_[0].end(), std::size_t{0});
    for (std::size_t span = 2; span <= n; span *= 2) {
      const auto& prev = table_.back();
      std::vector<std::size_t> next(n - span + 1);
      for (std::size_t i = 0; i + span <= n; ++i) next[i] = better(prev[i], prev[i + span / 2]);
      table_.push_back(std::move(next));
    }
  }

  /// Position of the minimum over [lo, hi), hi > lo.
  std::size_t argmin(std::size_t lo, std::size_t hi) const {
    std::size_t level = 0;
    while ((std::size_t{2} << level) <= hi - lo) ++level;
    return better(table_[level][lo], table_[level][hi - (std::size_t{1} << level)]);
  }

 private:
  std::size_t better(std::size_t i, std::size_t j) const { return a_[j] < a_[i] ? j : i; }

  const std::vector<int>& a_;
  std::vector<std::vector<std::size_t>> table_;
};

}  // namespace

std::vector<Coupling> couple(const RankPermutations& perms) {
  perms.validate();
  const std::size_t k = perms.k();
  const auto& sp = perms.sigma_plus;

  std::vector<std::size_t> left(k + 1, 0), right(k + 1, k + 1);
  std::vector<std::size_t> stack;
  for (std::size_t l = 1; l <= k; ++l) {
    while (!stack.empty() && sp[stack.back() - 1] < sp[l - 1]) {
      right[stack.back()] = l;
      stack.pop_back();
    }
    left[l] = stack.empty() ? 0 : stack.back();
    stack.push_back(l);
  }

  const RangeMin rmq(perms.sigma_minus);
  std::vector<Coupling> out;
  out.reserve(k);
  for (std::size_t l = 1; l <= k; ++l) {
    const std::size_t lo = rmq.argmin(left[l], l);
    const std::size_t hi = rmq.argmin(l, right[l]);
    const std::size_t m = perms.sigma_minus[lo] > perms.sigma_minus[hi] ? lo : hi;
    out.push_back({l, m, m >= l ? Chirality::F : Chirality::M});
  }
  return out;
}

long chirality_excess(const std::vector<Coupling>& couplings) {
  long excess = 0;
  for (const auto& c : couplings) excess += c.chirality == Chirality::F ? 1 : -1;
  return excess;
}

RankPermutations flip(const RankPermutations& perms, std::size_t l) {
  perms.validate();
  const auto [lm, lp] = walls(perms.sigma_plus, l);
  if (lm == 0) throw ValidationError("flip is defined for non-record indices only");
  RankPermutations out = perms;
  std::reverse(out.sigma_plus.begin() + static_cast<std::ptrdiff_t>(lm),
               out.sigma_plus.begin() + static_cast<std::ptrdiff_t>(lp - 1));
  std::reverse(out.sigma_minus.begin() + static_cast<std::ptrdiff_t>(lm),
               out.sigma_minus.begin() + static_cast<std::ptrdiff_t>(lp));
  return out;
}

RankPermutations random_rank_permutations(std::size_t k, Rng& rng) {
  RankPermutations p;
  p.sigma_plus.resize(k);
  std::iota(p.sigma_plus.begin(), p.sigma_plus.end(), 1);
  p.sigma_minus.resize(k + 1);
  std::iota(p.sigma_minus.begin(), p.sigma_minus.end(), 0);
  // Explicit Fisher-Yates: std::shuffle's draw sequence is library specific.
  auto shuffle = [&](auto first, std::size_t n) {
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
      std::swap(first[i - 1], first[std::min(j, i - 1)]);
    }
  };
  shuffle(p.sigma_plus.begin(), k);
  shuffle(p.sigma_minus.begin() + 1, k);
  return p;
}

TimeSeries rank_realization(const RankPermutations& perms, double b, double d) {
  perms.validate();
  if (!(b < d)) throw ValidationError("rank realization needs b < d");
  const std::size_t k = perms.k();
  const double kk = static_cast<double>(k);
  std::vector<double> v{b - 0.1 * (kk + 1.0)};
  for (std::size_t l = 1; l <= k; ++l) {
    v.push_back(d + perms.sigma_plus[l - 1]);
    v.push_back(b - 0.1 * (kk + 1.0 - perms.sigma_minus[l]));
  }
  v.push_back(d + kk + 1.0);
  return TimeSeries::from_values(std::move(v));
}

RankPermutations ranks_of(const TimeSeries& series, double b, double d) {
  const auto split = split_trajectory(series, b, d);
  auto ranks = [](const std::vector<double>& xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return xs[i] < xs[j]; });
    std::vector<int> r(xs.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) r[order[pos]] = static_cast<int>(pos + 1);
    return r;
  };
  RankPermutations p;
  p.sigma_plus = ranks(split.maxima);
  p.sigma_minus = {0};
  const auto rm = ranks(split.minima);
  p.sigma_minus.insert(p.sigma_minus.end(), rm.begin(), rm.end());
  return p;
}

// ---------------------------------------------------------------------------

namespace {

void require_n(const McOptions& opts) {
  if (opts.n < 2) throw ValidationError("Monte Carlo needs n >= 2");
}

StraddleHistogram histogram_of(const std::vector<std::size_t>& k) {
  StraddleHistogram h;
  std::vector<double> xs(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] >= h.counts.size()) h.counts.resize(k[i] + 1, 0);
    ++h.counts[k[i]];
    xs[i] = static_cast<double>(k[i]);
  }
  h.mean = mean_estimate(xs);
  return h;
}

}  // namespace

StraddleHistogram mc_straddle_distribution(double m, double b, double d, const McOptions& opts) {
  require_drift(m);
  require_levels(b, d);
  require_n(opts);
  const auto automaton = winding_automaton(b, d);
  const ChainSampler sampler(automaton, m);
  std::vector<std::size_t> k(opts.n);
  parallel_for(opts.n, opts.threads, [&](std::size_t i) {
    Rng rng(derive_seed(opts.seed, i));
    k[i] = sampler.counts(rng)[0];
  });
  return histogram_of(k);
}

StraddleHistogram mc_straddle_distribution_paths(double m, double b, double d, double dt,
                                                 const McOptions& opts) {
  require_drift(m);
  require_levels(b, d);
  require_n(opts);
  std::vector<std::size_t> k(opts.n);
  parallel_for(opts.n, opts.threads, [&](std::size_t i) {
    const auto path = sample_winding_path(m, dt, b, d, derive_seed(opts.seed, i));
    k[i] = count_windings(path.series(), b, d);
  });
  return histogram_of(k);
}

ExcessResult mc_chirality_excess(double m, double b, double d, const McOptions& opts) {
  require_drift(m);
  require_levels(b, d);
  require_n(opts);
  const auto automaton = winding_automaton(b, d);
  const ChainSampler sampler(automaton, m);
  std::vector<std::size_t> k(opts.n);
  std::vector<double> excess(opts.n);
  parallel_for(opts.n, opts.threads, [&](std::size_t i) {
    Rng rng(derive_seed(opts.seed, i));
    k[i] = sampler.counts(rng)[0];
    excess[i] = static_cast<double>(chirality_excess(couple(random_rank_permutations(k[i], rng))));
  });

  ExcessResult r;
  r.unconditional = mean_estimate(excess);
  std::map<std::size_t, std::vector<double>> by_k;
  for (std::size_t i = 0; i < opts.n; ++i) by_k[k[i]].push_back(excess[i]);
  for (const auto& [kk, xs] : by_k) r.conditional[kk] = mean_estimate(xs);
  return r;
}

Estimate mc_chirality_excess_paths(double m, double b, double d, double dt, const McOptions& opts) {
  require_drift(m);
  require_levels(b, d);
  require_n(opts);
  // Return to b from d + margin is rare enough to ignore at this margin.
  const double margin = 10.0 / m;
  std::vector<double> excess(opts.n);
  parallel_for(opts.n, opts.threads, [&](std::size_t i) {
    StopRule stop;
    stop.upper = d + margin;
    const auto path = sample_path(m, dt, stop, derive_seed(opts.seed, i));
    const auto diagram = compute_ph0(augment(path.series()));
    long e = 0;
    for (const auto& bar : diagram.bars) {
      if (bar.birth <= b && bar.death >= d) e += bar.chirality == Chirality::F ? 1 : -1;
    }
    excess[i] = static_cast<double>(e);
  });
  return mean_estimate(excess);
}

Estimate mc_winding_covariance(double m, const theory::IntervalPair& iv, const McOptions& opts) {
  require_drift(m);
  require_n(opts);
  const auto automaton = two_interval_automaton(iv.b1, iv.d1, iv.b2, iv.d2);
  const ChainSampler sampler(automaton, m);
  const auto& vars = sampler.variables();
  const std::size_t ix = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), "x") - vars.begin());
  const std::size_t iy = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), "y") - vars.begin());
  std::vector<double> xs(opts.n), ys(opts.n);
  parallel_for(opts.n, opts.threads, [&](std::size_t i) {
    Rng rng(derive_seed(opts.seed, i));
    const auto c = sampler.counts(rng);
    xs[i] = static_cast<double>(c[ix]);
    ys[i] = static_cast<double>(c[iy]);
  });
  return covariance_estimate(xs, ys);
}

std::vector<IntensityBin> mc_intensity(double m, double b, double h, const std::vector<double>& deltas,
                                       const McOptions& opts) {
  require_drift(m);
  require_n(opts);
  if (!(b > 0.0) || !(h > 0.0)) throw ValidationError("intensity grid needs b > 0 and h > 0");
  if (deltas.empty()) throw ValidationError("no bins requested");

  // Grid b, b+h, b+2h, ...; every bin corner must be a grid level.
  std::vector<std::size_t> dj;
  std::size_t top = 1;
  for (double delta : deltas) {
    const double steps = delta / h;
    const auto j = static_cast<std::size_t>(std::llround(steps));
    if (!(delta > h) || std::abs(steps - static_cast<double>(j)) > 1e-9 * std::max(1.0, steps)) {
      throw ValidationError("each delta must be a multiple of h larger than h");
    }
    dj.push_back(j);
    top = std::max(top, j + 1);
  }
  std::vector<double> grid(top + 1);
  for (std::size_t i = 0; i <= top; ++i) grid[i] = b + static_cast<double>(i) * h;

  // Quadrant contents needed: (b', d') for b' in {0, 1} and d' in {j, j + 1}.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t j : dj) {
    for (std::size_t bi : {0, 1}) {
      for (std::size_t di : {j, j + 1}) pairs.emplace_back(bi, di);
    }
  }
  std::vector<std::vector<std::size_t>> pairs_at(grid.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    pairs_at[pairs[p].first].push_back(p);
    pairs_at[pairs[p].second].push_back(p);
  }

  std::vector<std::vector<double>> box(deltas.size(), std::vector<double>(opts.n));
  parallel_for(opts.n, opts.threads, [&](std::size_t i) {
    Rng rng(derive_seed(opts.seed, i));
    std::vector<char> seeking_d(pairs.size(), 1);
    std::vector<long> windings(pairs.size(), 0);
    skeleton_walk(grid, m, rng, [&](std::size_t level) {
      for (std::size_t p : pairs_at[level]) {
        if (seeking_d[p] && level == pairs[p].second) {
          seeking_d[p] = 0;
        } else if (!seeking_d[p] && level == pairs[p].first) {
          seeking_d[p] = 1;
          ++windings[p];
        }
      }
    });
    for (std::size_t j = 0; j < deltas.size(); ++j) {
      // pairs 4j.. hold (b,d), (b,d+h), (b+h,d), (b+h,d+h)
      const long* w = &windings[4 * j];
      box[j][i] = static_cast<double>(w[2] - w[0] - w[3] + w[1]);
    }
  });

  auto q = [m](double lo, double hi) { return theory::expected_quadrant_content(m, hi - lo); };
  std::vector<IntensityBin> bins;
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    IntensityBin bin;
    bin.b_lo = grid[0];
    bin.b_hi = grid[1];
    bin.d_lo = grid[dj[j]];
    bin.d_hi = grid[dj[j] + 1];
    bin.count = mean_estimate(box[j]);
    bin.theory = q(bin.b_hi, bin.d_lo) - q(bin.b_lo, bin.d_lo) - q(bin.b_hi, bin.d_hi) +
                 q(bin.b_lo, bin.d_hi);
    bins.push_back(bin);
  }
  return bins;
}

}  // namespace tsph
