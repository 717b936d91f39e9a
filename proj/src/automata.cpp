#include "tsph/automata.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "tsph/error.hpp"
#include "tsph/io.hpp"
#include "tsph/theory.hpp"

namespace tsph {

LevelAutomaton::LevelAutomaton(std::vector<AutomatonState> states, std::size_t start,
                               std::vector<std::size_t> absorbing,
                               std::vector<Transition> transitions)
    : states_(std::move(states)),
      start_(start),
      absorbing_(std::move(absorbing)),
      transitions_(std::move(transitions)) {
  const std::size_t n = states_.size();
  if (n == 0) throw ValidationError("automaton has no states");
  std::set<std::string> names;
  for (const auto& s : states_) {
    if (s.name.empty()) throw ValidationError("state names must be non-empty");
    if (!names.insert(s.name).second) throw ValidationError("duplicate state name '" + s.name + "'");
    if (!std::isfinite(s.level)) throw ValidationError("state '" + s.name + "' has a non-finite level");
  }
  if (start_ >= n) throw ValidationError("start state out of range");
  if (absorbing_.empty()) throw ValidationError("automaton needs an absorbing state");
  absorbing_flag_.assign(n, false);
  for (std::size_t a : absorbing_) {
    if (a >= n) throw ValidationError("absorbing state out of range");
    if (a == start_) throw ValidationError("start state cannot be absorbing");
    absorbing_flag_[a] = true;
  }

  up_.assign(n, std::nullopt);
  down_.assign(n, std::nullopt);
  std::vector<int> incoming(n, 0);
  for (std::size_t t = 0; t < transitions_.size(); ++t) {
    const auto& tr = transitions_[t];
    if (tr.from >= n || tr.to >= n) throw ValidationError("transition endpoint out of range");
    const auto& from = states_[tr.from];
    const auto& to = states_[tr.to];
    const std::string label = from.name + "->" + to.name;
    if (absorbing_flag_[tr.from]) throw ValidationError("absorbing state has an outgoing transition " + label);
    if (tr.to == start_) throw ValidationError("start state has an incoming transition " + label);
    if (tr.var && tr.var->empty()) throw ValidationError("empty variable name on " + label);
    if (to.level > from.level) {
      if (up_[tr.from]) throw ValidationError("state '" + from.name + "' has two up-transitions");
      up_[tr.from] = t;
    } else if (to.level < from.level) {
      if (down_[tr.from]) throw ValidationError("state '" + from.name + "' has two down-transitions");
      down_[tr.from] = t;
    } else {
      throw ValidationError("transition " + label + " joins equal levels");
    }
    ++incoming[tr.to];
  }

  bool have_span = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (absorbing_flag_[i]) continue;
    if (!up_[i]) throw ValidationError("state '" + states_[i].name + "' has no up-transition");
    if (i == start_) continue;
    if (incoming[i] == 0) throw ValidationError("state '" + states_[i].name + "' is unreachable");
    const double level = states_[i].level;
    if (!have_span) {
      span_ = {level, level};
      have_span = true;
    } else {
      span_.first = std::min(span_.first, level);
      span_.second = std::max(span_.second, level);
    }
  }
  if (!have_span) throw ValidationError("automaton has no finite states");
}

std::size_t LevelAutomaton::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (states_[i].name == name) return i;
  }
  throw ValidationError("unknown state '" + std::string(name) + "'");
}

std::optional<std::size_t> LevelAutomaton::find_transition(std::size_t from, std::size_t to) const {
  for (std::size_t t = 0; t < transitions_.size(); ++t) {
    if (transitions_[t].from == from && transitions_[t].to == to) return t;
  }
  return std::nullopt;
}

std::vector<std::string> LevelAutomaton::variables() const {
  std::set<std::string> vars;
  for (const auto& t : transitions_) {
    if (t.var) vars.insert(*t.var);
  }
  return {vars.begin(), vars.end()};
}

LevelAutomaton LevelAutomaton::shifted(double offset) const {
  auto states = states_;
  for (auto& s : states) s.level += offset;
  return LevelAutomaton(std::move(states), start_, absorbing_, transitions_);
}

std::size_t SymbolicTrajectory::count(std::string_view var) const {
  const auto it = variable_counts.find(std::string(var));
  return it == variable_counts.end() ? 0 : it->second;
}

std::size_t SymbolicTrajectory::traversals(std::size_t transition) const {
  return static_cast<std::size_t>(std::count(transitions.begin(), transitions.end(), transition));
}

std::string SymbolicTrajectory::to_string(const LevelAutomaton& automaton) const {
  std::string out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i > 0) out += ' ';
    out += automaton.state(states[i]).name;
  }
  return out;
}

SymbolicTrajectory run_automaton(const LevelAutomaton& automaton, const TimeSeries& series) {
  const auto [lo, hi] = automaton.span();
  if (series.empty() || !(series.values().front() < lo) || !(series.values().back() > hi)) {
    throw CrossingError("series must start below and end above the automaton span");
  }

  SymbolicTrajectory traj;
  std::size_t state = automaton.start();
  traj.states.push_back(state);
  auto take = [&](std::size_t t) {
    const auto& tr = automaton.transitions()[t];
    state = tr.to;
    traj.states.push_back(state);
    traj.transitions.push_back(t);
    if (tr.var) ++traj.variable_counts[*tr.var];
  };

  const auto& v = series.values();
  for (std::size_t i = 1; i < v.size() && !automaton.is_absorbing(state); ++i) {
    // The rest of segment i runs monotonically from the current level to v[i].
    for (std::size_t guard = 0; guard <= automaton.states().size(); ++guard) {
      const auto up = automaton.up(state);
      const auto down = automaton.down(state);
      if (up) {
        const std::size_t target = automaton.transitions()[*up].to;
        if (!automaton.is_absorbing(target) && v[i] >= automaton.state(target).level) {
          take(*up);
          continue;
        }
      }
      if (down && v[i] <= automaton.state(automaton.transitions()[*down].to).level) {
        take(*down);
        if (automaton.is_absorbing(state)) break;
        continue;
      }
      break;
    }
  }
  if (!automaton.is_absorbing(state)) {
    const auto up = automaton.up(state);
    if (!up || !automaton.is_absorbing(automaton.transitions()[*up].to)) {
      throw std::logic_error("series ended above the span in a state without an absorbing exit");
    }
    take(*up);
  }
  return traj;
}

LevelAutomaton winding_automaton(double b, double d) {
  if (!(b < d)) throw ValidationError("winding automaton needs b < d");
  return LevelAutomaton({{"α", b - 1.0}, {"β", b}, {"δ", d}, {"ω", d + 1.0}}, 0, {3},
                        {{0, 2, std::nullopt}, {2, 1, "x"}, {2, 3, std::nullopt}, {1, 2, std::nullopt}});
}

LevelAutomaton two_interval_automaton(double b1, double d1, double b2, double d2) {
  theory::IntervalPair{b1, d1, b2, d2}.validate();
  enum { kAlpha, kDelta1, kBeta1, kDelta2, kBeta2, kOmega };
  return LevelAutomaton({{"α", b1 - 1.0},
                         {"δ1", d1},
                         {"β1", b1},
                         {"δ2", d2},
                         {"β2", b2},
                         {"ω", d2 + 1.0}},
                        kAlpha, {kOmega},
                        {{kAlpha, kDelta1, std::nullopt},
                         {kBeta1, kDelta1, std::nullopt},
                         {kDelta1, kBeta1, "x"},
                         {kDelta1, kDelta2, std::nullopt},
                         {kBeta2, kBeta1, "x"},
                         {kBeta2, kDelta2, std::nullopt},
                         {kDelta2, kBeta2, "y"},
                         {kDelta2, kOmega, std::nullopt}});
}

LevelAutomaton head_and_shoulders_automaton(double neckline, double shoulder, double head) {
  if (!(neckline < shoulder && shoulder < head)) {
    throw ValidationError("head-and-shoulders needs neckline < shoulder < head");
  }
  enum { kStart, kReady, kLeft, kFailed, kAfterLeft, kHead, kAfterHead, kRight, kFound, kEnd };
  return LevelAutomaton({{"start", neckline - 1.0},
                         {"ready", neckline},
                         {"left_shoulder", shoulder},
                         {"no_left_shoulder", head},
                         {"neck_1", neckline},
                         {"head", head},
                         {"neck_2", neckline},
                         {"right_shoulder", shoulder},
                         {"found", neckline, true},
                         {"end", head + 1.0}},
                        kStart, {kEnd},
                        {{kStart, kReady, std::nullopt},
                         {kReady, kLeft, std::nullopt},
                         {kLeft, kFailed, std::nullopt},
                         {kLeft, kAfterLeft, std::nullopt},
                         {kFailed, kEnd, std::nullopt},
                         {kFailed, kReady, std::nullopt},
                         {kAfterLeft, kHead, std::nullopt},
                         {kHead, kEnd, std::nullopt},
                         {kHead, kAfterHead, std::nullopt},
                         {kAfterHead, kRight, std::nullopt},
                         {kRight, kHead, std::nullopt},
                         {kRight, kFound, std::nullopt},
                         {kFound, kLeft, std::nullopt}});
}

double PathWeightSeries::at(const LevelAutomaton& automaton, std::string_view state) const {
  return values.at(automaton.index_of(state));
}

PathWeightSeries solve_path_weights(const LevelAutomaton& automaton,
                                    const std::vector<double>& probabilities,
                                    const std::map<std::string, double>& variables, double z) {
  const auto& transitions = automaton.transitions();
  if (probabilities.size() != transitions.size()) {
    throw ValidationError("one probability per transition is required");
  }
  const auto n = static_cast<Eigen::Index>(automaton.states().size());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t t = 0; t < transitions.size(); ++t) {
    const auto& tr = transitions[t];
    if (!(probabilities[t] >= 0.0)) throw ValidationError("transition weights must be non-negative");
    double weight = probabilities[t] * z;
    if (tr.var) {
      const auto it = variables.find(*tr.var);
      if (it == variables.end()) throw ValidationError("no value for variable '" + *tr.var + "'");
      weight *= it->second;
    }
    w(static_cast<Eigen::Index>(tr.from), static_cast<Eigen::Index>(tr.to)) += weight;
  }

  PathWeightSeries out;
  out.spectral_radius = w.eigenvalues().cwiseAbs().maxCoeff();
  if (!(out.spectral_radius < 1.0 - 1e-12)) {
    throw DivergenceError("path-weight series diverges: spectral radius " +
                          std::to_string(out.spectral_radius));
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(static_cast<Eigen::Index>(automaton.start())) = 1.0;
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - w.transpose();
  const Eigen::VectorXd f = system.fullPivLu().solve(rhs);
  out.values.assign(f.data(), f.data() + f.size());
  return out;
}

std::vector<double> brownian_probabilities(const LevelAutomaton& automaton, double m) {
  if (!(m > 0.0)) throw ValidationError("Brownian weights need drift m > 0");
  std::vector<double> prob(automaton.transitions().size(), 0.0);
  for (std::size_t s = 0; s < automaton.states().size(); ++s) {
    if (automaton.is_absorbing(s)) continue;
    const std::size_t up = *automaton.up(s);
    const auto down = automaton.down(s);
    if (!down) {
      prob[up] = 1.0;
      continue;
    }
    const double level = automaton.state(s).level;
    const std::size_t up_target = automaton.transitions()[up].to;
    const double dl = level - automaton.state(automaton.transitions()[*down].to).level;
    const double dr = automaton.is_absorbing(up_target)
                          ? INFINITY
                          : automaton.state(up_target).level - level;
    const auto exit = theory::exit_probabilities(m, dl, dr);
    prob[up] = exit.up;
    prob[*down] = exit.down;
  }
  return prob;
}

LevelAutomaton pattern_automaton_from_file(const std::filesystem::path& path) {
  return automaton_from_json(read_json_file(path));
}

std::size_t count_pattern(const LevelAutomaton& automaton, std::size_t flagged,
                          const TimeSeries& series) {
  if (flagged >= automaton.states().size()) throw ValidationError("flagged state out of range");
  const auto traj = run_automaton(automaton, series);
  return static_cast<std::size_t>(std::count(traj.states.begin(), traj.states.end(), flagged));
}

}  // namespace tsph
