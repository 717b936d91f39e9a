#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsph/series.hpp"

namespace tsph {

struct AutomatonState {
  std::string name;
  double level = 0.0;
  bool flag = false;  // passages through flagged states count pattern occurrences

  friend bool operator==(const AutomatonState&, const AutomatonState&) = default;
};

struct Transition {
  std::size_t from = 0;
  std::size_t to = 0;
  std::optional<std::string> var;  // formal variable marking the edge

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Finite automaton whose states carry real levels. Every non-absorbing
/// state has exactly one transition to a higher level and at most one to a
/// lower level; the start state has no incoming transitions and absorbing
/// states no outgoing ones.
class LevelAutomaton {
 public:
  /// Validates every structural invariant; throws ValidationError.
  LevelAutomaton(std::vector<AutomatonState> states, std::size_t start,
                 std::vector<std::size_t> absorbing, std::vector<Transition> transitions);

  const std::vector<AutomatonState>& states() const { return states_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const AutomatonState& state(std::size_t i) const { return states_.at(i); }
  std::size_t start() const { return start_; }
  const std::vector<std::size_t>& absorbing() const { return absorbing_; }
  bool is_absorbing(std::size_t i) const { return absorbing_flag_.at(i); }

  /// Transition indices leaving a state, if any.
  std::optional<std::size_t> up(std::size_t state) const { return up_.at(state); }
  std::optional<std::size_t> down(std::size_t state) const { return down_.at(state); }

  /// Smallest interval holding the levels of the non-start, non-absorbing states.
  std::pair<double, double> span() const { return span_; }

  std::size_t index_of(std::string_view name) const;
  std::optional<std::size_t> find_transition(std::size_t from, std::size_t to) const;
  std::vector<std::string> variables() const;

  /// The same automaton with every level moved by `offset`.
  LevelAutomaton shifted(double offset) const;

  friend bool operator==(const LevelAutomaton& a, const LevelAutomaton& b) {
    return a.states_ == b.states_ && a.start_ == b.start_ && a.absorbing_ == b.absorbing_ &&
           a.transitions_ == b.transitions_;
  }

 private:
  std::vector<AutomatonState> states_;
  std::size_t start_;
  std::vector<std::size_t> absorbing_;
  std::vector<Transition> transitions_;
  std::vector<bool> absorbing_flag_;
  std::vector<std::optional<std::size_t>> up_;
  std::vector<std::optional<std::size_t>> down_;
  std::pair<double, double> span_;
};

/// State sequence of a function through an automaton, with the transitions
/// taken between consecutive states.
struct SymbolicTrajectory {
  std::vector<std::size_t> states;
  std::vector<std::size_t> transitions;
  std::map<std::string, std::size_t> variable_counts;

  std::size_t count(std::string_view var) const;
  std::size_t traversals(std::size_t transition) const;
  std::string to_string(const LevelAutomaton& automaton) const;
};

/// First-hitting semantics: from a state the automaton moves to whichever
/// neighbouring level the function reaches first. Up-transitions into
/// absorbing states fire when the series ends. Throws CrossingError unless
/// the series starts below the span and ends above it.
SymbolicTrajectory run_automaton(const LevelAutomaton& automaton, const TimeSeries& series);

/// States alpha(b-1), beta(b), delta(d), omega(d+1); delta->beta carries x.
LevelAutomaton winding_automaton(double b, double d);

/// Automaton counting windings around two non-nested intervals: x marks
/// delta1->beta1 and beta2->beta1, y marks delta2->beta2.
LevelAutomaton two_interval_automaton(double b1, double d1, double b2, double d2);

/// Head-and-shoulders with neckline n < shoulder s < head h. The flagged
/// state "found" is entered once per completed pattern: rise through s,
/// back to n, rise through h, back to n, rise through s, back to n.
LevelAutomaton head_and_shoulders_automaton(double neckline, double shoulder, double head);

/// Values of F_{start, s} = sum over paths start->s of weight * z^length.
struct PathWeightSeries {
  std::vector<double> values;  // per state
  double spectral_radius = 0.0;

  double at(const LevelAutomaton& automaton, std::string_view state) const;
};

/// Solves F = e_start + W^T F, where W holds probability times the values
/// of the edge variables times z. Throws DivergenceError when the spectral
/// radius of W is not below one.
PathWeightSeries solve_path_weights(const LevelAutomaton& automaton,
                                    const std::vector<double>& probabilities,
                                    const std::map<std::string, double>& variables,
                                    double z = 1.0);

/// Transition probabilities of the symbolic chain of Brownian motion with
/// drift m > 0; absorbing up-targets sit at +infinity.
std::vector<double> brownian_probabilities(const LevelAutomaton& automaton, double m);

LevelAutomaton pattern_automaton_from_file(const std::filesystem::path& path);

/// Passages through `flagged` in the trajectory of the series.
std::size_t count_pattern(const LevelAutomaton& automaton, std::size_t flagged,
                          const TimeSeries& series);

}  // namespace tsph
