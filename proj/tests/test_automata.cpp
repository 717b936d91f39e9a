#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "tsph/automata.hpp"
#include "tsph/error.hpp"
#include "tsph/io.hpp"
#include "tsph/theory.hpp"

using namespace tsph;

#ifndef TSPH_DATA_DIR
#define TSPH_DATA_DIR "data"
#endif

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::size_t count_transition(const LevelAutomaton& a, const SymbolicTrajectory& t, const char* from,
                             const char* to) {
  return t.traversals(*a.find_transition(a.index_of(from), a.index_of(to)));
}

/// Values of the path-weight series at the absorbing state with Brownian
/// probabilities and the given variables.
double absorbed(const LevelAutomaton& a, double m, std::map<std::string, double> vars) {
  const auto f = solve_path_weights(a, brownian_probabilities(a, m), vars);
  return f.values.at(a.absorbing().front());
}

}  // namespace

TEST_SUITE("automata") {
  TEST_CASE("winding automaton structure") {
    const auto a = winding_automaton(1, 2);
    CHECK(a.states().size() == 4);
    CHECK(a.span() == std::pair<double, double>{1, 2});
    CHECK(a.state(a.index_of("α")).level == 0);
    CHECK(a.state(a.index_of("ω")).level == 3);
    const auto t = a.transitions()[*a.down(a.index_of("δ"))];
    CHECK(t.var == std::optional<std::string>("x"));
    CHECK(a.variables() == std::vector<std::string>{"x"});
    CHECK_THROWS_AS(winding_automaton(2, 1), ValidationError);
  }

  TEST_CASE("trajectories") {
    const auto a = winding_automaton(1, 2);
    const auto fig3 = run_automaton(a, TimeSeries::from_values({0, 2.5, 0.5, 2.7, 0.8, 3}));
    CHECK(fig3.to_string(a) == "α δ β δ β δ ω");
    CHECK(fig3.count("x") == 2);
    CHECK(count_transition(a, fig3, "δ", "β") == 2);

    CHECK(run_automaton(a, TimeSeries::from_values({0, 1, 2, 3})).to_string(a) == "α δ ω");
    const auto saw = run_automaton(a, TimeSeries::from_values({0, 3, 0.5, 3.5}));
    CHECK(count_transition(a, saw, "δ", "β") == 1);

    CHECK_THROWS_AS(run_automaton(a, TimeSeries::from_values({1.5, 3})), CrossingError);
    CHECK_THROWS_AS(run_automaton(a, TimeSeries::from_values({0, 1.5})), CrossingError);

    // Deterministic and consistent with the declared transitions.
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
      const auto s = oracle::random_series(30, rng);
      const auto b = winding_automaton(0.3, 0.6);
      const auto t1 = run_automaton(b, s);
      const auto t2 = run_automaton(b, s);
      CHECK(t1.states == t2.states);
      REQUIRE(t1.transitions.size() + 1 == t1.states.size());
      for (std::size_t k = 0; k < t1.transitions.size(); ++k) {
        CHECK(b.transitions()[t1.transitions[k]].from == t1.states[k]);
        CHECK(b.transitions()[t1.transitions[k]].to == t1.states[k + 1]);
      }
      CHECK(t1.states.front() == b.start());
      CHECK(b.is_absorbing(t1.states.back()));
    }
  }

  TEST_CASE("x-count equals windings on permutation series") {
    for (std::size_t n = 1; n <= 7; ++n) {
      for (const auto& p : oracle::permutations(n)) {
        const auto s = augment(TimeSeries::from_values(p));
        const auto diagram = compute_ph0(s);
        for (std::size_t i = 1; i < n; ++i) {
          for (std::size_t j = i + 1; j < n; ++j) {
            const double b = i + 0.5, d = j + 0.5;
            const auto w = count_windings(s, b, d);
            REQUIRE(run_automaton(winding_automaton(b, d), s).count("x") == w);
            REQUIRE(quadrant_content(diagram, b, d, false) == w);
          }
        }
      }
    }
  }

  TEST_CASE("x-count equals windings on random series") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::size_t> len(1, 60);
    for (int trial = 0; trial < 10000; ++trial) {
      const auto s = oracle::random_series(len(rng), rng);
      std::uniform_real_distribution<double> level(s.values().front(), s.values().back());
      double b = level(rng), d = level(rng);
      if (b > d) std::swap(b, d);
      if (b == d) continue;
      REQUIRE(run_automaton(winding_automaton(b, d), s).count("x") == count_windings(s, b, d));
    }
  }

  TEST_CASE("two-interval counts") {
    CHECK_THROWS_AS(two_interval_automaton(1, 3, 1.5, 2.5), ValidationError);
    const auto a = two_interval_automaton(1, 2, 1.5, 2.5);
    CHECK(a.span() == std::pair<double, double>{1, 2.5});
    CHECK(a.variables() == std::vector<std::string>{"x", "y"});

    // Up through both intervals with a dip below b1 only between d1 and d2.
    const auto t = run_automaton(a, TimeSeries::from_values({0, 2.2, 0.5, 3}));
    CHECK(t.count("x") == 1);
    CHECK(t.count("y") == 0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<std::size_t> len(1, 60);
    int done = 0;
    while (done < 1000) {
      const auto s = oracle::random_series(len(rng), rng);
      std::uniform_real_distribution<double> level(s.values().front(), s.values().back());
      double v[4];
      for (double& x : v) x = level(rng);
      std::sort(v, v + 4);
      // Random non-nested order: b1 < b2 < d1 < d2 or b1 < d1 < b2 < d2.
      const bool overlap = u(rng) < 0.5;
      const double b1 = v[0], d1 = overlap ? v[2] : v[1], b2 = overlap ? v[1] : v[2], d2 = v[3];
      const auto tr = run_automaton(two_interval_automaton(b1, d1, b2, d2), s);
      REQUIRE(tr.count("x") == count_windings(s, b1, d1));
      REQUIRE(tr.count("y") == count_windings(s, b2, d2));
      ++done;
    }
  }

  TEST_CASE("path weights of the winding automaton") {
    for (double m : {0.5, 1.0, 2.0}) {
      for (double delta : {0.2, 0.5, 1.0}) {
        const auto a = winding_automaton(1, 1 + delta);
        const double p = theory::geometric_parameter(m, delta);
        for (double x : {0.0, 0.5, 1.0, 1.3}) {
          if (x * (1 - p) >= 1) continue;
          CHECK(rel(absorbed(a, m, {{"x", x}}), p / (1 - (1 - p) * x)) < 1e-12);
        }
        const double h = 1e-6;
        const double mean = (absorbed(a, m, {{"x", 1 + h}}) - absorbed(a, m, {{"x", 1 - h}})) / (2 * h);
        CHECK(rel(mean, theory::expected_quadrant_content(m, delta)) < 1e-6);
      }
    }
    const auto a = winding_automaton(1, 1.5);
    CHECK_THROWS_AS(absorbed(a, 1, {{"x", 1 / (1 - theory::geometric_parameter(1, 0.5))}}), DivergenceError);
    CHECK_THROWS_AS(absorbed(a, 1, {}), ValidationError);
  }

  TEST_CASE("path weights of the two-interval automaton") {
    const theory::IntervalPair iv{1, 2, 1.5, 2.5};
    const auto a = two_interval_automaton(iv.b1, iv.d1, iv.b2, iv.d2);
    for (double m : {0.7, 1.0, 1.8}) {
      CHECK(std::abs(absorbed(a, m, {{"x", 1}, {"y", 1}}) - 1) < 1e-12);
      for (double x : {0.0, 0.5, 1.1}) {
        for (double y : {-0.3, 0.5, 1.0}) {
          CHECK(rel(absorbed(a, m, {{"x", x}, {"y", y}}), theory::two_interval_gf(m, iv, x, y)) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("level shifts leave Brownian path weights unchanged") {
    const auto a = two_interval_automaton(0.4, 1.1, 0.9, 1.6);
    const std::map<std::string, double> vars{{"x", 0.6}, {"y", 0.9}};
    const auto base = solve_path_weights(a, brownian_probabilities(a, 1.3), vars).values;
    for (double c : {0.05, 1.0, 10.0}) {
      const auto s = a.shifted(c);
      const auto moved = solve_path_weights(s, brownian_probabilities(s, 1.3), vars).values;
      for (std::size_t i = 0; i < base.size(); ++i) CHECK(std::abs(moved[i] - base[i]) < 1e-12);
    }
  }

  TEST_CASE("validation") {
    // Two down transitions from one state.
    CHECK_THROWS_AS(LevelAutomaton({{"a", 0}, {"b", 1}, {"c", 0.5}, {"d", 0.2}, {"z", 2}}, 0, {4},
                                   {{0, 1, {}}, {1, 2, {}}, {1, 3, {}}, {1, 4, {}}, {2, 1, {}}, {3, 1, {}}}),
                    ValidationError);
    // Missing up transition.
    CHECK_THROWS_AS(LevelAutomaton({{"a", 0}, {"b", 1}, {"z", 2}}, 0, {2}, {{0, 1, {}}}), ValidationError);
    // Transition into the start state.
    CHECK_THROWS_AS(LevelAutomaton({{"a", 0}, {"b", 1}, {"z", 2}}, 0, {2}, {{0, 1, {}}, {1, 2, {}}, {1, 0, {}}}),
                    ValidationError);
    // Equal levels.
    CHECK_THROWS_AS(LevelAutomaton({{"a", 0}, {"b", 0}, {"z", 2}}, 0, {2}, {{0, 1, {}}, {1, 2, {}}}),
                    ValidationError);
    // Duplicate names, no absorbing state.
    CHECK_THROWS_AS(LevelAutomaton({{"a", 0}, {"a", 1}, {"z", 2}}, 0, {2}, {{0, 1, {}}, {1, 2, {}}}),
                    ValidationError);
    CHECK_THROWS_AS(LevelAutomaton({{"a", 0}, {"b", 1}}, 0, {}, {{0, 1, {}}}), ValidationError);
  }

  TEST_CASE("json round trip") {
    for (const auto& a : {winding_automaton(1, 2), two_interval_automaton(1, 2, 1.5, 2.5),
                          head_and_shoulders_automaton(1, 2, 3)}) {
      CHECK(automaton_from_json(parse_json(automaton_to_json(a).dump())) == a);
    }
    const auto path = std::filesystem::temp_directory_path() / "tsph_winding.json";
    std::ofstream(path) << automaton_to_json(winding_automaton(1, 2)).dump(2);
    CHECK(pattern_automaton_from_file(path) == winding_automaton(1, 2));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(automaton_from_json(parse_json(R"({"states": []})")), ValidationError);
    CHECK_THROWS_AS(parse_json("{"), ParseError);
  }

  TEST_CASE("head-and-shoulders") {
    const auto shipped = pattern_automaton_from_file(std::filesystem::path(TSPH_DATA_DIR) / "hs_pattern.json");
    std::size_t flagged = 0;
    for (const auto& s : shipped.states()) flagged += s.flag;
    CHECK(flagged == 1);
    CHECK(shipped == head_and_shoulders_automaton(1, 2, 3));

    const auto a = head_and_shoulders_automaton(1, 2, 3);
    const auto found = a.index_of("found");
    const std::vector<double> one{0, 2.5, 0.5, 3.5, 0.5, 2.5, 0.5, 4};
    CHECK(count_pattern(a, found, TimeSeries::from_values(one)) == 1);
    CHECK(count_pattern(a, found, TimeSeries::from_values({0, 4})) == 0);
    const std::vector<double> two{0, 2.5, 0.5, 3.5, 0.5, 2.5, 0.5, 2.5, 0.5, 3.5, 0.5, 2.5, 0.5, 4};
    CHECK(count_pattern(a, found, TimeSeries::from_values(two)) == 2);
    // Head missing: shoulder, dip, shoulder, dip.
    CHECK(count_pattern(a, found, TimeSeries::from_values({0, 2.5, 0.5, 2.5, 0.5, 4})) == 0);
    // Left shoulder that keeps rising into a head is not a shoulder.
    CHECK(count_pattern(a, found, TimeSeries::from_values({0, 3.5, 0.5, 3.5, 0.5, 2.5, 0.5, 4})) == 0);
    CHECK_THROWS_AS(head_and_shoulders_automaton(1, 3, 2), ValidationError);
    CHECK_THROWS_AS(count_pattern(a, found, TimeSeries::from_values({2, 4})), CrossingError);
  }
}
