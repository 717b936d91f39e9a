#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "tsph/automata.hpp"
#include "tsph/brownian.hpp"
#include "tsph/error.hpp"
#include "tsph/io.hpp"
#include "tsph/ph0.hpp"
#include "tsph/theory.hpp"
#include "tsph/tree_codec.hpp"

namespace {

using tsph::Json;

std::string read_input(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path);
  if (!in) throw tsph::ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// CSV, or the JSON series schema when the text starts with '{'.
tsph::TimeSeries parse_series(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return tsph::series_from_json(tsph::parse_json(text));
  return tsph::parse_csv(text);
}

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

/// Loads a series, breaks ties if asked, and augments unless it already is.
tsph::TimeSeries prepared_series(const std::string& path, double epsilon) {
  auto series = parse_series(read_input(path));
  if (epsilon > 0.0) series = tsph::make_generic(series, epsilon);
  if (!tsph::is_augmented(series)) series = tsph::augment(series);
  return series;
}

Json estimate_json(const tsph::Estimate& e) {
  return Json{{"estimate", e.estimate}, {"std_error", e.std_error}, {"n", e.n}};
}

struct SimulateArgs {
  double m = 1.0;
  std::vector<double> interval;
  double delta = 0.0;
  std::vector<double> intervals;
  std::size_t n = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string format = "json";
  double h = 0.05;
  std::vector<double> deltas;
  double dt = 0.0;

  std::pair<double, double> levels() const {
    if (!interval.empty()) return {interval[0], interval[1]};
    if (delta > 0.0) return {1.0, 1.0 + delta};
    throw tsph::ValidationError("give --interval b d or --delta");
  }
  tsph::McOptions options() const { return {n, seed, threads}; }
};

int run(int argc, char** argv) {
  CLI::App app{"Persistence diagrams, merge trees and level automata for time series"};
  app.require_subcommand(1);
  std::string format = "json";

  // bars
  auto* bars = app.add_subcommand("bars", "0-dimensional persistence diagram of a series");
  std::string bars_in;
  std::vector<double> quadrant;
  bool include_stem = false;
  double epsilon = 0.0;
  bars->add_option("input", bars_in, "series CSV, or - for stdin")->required();
  bars->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  bars->add_option("--quadrant", quadrant, "count bars with birth <= b and death >= d")->expected(2);
  bars->add_flag("--include-stem", include_stem);
  bars->add_option("--epsilon", epsilon, "break ties among extreme values by this much");

  // tree / reconstruct / contour
  auto* tree = app.add_subcommand("tree", "plane merge tree of a series");
  std::string tree_in;
  tree->add_option("input", tree_in)->required();
  tree->add_option("--epsilon", epsilon);
  auto* reconstruct = app.add_subcommand("reconstruct", "plane merge tree of a stem pile");
  std::string pile_in;
  reconstruct->add_option("input", pile_in, "diagram JSON, or -")->required();
  auto* contour = app.add_subcommand("contour", "contour walk of a plane merge tree");
  std::string contour_in;
  contour->add_option("input", contour_in, "tree JSON, or -")->required();
  contour->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  // windings
  auto* windings = app.add_subcommand("windings", "windings of a series around an interval");
  std::string windings_in;
  std::vector<double> interval;
  windings->add_option("input", windings_in)->required();
  windings->add_option("--interval", interval)->expected(2)->required();

  // automaton
  auto* automaton = app.add_subcommand("automaton", "level automata");
  automaton->require_subcommand(1);
  auto* run_cmd = automaton->add_subcommand("run", "symbolic trajectory of a series");
  std::string spec_in, run_in;
  run_cmd->add_option("spec", spec_in, "automaton JSON")->required();
  run_cmd->add_option("input", run_in, "series CSV")->required();
  auto* winding_cmd = automaton->add_subcommand("winding", "print the winding automaton");
  winding_cmd->add_option("--interval", interval)->expected(2)->required();
  auto* pair_cmd = automaton->add_subcommand("two-interval", "print the two-interval automaton");
  std::vector<double> intervals;
  pair_cmd->add_option("--intervals", intervals, "b1 d1 b2 d2")->expected(4)->required();

  // patterns
  auto* patterns = app.add_subcommand("patterns", "pattern counting");
  patterns->require_subcommand(1);
  auto* hs = patterns->add_subcommand("hs", "head-and-shoulders occurrences");
  std::string hs_in;
  double neckline = 0, shoulder = 0, head = 0;
  hs->add_option("input", hs_in)->required();
  hs->add_option("--neckline", neckline)->required();
  hs->add_option("--shoulder", shoulder)->required();
  hs->add_option("--head", head)->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo against closed forms");
  simulate->require_subcommand(1);
  SimulateArgs sim;
  auto add_common = [&](CLI::App* c) {
    c->add_option("-m,--drift", sim.m)->check(CLI::PositiveNumber);
    c->add_option("-n", sim.n)->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
    c->add_option("--seed", sim.seed)->required();
    c->add_option("--threads", sim.threads)->check(CLI::Range(1u, 1024u));
    c->add_option("--format", sim.format)->check(CLI::IsMember({"json", "csv"}));
  };
  auto* geom = simulate->add_subcommand("geom", "winding-count law around [b, d]");
  add_common(geom);
  geom->add_option("--interval", sim.interval)->expected(2);
  geom->add_option("--delta", sim.delta);
  geom->add_option("--dt", sim.dt, "use discretized paths with this step instead of exact chains");
  auto* excess = simulate->add_subcommand("excess", "F minus M among straddling bars");
  add_common(excess);
  excess->add_option("--interval", sim.interval)->expected(2);
  excess->add_option("--delta", sim.delta);
  auto* cov = simulate->add_subcommand("cov", "covariance of windings around two intervals");
  add_common(cov);
  cov->add_option("--intervals", sim.intervals, "b1 d1 b2 d2")->expected(4)->required();
  auto* intensity = simulate->add_subcommand("intensity", "bar counts in small boxes");
  add_common(intensity);
  double box_b = 1.0;
  intensity->add_option("-b", box_b);
  intensity->add_option("--box", sim.h, "box side");
  intensity->add_option("--deltas", sim.deltas)->required();

  // theory
  auto* theory_cmd = app.add_subcommand("theory", "closed forms");
  theory_cmd->require_subcommand(1);
  auto* eval = theory_cmd->add_subcommand("eval", "evaluate a formula");
  std::string formula;
  double m = 1.0, delta = 0.5, x = 1.0, y = 1.0, dl = 0.5, dr = 0.5;
  int k = 1;
  eval->add_option("formula", formula)
      ->required()
      ->check(CLI::IsMember({"geometric_parameter", "expected_quadrant_content", "intensity_density",
                             "harmonic", "expected_excess", "exit_probabilities", "two_interval_gf",
                             "winding_covariance", "g2_density"}));
  eval->add_option("-m,--drift", m);
  eval->add_option("--delta", delta);
  eval->add_option("-k", k);
  eval->add_option("-x", x);
  eval->add_option("-y", y);
  eval->add_option("--dl", dl);
  eval->add_option("--dr", dr);
  eval->add_option("--intervals", intervals, "b1 d1 b2 d2")->expected(4);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  if (*bars) {
    const auto diagram = tsph::compute_ph0(prepared_series(bars_in, epsilon));
    if (!quadrant.empty()) {
      const auto count = tsph::quadrant_content(diagram, quadrant[0], quadrant[1], include_stem);
      if (format == "csv") {
        std::cout << "b,d,include_stem,count\n"
                  << num(quadrant[0]) << ',' << num(quadrant[1]) << ',' << include_stem << ',' << count
                  << '\n';
      } else {
        print(Json{{"b", quadrant[0]}, {"d", quadrant[1]}, {"include_stem", include_stem}, {"count", count}});
      }
    } else if (format == "csv") {
      std::cout << tsph::diagram_to_csv(diagram);
    } else {
      print(tsph::diagram_to_json(diagram));
    }
  } else if (*tree) {
    print(tsph::tree_to_json(tsph::build_merge_tree(prepared_series(tree_in, epsilon))));
  } else if (*reconstruct) {
    const auto pile = tsph::diagram_from_json(tsph::parse_json(read_input(pile_in)));
    print(tsph::tree_to_json(tsph::reconstruct_tree(pile)));
  } else if (*contour) {
    const auto series = tsph::contour_walk(tsph::tree_from_json(tsph::parse_json(read_input(contour_in))));
    if (format == "json") {
      print(tsph::series_to_json(series));
    } else {
      std::cout << tsph::to_csv(series);
    }
  } else if (*windings) {
    const auto series = parse_series(read_input(windings_in));
    print(Json{{"b", interval[0]},
               {"d", interval[1]},
               {"windings", tsph::count_windings(series, interval[0], interval[1])}});
  } else if (*automaton) {
    if (*run_cmd) {
      const auto a = tsph::automaton_from_json(tsph::parse_json(read_input(spec_in)));
      const auto series = parse_series(read_input(run_in));
      const auto traj = tsph::run_automaton(a, series);
      Json counts = Json::object();
      for (const auto& v : a.variables()) counts[v] = traj.count(v);
      Json flagged = Json::object();
      for (std::size_t s = 0; s < a.states().size(); ++s) {
        if (a.state(s).flag) {
          flagged[a.state(s).name] = std::count(traj.states.begin(), traj.states.end(), s);
        }
      }
      Json states = Json::array();
      for (auto s : traj.states) states.push_back(a.state(s).name);
      print(Json{{"trajectory", traj.to_string(a)},
                 {"states", std::move(states)},
                 {"counts", std::move(counts)},
                 {"flagged", std::move(flagged)}});
    } else if (*winding_cmd) {
      print(tsph::automaton_to_json(tsph::winding_automaton(interval[0], interval[1])));
    } else {
      print(tsph::automaton_to_json(
          tsph::two_interval_automaton(intervals[0], intervals[1], intervals[2], intervals[3])));
    }
  } else if (*patterns) {
    const auto a = tsph::head_and_shoulders_automaton(neckline, shoulder, head);
    const auto count = tsph::count_pattern(a, a.index_of("found"), parse_series(read_input(hs_in)));
    print(Json{{"pattern", "head_and_shoulders"},
               {"neckline", neckline},
               {"shoulder", shoulder},
               {"head", head},
               {"count", count}});
  } else if (*simulate) {
    Json params{{"m", sim.m}, {"threads", sim.threads}};
    Json out;
    std::string csv;
    if (*geom) {
      const auto [b, d] = sim.levels();
      params["b"] = b;
      params["d"] = d;
      tsph::StraddleHistogram hist;
      if (sim.dt > 0.0) {
        params["dt"] = sim.dt;
        hist = tsph::mc_straddle_distribution_paths(sim.m, b, d, sim.dt, sim.options());
      } else {
        hist = tsph::mc_straddle_distribution(sim.m, b, d, sim.options());
      }
      const double p = tsph::theory::geometric_parameter(sim.m, d - b);
      const auto fit = tsph::chi_square_gof(hist.counts, [p](std::size_t k) {
        return p * std::pow(1.0 - p, static_cast<double>(k));
      });
      Json table = Json::array();
      csv = "k,count,frequency,theory\n";
      for (std::size_t k = 0; k < hist.counts.size(); ++k) {
        const double freq = static_cast<double>(hist.counts[k]) / static_cast<double>(sim.n);
        const double th = p * std::pow(1.0 - p, static_cast<double>(k));
        table.push_back(Json{{"k", k}, {"count", hist.counts[k]}, {"frequency", freq}, {"theory", th}});
        csv += std::to_string(k) + ',' + std::to_string(hist.counts[k]) + ',' + num(freq) + ',' + num(th) + '\n';
      }
      out = estimate_json(hist.mean);
      out["theory"] = tsph::theory::expected_quadrant_content(sim.m, d - b);
      out["p"] = p;
      out["chi_square"] = Json{{"statistic", fit.statistic}, {"dof", fit.dof}, {"p_value", fit.p_value}};
      out["histogram"] = std::move(table);
    } else if (*excess) {
      const auto [b, d] = sim.levels();
      params["b"] = b;
      params["d"] = d;
      const auto r = tsph::mc_chirality_excess(sim.m, b, d, sim.options());
      out = estimate_json(r.unconditional);
      out["theory"] = tsph::theory::expected_excess(sim.m, d - b);
      Json table = Json::array();
      csv = "k,n,estimate,std_error,theory\n";
      for (const auto& [k, e] : r.conditional) {
        double th = 0.0;
        for (std::size_t j = k; j >= 1; --j) th += 1.0 / static_cast<double>(j);
        table.push_back(Json{{"k", k}, {"n", e.n}, {"estimate", e.estimate}, {"std_error", e.std_error}, {"theory", th}});
        csv += std::to_string(k) + ',' + std::to_string(e.n) + ',' + num(e.estimate) + ',' +
               num(e.std_error) + ',' + num(th) + '\n';
      }
      out["conditional"] = std::move(table);
    } else if (*cov) {
      const tsph::theory::IntervalPair iv{sim.intervals[0], sim.intervals[1], sim.intervals[2], sim.intervals[3]};
      iv.validate();
      params["intervals"] = sim.intervals;
      const auto e = tsph::mc_winding_covariance(sim.m, iv, sim.options());
      out = estimate_json(e);
      out["theory"] = tsph::theory::winding_covariance(sim.m, iv);
      csv = "estimate,std_error,n,theory\n" + num(e.estimate) + ',' + num(e.std_error) + ',' +
            std::to_string(e.n) + ',' + num(out["theory"].get<double>()) + '\n';
    } else {
      params["b"] = box_b;
      params["box"] = sim.h;
      params["deltas"] = sim.deltas;
      const auto bins = tsph::mc_intensity(sim.m, box_b, sim.h, sim.deltas, sim.options());
      Json table = Json::array();
      csv = "b_lo,b_hi,d_lo,d_hi,estimate,std_error,theory\n";
      for (const auto& bin : bins) {
        table.push_back(Json{{"b_lo", bin.b_lo}, {"b_hi", bin.b_hi}, {"d_lo", bin.d_lo}, {"d_hi", bin.d_hi},
                             {"estimate", bin.count.estimate}, {"std_error", bin.count.std_error},
                             {"theory", bin.theory}});
        csv += num(bin.b_lo) + ',' + num(bin.b_hi) + ',' + num(bin.d_lo) + ',' + num(bin.d_hi) + ',' +
               num(bin.count.estimate) + ',' + num(bin.count.std_error) + ',' + num(bin.theory) + '\n';
      }
      out = Json{{"n", sim.n}, {"bins", std::move(table)}};
    }
    out["params"] = std::move(params);
    out["seed"] = sim.seed;
    if (sim.format == "csv") {
      std::cout << csv;
    } else {
      print(out);
    }
  } else if (*theory_cmd) {
    namespace th = tsph::theory;
    Json out{{"formula", formula}};
    auto pair = [&] {
      if (intervals.size() != 4) throw tsph::ValidationError("--intervals b1 d1 b2 d2 is required");
      th::IntervalPair iv{intervals[0], intervals[1], intervals[2], intervals[3]};
      iv.validate();
      return iv;
    };
    if (formula == "geometric_parameter") {
      out["value"] = th::geometric_parameter(m, delta);
    } else if (formula == "expected_quadrant_content") {
      out["value"] = th::expected_quadrant_content(m, delta);
    } else if (formula == "intensity_density") {
      out["value"] = th::intensity_density(m, delta);
    } else if (formula == "harmonic") {
      const auto h = th::harmonic(k);
      out["value"] = h.to_double();
      out["exact"] = h.to_string();
    } else if (formula == "expected_excess") {
      out["value"] = th::expected_excess(m, delta);
    } else if (formula == "exit_probabilities") {
      const auto e = th::exit_probabilities(m, dl, dr);
      out["up"] = e.up;
      out["down"] = e.down;
    } else if (formula == "two_interval_gf") {
      out["value"] = th::two_interval_gf(m, pair(), x, y);
    } else if (formula == "winding_covariance") {
      out["value"] = th::winding_covariance(m, pair());
    } else {
      const auto r = th::g2_density(m, pair());
      out["value"] = r.value;
      out["coarse_value"] = r.coarse_value;
      out["convergence"] = r.convergence;
      out["printed"] = r.printed;
      out["printed_ratio"] = r.printed_ratio;
    }
    print(out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tsph::DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const tsph::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const tsph::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
