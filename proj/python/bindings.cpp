#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tsph/automata.hpp"
#include "tsph/brownian.hpp"
#include "tsph/error.hpp"
#include "tsph/io.hpp"
#include "tsph/ph0.hpp"
#include "tsph/theory.hpp"
#include "tsph/tree_codec.hpp"

namespace py = pybind11;
using namespace tsph;

namespace {

TimeSeries make_series(const std::vector<double>& values, const std::optional<std::vector<double>>& times) {
  return times ? TimeSeries(*times, values) : TimeSeries::from_values(values);
}

}  // namespace

PYBIND11_MODULE(_tsph, m) {
  m.doc() = "Persistence of time series: diagrams, merge trees, automata and Brownian statistics";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  auto validation = py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
  (void)validation;

  py::class_<TimeSeries>(m, "TimeSeries")
      .def(py::init([](std::vector<double> values, std::optional<std::vector<double>> times) {
             return make_series(values, times);
           }),
           py::arg("values"), py::arg("times") = py::none())
      .def_property_readonly("times", &TimeSeries::times)
      .def_property_readonly("values", &TimeSeries::values)
      .def("__len__", &TimeSeries::size);

  m.def("parse_csv", [](const std::string& text) { return parse_csv(text); });
  m.def("to_csv", &to_csv, py::arg("series"), py::arg("header") = true);
  m.def("is_generic", &is_generic);
  m.def("make_generic", &make_generic, py::arg("series"), py::arg("epsilon"));
  m.def("augment", &augment);
  m.def("is_augmented", &is_augmented);
  m.def("reversed", &reversed);

  py::enum_<Chirality>(m, "Chirality").value("M", Chirality::M).value("F", Chirality::F);

  py::class_<Bar>(m, "Bar")
      .def_readonly("birth", &Bar::birth)
      .def_readonly("death", &Bar::death)
      .def_readonly("birth_index", &Bar::birth_index)
      .def_readonly("death_index", &Bar::death_index)
      .def_readonly("chirality", &Bar::chirality)
      .def_readonly("parent", &Bar::parent)
      .def("__repr__", [](const Bar& b) {
        return "Bar(" + std::to_string(b.birth) + ", " + std::to_string(b.death) + ", " +
               to_char(b.chirality) + ")";
      });

  py::class_<PersistenceDiagram>(m, "PersistenceDiagram")
      .def_readonly("stem", &PersistenceDiagram::stem)
      .def_readonly("bars", &PersistenceDiagram::bars)
      .def_readonly("max_stack_depth", &PersistenceDiagram::max_stack_depth)
      .def("__len__", &PersistenceDiagram::size)
      .def("to_json", [](const PersistenceDiagram& d) { return diagram_to_json(d).dump(); });

  m.def("diagram_from_json", [](const std::string& s) { return diagram_from_json(parse_json(s)); });
  m.def("compute_ph0", &compute_ph0);
  m.def("count_windings", &count_windings, py::arg("series"), py::arg("b"), py::arg("d"));
  m.def("quadrant_content", &quadrant_content, py::arg("diagram"), py::arg("b"), py::arg("d"),
        py::arg("include_stem") = false);
  m.def("same_diagram", &same_diagram, py::arg("a"), py::arg("b"), py::arg("compare_indices") = false);

  py::class_<PlaneMergeTree>(m, "PlaneMergeTree")
      .def("__len__", &PlaneMergeTree::size)
      .def("leaf_count", &PlaneMergeTree::leaf_count)
      .def("to_json", [](const PlaneMergeTree& t) { return tree_to_json(t).dump(); });
  m.def("tree_from_json", [](const std::string& s) { return tree_from_json(parse_json(s)); });
  m.def("build_merge_tree", &build_merge_tree);
  m.def("elder_decompose", &elder_decompose);
  m.def("reconstruct_tree", &reconstruct_tree);
  m.def("contour_walk", &contour_walk);
  m.def("plane_isomorphic", &plane_isomorphic);

  py::class_<LevelAutomaton>(m, "LevelAutomaton")
      .def_property_readonly("span", &LevelAutomaton::span)
      .def("state_names", [](const LevelAutomaton& a) {
        std::vector<std::string> names;
        for (const auto& s : a.states()) names.push_back(s.name);
        return names;
      })
      .def("index_of", [](const LevelAutomaton& a, const std::string& n) { return a.index_of(n); })
      .def("to_json", [](const LevelAutomaton& a) { return automaton_to_json(a).dump(); });
  m.def("automaton_from_json", [](const std::string& s) { return automaton_from_json(parse_json(s)); });
  m.def("winding_automaton", &winding_automaton);
  m.def("two_interval_automaton", &two_interval_automaton);
  m.def("head_and_shoulders_automaton", &head_and_shoulders_automaton);
  m.def("run_automaton", [](const LevelAutomaton& a, const TimeSeries& s) {
    const auto t = run_automaton(a, s);
    return py::make_tuple(t.to_string(a), t.variable_counts);
  });
  m.def("count_pattern", &count_pattern);
  m.def(
      "solve_path_weights",
      [](const LevelAutomaton& a, std::optional<double> drift, std::optional<std::vector<double>> probs,
         const std::map<std::string, double>& vars) {
        if (!probs && !drift) throw ValidationError("give drift or probabilities");
        const auto p = probs ? *probs : brownian_probabilities(a, *drift);
        return solve_path_weights(a, p, vars).values;
      },
      py::arg("automaton"), py::arg("drift") = py::none(), py::arg("probabilities") = py::none(),
      py::arg("variables") = std::map<std::string, double>{});

  auto th = m.def_submodule("theory");
  th.def("geometric_parameter", &theory::geometric_parameter);
  th.def("expected_quadrant_content", &theory::expected_quadrant_content);
  th.def("intensity_density", &theory::intensity_density);
  th.def("harmonic", [](int k) {
    const auto h = theory::harmonic(k);
    return py::make_tuple(h.num, h.den);
  });
  th.def("expected_excess", &theory::expected_excess);
  th.def("exit_probabilities", [](double mm, double dl, double dr) {
    const auto e = theory::exit_probabilities(mm, dl, dr);
    return py::make_tuple(e.up, e.down);
  });
  auto iv = [](double b1, double d1, double b2, double d2) {
    theory::IntervalPair p{b1, d1, b2, d2};
    p.validate();
    return p;
  };
  th.def("two_interval_gf", [iv](double mm, double b1, double d1, double b2, double d2, double x, double y) {
    return theory::two_interval_gf(mm, iv(b1, d1, b2, d2), x, y);
  });
  th.def("winding_covariance", [iv](double mm, double b1, double d1, double b2, double d2) {
    return theory::winding_covariance(mm, iv(b1, d1, b2, d2));
  });
  th.def("g2_density", [iv](double mm, double b1, double d1, double b2, double d2) {
    const auto r = theory::g2_density(mm, iv(b1, d1, b2, d2));
    return py::dict(py::arg("value") = r.value, py::arg("coarse_value") = r.coarse_value,
                    py::arg("convergence") = r.convergence, py::arg("printed") = r.printed);
  });

  auto mc = m.def_submodule("mc");
  auto est = [](const Estimate& e) {
    return py::dict(py::arg("estimate") = e.estimate, py::arg("std_error") = e.std_error, py::arg("n") = e.n);
  };
  mc.def(
      "straddle_distribution",
      [est](double mm, double b, double d, std::size_t n, std::uint64_t seed, unsigned threads) {
        const auto h = mc_straddle_distribution(mm, b, d, {n, seed, threads});
        return py::make_tuple(h.counts, est(h.mean));
      },
      py::arg("m"), py::arg("b"), py::arg("d"), py::arg("n"), py::arg("seed"), py::arg("threads") = 1);
  mc.def(
      "chirality_excess",
      [est](double mm, double b, double d, std::size_t n, std::uint64_t seed, unsigned threads) {
        return est(mc_chirality_excess(mm, b, d, {n, seed, threads}).unconditional);
      },
      py::arg("m"), py::arg("b"), py::arg("d"), py::arg("n"), py::arg("seed"), py::arg("threads") = 1);
  mc.def(
      "winding_covariance",
      [est, iv](double mm, double b1, double d1, double b2, double d2, std::size_t n, std::uint64_t seed,
                unsigned threads) { return est(mc_winding_covariance(mm, iv(b1, d1, b2, d2), {n, seed, threads})); },
      py::arg("m"), py::arg("b1"), py::arg("d1"), py::arg("b2"), py::arg("d2"), py::arg("n"), py::arg("seed"),
      py::arg("threads") = 1);
}
