#include "tsph/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "tsph/error.hpp"

namespace tsph {

namespace {

const Json& field(const Json& j, const char* key, const char* what) {
  if (!j.is_object()) throw ValidationError(std::string(what) + " must be a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string(what) + " lacks \"" + key + "\"");
  return *it;
}

double number(const Json& j, const char* key, const char* what) {
  const auto& v = field(j, key, what);
  if (!v.is_number()) throw ValidationError(std::string(what) + ": \"" + key + "\" must be a number");
  return v.get<double>();
}

std::size_t index(const Json& j, const char* key, const char* what) {
  const auto& v = field(j, key, what);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ValidationError(std::string(what) + ": \"" + key + "\" must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

Json series_to_json(const TimeSeries& series) {
  return Json{{"times", series.times()}, {"values", series.values()}};
}

TimeSeries series_from_json(const Json& j) {
  const auto& values = field(j, "values", "series");
  if (!values.is_array()) throw ValidationError("series: \"values\" must be an array");
  std::vector<double> v;
  for (const auto& x : values) {
    if (!x.is_number()) throw ValidationError("series: non-numeric value");
    v.push_back(x.get<double>());
  }
  if (!j.contains("times")) return TimeSeries::from_values(std::move(v));
  std::vector<double> t;
  for (const auto& x : j.at("times")) {
    if (!x.is_number()) throw ValidationError("series: non-numeric time");
    t.push_back(x.get<double>());
  }
  return TimeSeries(std::move(t), std::move(v));
}

Json bar_to_json(const Bar& bar, BarId id) {
  Json j{{"id", id},
         {"birth", bar.birth},
         {"death", bar.death},
         {"birth_index", bar.birth_index},
         {"death_index", bar.death_index},
         {"chirality", std::string(1, to_char(bar.chirality))}};
  j["parent"] = bar.parent ? Json(*bar.parent) : Json(nullptr);
  return j;
}

Json diagram_to_json(const PersistenceDiagram& diagram) {
  Json bars = Json::array();
  for (std::size_t i = 0; i < diagram.bars.size(); ++i) bars.push_back(bar_to_json(diagram.bars[i], i + 1));
  return Json{{"stem", bar_to_json(diagram.stem, kStemId)},
              {"bars", std::move(bars)},
              {"max_stack_depth", diagram.max_stack_depth}};
}

namespace {

Bar bar_from_json(const Json& j) {
  Bar bar;
  bar.birth = number(j, "birth", "bar");
  bar.death = number(j, "death", "bar");
  if (j.contains("birth_index")) bar.birth_index = index(j, "birth_index", "bar");
  if (j.contains("death_index")) bar.death_index = index(j, "death_index", "bar");
  const auto& c = field(j, "chirality", "bar");
  if (!c.is_string() || c.get<std::string>().size() != 1) {
    throw ValidationError("bar: chirality must be \"M\" or \"F\"");
  }
  bar.chirality = chirality_from_char(c.get<std::string>()[0]);
  return bar;
}

}  // namespace

PersistenceDiagram diagram_from_json(const Json& j) {
  PersistenceDiagram d;
  d.stem = bar_from_json(field(j, "stem", "diagram"));
  d.stem.parent.reset();
  const auto& bars = field(j, "bars", "diagram");
  if (!bars.is_array()) throw ValidationError("diagram: \"bars\" must be an array");

  // Ids in the file may be arbitrary; map them to positions.
  std::map<long long, BarId> ids;
  ids[j.at("stem").contains("id") ? j.at("stem").at("id").get<long long>() : 0] = kStemId;
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const long long id = bars[i].contains("id") ? bars[i].at("id").get<long long>()
                                                : static_cast<long long>(i + 1);
    if (!ids.emplace(id, i + 1).second) throw ValidationError("diagram: duplicate bar id " + std::to_string(id));
  }
  for (const auto& bj : bars) {
    Bar bar = bar_from_json(bj);
    const auto it = bj.find("parent");
    if (it != bj.end() && !it->is_null()) {
      if (!it->is_number_integer()) throw ValidationError("bar: parent must be an id or null");
      const auto p = ids.find(it->get<long long>());
      if (p == ids.end()) throw ValidationError("bar: unknown parent id " + std::to_string(it->get<long long>()));
      bar.parent = p->second;
    }
    d.bars.push_back(bar);
  }
  if (j.contains("max_stack_depth")) d.max_stack_depth = index(j, "max_stack_depth", "diagram");
  return d;
}

std::string diagram_to_csv(const PersistenceDiagram& diagram) {
  std::string out = "id,birth,death,birth_index,death_index,chirality,parent\n";
  auto row = [&](const Bar& b, BarId id) {
    out += std::to_string(id) + ',' + fmt(b.birth) + ',' + fmt(b.death) + ',' +
           std::to_string(b.birth_index) + ',' + std::to_string(b.death_index) + ',' +
           to_char(b.chirality) + ',' + (b.parent ? std::to_string(*b.parent) : std::string()) + '\n';
  };
  row(diagram.stem, kStemId);
  for (std::size_t i = 0; i < diagram.bars.size(); ++i) row(diagram.bars[i], i + 1);
  return out;
}

Json tree_to_json(const PlaneMergeTree& tree) {
  Json nodes = Json::array();
  Json children = Json::object();
  for (NodeId i = 0; i < tree.size(); ++i) {
    const auto& n = tree.node(i);
    Json node{{"id", i}, {"height", n.height}};
    if (n.sample_index) node["sample_index"] = *n.sample_index;
    nodes.push_back(std::move(node));
    if (!n.children.empty()) children[std::to_string(i)] = n.children;
  }
  return Json{{"nodes", std::move(nodes)}, {"root", tree.root()}, {"children", std::move(children)}};
}

PlaneMergeTree tree_from_json(const Json& j) {
  const auto& nodes = field(j, "nodes", "tree");
  if (!nodes.is_array()) throw ValidationError("tree: \"nodes\" must be an array");
  std::map<long long, NodeId> ids;
  PlaneMergeTree tree;
  for (const auto& n : nodes) {
    const long long id = static_cast<long long>(index(n, "id", "tree node"));
    std::optional<std::size_t> sample;
    if (n.contains("sample_index")) sample = index(n, "sample_index", "tree node");
    const NodeId nid = tree.add_node(number(n, "height", "tree node"), sample);
    if (!ids.emplace(id, nid).second) throw ValidationError("tree: duplicate node id");
  }
  auto lookup = [&](long long id) {
    const auto it = ids.find(id);
    if (it == ids.end()) throw ValidationError("tree: unknown node id " + std::to_string(id));
    return it->second;
  };
  tree.set_root(lookup(static_cast<long long>(index(j, "root", "tree"))));
  if (j.contains("children")) {
    for (const auto& [key, list] : j.at("children").items()) {
      long long parent = 0;
      try {
        parent = std::stoll(key);
      } catch (const std::exception&) {
        throw ValidationError("tree: bad child-list key '" + key + "'");
      }
      for (const auto& c : list) tree.add_child(lookup(parent), lookup(c.get<long long>()));
    }
  }
  tree.validate();
  return tree;
}

Json automaton_to_json(const LevelAutomaton& automaton) {
  Json states = Json::array();
  for (const auto& s : automaton.states()) {
    states.push_back(Json{{"name", s.name}, {"level", s.level}, {"flag", s.flag}});
  }
  Json absorbing = Json::array();
  for (auto a : automaton.absorbing()) absorbing.push_back(automaton.state(a).name);
  Json transitions = Json::array();
  for (const auto& t : automaton.transitions()) {
    transitions.push_back(Json{{"from", automaton.state(t.from).name},
                               {"to", automaton.state(t.to).name},
                               {"var", t.var ? Json(*t.var) : Json(nullptr)}});
  }
  return Json{{"states", std::move(states)},
              {"start", automaton.state(automaton.start()).name},
              {"absorbing", std::move(absorbing)},
              {"transitions", std::move(transitions)}};
}

LevelAutomaton automaton_from_json(const Json& j) {
  const auto& sj = field(j, "states", "automaton");
  if (!sj.is_array()) throw ValidationError("automaton: \"states\" must be an array");
  std::vector<AutomatonState> states;
  for (const auto& s : sj) {
    const auto& name = field(s, "name", "state");
    if (!name.is_string()) throw ValidationError("state: name must be a string");
    AutomatonState st{name.get<std::string>(), number(s, "level", "state"), false};
    if (s.contains("flag")) {
      if (!s.at("flag").is_boolean()) throw ValidationError("state: flag must be a boolean");
      st.flag = s.at("flag").get<bool>();
    }
    states.push_back(std::move(st));
  }
  auto ref = [&](const Json& r) -> std::size_t {
    if (r.is_string()) {
      for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].name == r.get<std::string>()) return i;
      }
      throw ValidationError("automaton: unknown state '" + r.get<std::string>() + "'");
    }
    if (r.is_number_integer() && r.get<long long>() >= 0 &&
        static_cast<std::size_t>(r.get<long long>()) < states.size()) {
      return r.get<std::size_t>();
    }
    throw ValidationError("automaton: bad state reference " + r.dump());
  };
  const std::size_t start = ref(field(j, "start", "automaton"));
  std::vector<std::size_t> absorbing;
  const auto& aj = field(j, "absorbing", "automaton");
  if (!aj.is_array()) throw ValidationError("automaton: \"absorbing\" must be an array");
  for (const auto& a : aj) absorbing.push_back(ref(a));
  std::vector<Transition> transitions;
  const auto& tj = field(j, "transitions", "automaton");
  if (!tj.is_array()) throw ValidationError("automaton: \"transitions\" must be an array");
  for (const auto& t : tj) {
    Transition tr{ref(field(t, "from", "transition")), ref(field(t, "to", "transition")), std::nullopt};
    if (t.contains("var") && !t.at("var").is_null()) {
      if (!t.at("var").is_string()) throw ValidationError("transition: var must be a string or null");
      tr.var = t.at("var").get<std::string>();
    }
    transitions.push_back(std::move(tr));
  }
  return LevelAutomaton(std::move(states), start, std::move(absorbing), std::move(transitions));
}

}  // namespace tsph
