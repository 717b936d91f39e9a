#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "tsph/automata.hpp"
#include "tsph/merge_tree.hpp"
#include "tsph/ph0.hpp"
#include "tsph/series.hpp"

namespace tsph {

using Json = nlohmann::ordered_json;

/// Reads a JSON document; ParseError on malformed input.
Json parse_json(const std::string& text);
Json read_json_file(const std::filesystem::path& path);

Json series_to_json(const TimeSeries& series);
TimeSeries series_from_json(const Json& j);

Json bar_to_json(const Bar& bar, BarId id);
Json diagram_to_json(const PersistenceDiagram& diagram);
/// Accepts the diagram layout; bars are re-indexed so that ids follow
/// their order in the "bars" array (the stem is always id 0).
PersistenceDiagram diagram_from_json(const Json& j);
/// One row per bar including the stem: id,birth,death,birth_index,death_index,chirality,parent
std::string diagram_to_csv(const PersistenceDiagram& diagram);

Json tree_to_json(const PlaneMergeTree& tree);
PlaneMergeTree tree_from_json(const Json& j);

Json automaton_to_json(const LevelAutomaton& automaton);
/// Transitions may name states by index or by name.
LevelAutomaton automaton_from_json(const Json& j);

}  // namespace tsph
