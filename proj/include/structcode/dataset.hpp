#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "structcode/graph.hpp"

namespace structcode {

// JSONL with one instance per line:
//   script-gen / edge-pred  {"id", "goal", "nodes": [{"id","label"}], "edges": [["src","dst"], ...]}
//   expl-graph              {"id", "belief", "argument", "stance", "edges": [["src","relation","dst"], ...]}
//   entity-tracking         {"id", "actions": [...], "entities": [...], "states": [[cell, ...], ...]}
// A state cell is "-" (non-existent), "?" (unknown) or a location. Gold
// fields ("edges", "states") may be absent on test files. Errors are
// Error(SchemaError) with line() set and field() naming the JSON field.
std::vector<TaskInstance> load_dataset(const std::string& path, TaskKind task);
std::vector<TaskInstance> read_dataset(std::istream& in, TaskKind task);

// One JSON object, no trailing newline. Inverse of the loader.
std::string instance_to_json(const TaskInstance& instance);
void write_dataset(std::ostream& out, const std::vector<TaskInstance>& instances);

// Structure <-> JSON text using the same field layout ("nodes"/"edges"/attrs
// for graphs, "actions"/"entities"/"states" for traces).
std::string structure_to_json(const Structure& s);
Structure structure_from_json(std::string_view text);

std::string state_cell(const StateValue& v);
StateValue parse_state_cell(std::string_view cell);

}  // namespace structcode
