#pragma once

#include <string>

#include "structcode/graph.hpp"

namespace fixtures {

// The potpie script of the main figure. Labels read as the printed identifiers.
structcode::TaskInstance potpie(structcode::TaskKind task = structcode::TaskKind::ScriptGen);

// The factory farming explanation graph.
structcode::TaskInstance factory_farming();

// The photosynthesis trace (water / light / CO2).
structcode::TaskInstance photosynthesis();

std::string golden_path(const std::string& name);
std::string read_text(const std::string& path);

}  // namespace fixtures
