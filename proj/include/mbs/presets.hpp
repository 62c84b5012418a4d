#pragma once

#include <string>
#include <vector>

namespace mbs {

// Embedded configuration documents, one per named preset, in the same JSON
// layout the CLI accepts from --config. Throws std::invalid_argument for
// unknown names.
const std::string& preset_document(const std::string& name);
std::vector<std::string> preset_names();

} // namespace mbs
