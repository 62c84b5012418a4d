#include "mbs/presets.hpp"

#include <map>
#include <stdexcept>

namespace mbs {

namespace {

// Four spin-1/2 blocks, one per intersection class; 16-dimensional.
const std::string kFourHalf = R"({
  "kind": "simulation",
  "system": {"blocks": [
    {"spin_twice": 1, "class": "AC"},
    {"spin_twice": 1, "class": "AD"},
    {"spin_twice": 1, "class": "BC"},
    {"spin_twice": 1, "class": "BD"}
  ]},
  "lambda_h": 1000.0,
  "lambda_o": 1.0,
  "tau": 2.0,
  "intervals": 5,
  "mode": "kinetic",
  "initial": {"type": "mixed"}
})";

// Four spin-7/2 blocks; 4096-dimensional subspace of the alternating
// squeezing run.
const std::string kFig2 = R"({
  "kind": "simulation",
  "system": {"blocks": [
    {"spin_twice": 7, "class": "AC"},
    {"spin_twice": 7, "class": "AD"},
    {"spin_twice": 7, "class": "BC"},
    {"spin_twice": 7, "class": "BD"}
  ]},
  "lambda_h": 1000.0,
  "lambda_o": 1.0,
  "tau": 2.0,
  "intervals": 5,
  "mode": "kinetic",
  "initial": {"type": "mixed"}
})";

// Twelve nuclear spins around a 2D Gaussian electron: an inner shell of 4
// diagonal sites and an outer shell of 8 sites at radius sqrt(5), both in
// envelope-width units.
const std::string kFig3 = R"({
  "kind": "lattice",
  "coupling_scale": 1.0,
  "envelope": {"type": "gaussian", "center": [0.0, 0.0], "sigma": 1.0},
  "sites": [
    {"position": [ 1.0,  1.0, 0.0], "spin_twice": 1},
    {"position": [ 1.0, -1.0, 0.0], "spin_twice": 1},
    {"position": [-1.0,  1.0, 0.0], "spin_twice": 1},
    {"position": [-1.0, -1.0, 0.0], "spin_twice": 1},
    {"position": [ 1.0,  2.0, 0.0], "spin_twice": 1},
    {"position": [ 1.0, -2.0, 0.0], "spin_twice": 1},
    {"position": [-1.0,  2.0, 0.0], "spin_twice": 1},
    {"position": [-1.0, -2.0, 0.0], "spin_twice": 1},
    {"position": [ 2.0,  1.0, 0.0], "spin_twice": 1},
    {"position": [ 2.0, -1.0, 0.0], "spin_twice": 1},
    {"position": [-2.0,  1.0, 0.0], "spin_twice": 1},
    {"position": [-2.0, -1.0, 0.0], "spin_twice": 1}
  ]
})";

// Built-in donor shell table; the matching rate estimates are the
// defaults of the `rates` subcommand.
const std::string kSilicon = R"({
  "kind": "silicon"
})";

const std::map<std::string, const std::string*> kPresets = {
    {"four-half", &kFourHalf},
    {"fig2", &kFig2},
    {"fig3", &kFig3},
    {"silicon", &kSilicon},
};

} // namespace

const std::string& preset_document(const std::string& name) {
    auto it = kPresets.find(name);
    if (it == kPresets.end())
        throw std::invalid_argument("unknown preset '" + name + "'");
    return *it->second;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, doc] : kPresets)
        names.push_back(name);
    return names;
}

} // namespace mbs
