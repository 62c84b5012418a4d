#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "mbs/coupled_basis.hpp"
#include "mbs/lattice.hpp"
#include "mbs/protocol.hpp"

// JSON layouts (documented in docs/formats.md): quantum numbers are stored
// as twice-values, matrices as coordinate lists.

namespace mbs {

nlohmann::json block_system_to_json(const BlockSystem& system);
BlockSystem block_system_from_json(const nlohmann::json& j);

nlohmann::json coupled_basis_to_json(const CoupledBasis& basis);
CoupledBasis coupled_basis_from_json(const nlohmann::json& j);

nlohmann::json sparse_operator_to_json(const SparseOperator& op);
SparseOperator sparse_operator_from_json(const nlohmann::json& j);

LatticeModel lattice_model_from_json(const nlohmann::json& j);

// A simulation document: the block system plus protocol parameters. The
// initial state stays symbolic until a basis exists to resolve it against.
struct SimulationSpec {
    BlockSystem system;
    ProtocolConfig config; // initial_populations left empty here
    nlohmann::json initial; // {"type":"mixed"} or {"type":"explicit",...}
};

SimulationSpec simulation_spec_from_json(const nlohmann::json& j);

std::vector<double> resolve_initial_populations(const CoupledBasis& basis,
                                                const nlohmann::json& initial);

// 12-significant-digit shortest form used in CSV output.
std::string format_number(double v);

// FNV-1a 64-bit content digest, hex encoded; used in run manifests.
std::string fnv1a64_hex(const std::string& bytes);

} // namespace mbs
