#pragma once

#include <map>
#include <string>
#include <vector>

#include "mbs/block_system.hpp"
#include "mbs/collective_ops.hpp"
#include "mbs/coupled_basis.hpp"
#include "mbs/rate_dynamics.hpp"

namespace mbs {

enum class ProtocolMode { Kinetic, SteadyShortcut };

const char* protocol_mode_name(ProtocolMode m);
ProtocolMode protocol_mode_from_name(const std::string& name);

// Alternating polarization protocol: odd intervals dissipate under
// {J^-, j_A^+ - j_B^+} in the AB basis, even intervals under
// {J^-, j_C^+ - j_D^+} in the CD basis; populations cross between bases
// through squared overlap magnitudes. Rates and time are nondimensional:
// the raising rate is 1 and tau is measured in its inverse.
struct ProtocolConfig {
    double lambda_h = 1000.0; // in units of lambda_o
    double lambda_o = 1.0;
    double tau = 2.0; // units of 1/lambda_o
    int intervals = 5;
    ProtocolMode mode = ProtocolMode::Kinetic;
    // Populations over the AB coupled basis in canonical order; empty means
    // the completely mixed state of the subspace.
    std::vector<double> initial_populations;
    unsigned threads = 0;
    std::size_t dimension_cap = BlockSystem::kDefaultDimensionCap;

    double rate_ratio() const { return lambda_h / lambda_o; }
};

struct MultipletKey {
    HalfInt j, j1, j2; // (J, j_A, j_B)
    friend auto operator<=>(const MultipletKey&, const MultipletKey&) = default;
};

struct Checkpoint {
    int interval;
    double time; // units of 1/lambda_o
    std::map<HalfInt, double> p_j;
    std::map<MultipletKey, double> p_multiplet;
    double j_squared;
    double total;          // sum of populations, conservation diagnostic
    double min_population; // most negative entry seen at this boundary
};

struct ObservableSeries {
    std::vector<Checkpoint> points;
    bool rate_condition_ok = true;
    double rate_condition_min = 0.0;
    std::vector<double> final_populations; // AB basis, canonical order
};

// Shared machinery between the population protocol and the full-Lindblad
// audit.
struct ProtocolContext {
    CoupledBasis basis_ab;
    CoupledBasis basis_cd;
    SparseOperator ab_to_cd; // overlap transform
    SparseOperator cd_to_ab;
    SparseOperator generator_ab; // rate matrix of {L1, L2} in the AB basis
    SparseOperator generator_cd; // rate matrix of {L1, L3} in the CD basis
};

ProtocolContext build_protocol_context(const BlockSystem& system, double rate_ratio,
                                       std::size_t dimension_cap, unsigned threads = 0);

ObservableSeries protocol_run(const BlockSystem& system, const ProtocolConfig& config);
ObservableSeries protocol_run(const ProtocolContext& context, const ProtocolConfig& config);

// Full-Lindblad rerun of the protocol on small systems: reports the worst
// off-diagonal coherence (in the basis of the interval that just ended) and
// the worst P(J) gap to the rate-equation run, per interval boundary.
struct AuditBoundary {
    int interval;
    double time;
    double max_offdiag;
    double p_deviation;
};

struct AuditResult {
    double max_offdiag = 0.0;
    double max_p_deviation = 0.0;
    std::vector<AuditBoundary> boundaries;
};

AuditResult coherence_audit(const BlockSystem& system, const ProtocolConfig& config);

} // namespace mbs
