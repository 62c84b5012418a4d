#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "mbs/block_system.hpp"
#include "mbs/coupled_basis.hpp"
#include "mbs/sparse.hpp"

namespace mbs {

// Reference value -[(J+1)(2J+1)]^{-1/2} for the forward/backward matrix
// element ratio of a collective raising operator between adjacent
// multiplets probed at their spin coherent states.
double identity_ratio_reference(HalfInt j);

struct RatioSample {
    HalfInt j;                     // lower multiplet spin
    std::size_t lower_state;       // index of |J,-J,alpha>
    std::size_t upper_state;       // index of |J+1,-J-1,alpha'>
    double numerator;              // <J+1,-J+1,a'| op |J,-J,a>
    double denominator;            // <J,-J,a| op |J+1,-J-1,a'>
    double measured;               // numerator / denominator
    double reference;
};

// Enumerates every adjacent-multiplet pair of the basis and measures the
// ratio wherever the denominator exceeds `denominator_floor`. Pairs with a
// smaller denominator are still covered through the product residual
// |num - ref * den| which callers can bound.
std::vector<RatioSample> scan_ratio_identity(const CoupledBasis& basis,
                                             const SparseOperator& raising_op,
                                             double denominator_floor = 1e-12);

// Largest |num - ref * den| over all adjacent pairs, tiny denominators
// included.
double ratio_product_residual(const CoupledBasis& basis, const SparseOperator& raising_op);

// Maximum |<J',M',a'| op |J,-J,a>| over the forbidden combinations
// |J'-J| > 1 or M' != -J+1, scanned from every coherent state.
double selection_rule_scan(const CoupledBasis& basis, const SparseOperator& raising_op);

struct AsymmetrySample {
    HalfInt j;
    double measured;  // forward/backward squared-element ratio
    double reference; // (J+1)(2J+1)
};

// Per matching multiplet pair: squared forward transfer element (J+1 -> J)
// over squared backward element (J -> J+1).
std::vector<AsymmetrySample> transfer_rate_asymmetry(const CoupledBasis& basis,
                                                     const SparseOperator& raising_op);

// Aggregate report for one system: both schemes, both pure difference
// operators and `superpositions` random linear combinations of them.
struct IdentitySuiteReport {
    std::size_t pairs_checked = 0;
    double max_ratio_deviation = 0.0;
    double max_product_residual = 0.0;
    double max_selection_violation = 0.0;
    double max_asymmetry_deviation = 0.0; // relative
};

IdentitySuiteReport identity_suite(const BlockSystem& system, int superpositions = 10,
                                   std::uint64_t seed = 20260810,
                                   std::size_t dimension_cap = BlockSystem::kDefaultDimensionCap,
                                   unsigned threads = 0);

// Relative multiplet weights of the polarization steady state,
// f(J) = (J+1)(2J+1) f(J+1) with f(Jmin) = 1.
struct SteadyDistribution {
    std::map<HalfInt, double> f;
    HalfInt j_min, j_max;

    double ratio_to_min(HalfInt j) const { return f.at(j); }
};

SteadyDistribution steady_distribution(HalfInt j_max, HalfInt j_min = HalfInt(0));

// g(J) = (2J+1) / prod_{i=0}^{J-1} (i+1)(2i+1) and its partial sums.
struct GSeries {
    std::vector<double> g;            // index = integer J
    std::vector<double> partial_sums; // S(J) = sum_{i<=J} g(i)
};

GSeries g_series(int j_max);

// Steady-state singlet population floor [sum_J g(J)]^-1 and the matching
// collective-spin variance bound; the series tail is factorially small, so
// j_max = 12 pins both to well below 1e-12.
double mbs_floor(int j_max = 12);
double variance_bound(int j_max = 12);

struct MultipletReport {
    std::map<HalfInt, std::size_t> count; // n(J)
    bool bound_holds = true;              // n(J) <= n(0)(2J+1) for all J
    std::size_t dimension = 0;            // sum n(J)(2J+1)
};

MultipletReport multiplet_count(const CoupledBasis& basis);

// Minimum Lambda_h / Lambda_o for polarization to outpace the raising
// channel: the square of the summed block spins.
double rate_condition(const BlockSystem& system);

// Upper bound on the number of spins unentangled with the rest, from the
// collective-spin variance and the mean spin per particle.
double unentangled_bound(double variance, double s_bar);

} // namespace mbs
