#pragma once

#include <span>
#include <vector>

#include "mbs/coupled_basis.hpp"
#include "mbs/sparse.hpp"

namespace mbs {

// One dissipation channel L = sqrt(rate) * op.
struct Jump {
    SparseOperator op;
    double rate;
};

using JumpSet = std::vector<Jump>;

// Classical generator of the diagonal (population) dynamics:
// W_fi = sum_m rate_m |<f| op_m |i>|^2 for f != i, diagonal entries make
// every column sum to zero.
SparseOperator rate_matrix(const CoupledBasis& basis, const JumpSet& jumps);

// exp(W tau) applied per conserved sector as a dense block; the blocks are
// precomputed so one propagator can be reused across protocol intervals.
class SectorPropagator {
  public:
    SectorPropagator(const CoupledBasis& basis, const SparseOperator& generator, double tau,
                     unsigned threads = 0);

    void apply(std::vector<double>& populations) const;

  private:
    const CoupledBasis* basis_;
    std::vector<std::vector<double>> blocks_; // row-major dense exp per sector
};

// p(tau) = exp(W tau) p0.
std::vector<double> evolve_populations(const CoupledBasis& basis, const SparseOperator& generator,
                                       std::span<const double> p0, double tau,
                                       unsigned threads = 0);

struct SteadyStateResult {
    std::vector<double> populations; // over the sector indices, sums to 1
    int nullity = 1;                 // > 1 flags a disconnected sector
    double residual = 0.0;           // max |W p| over the sector
};

// Stationary distribution of the generator restricted to one sector.
SteadyStateResult steady_state(const SparseOperator& generator,
                               std::span<const std::size_t> sector_indices);

// Replaces the population of every sector by its stationary distribution,
// keeping each sector's total weight.
std::vector<double> apply_steady_shortcut(const CoupledBasis& basis,
                                          const SparseOperator& generator,
                                          std::span<const double> populations);

} // namespace mbs
