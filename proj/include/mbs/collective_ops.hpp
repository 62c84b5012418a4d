#pragma once

#include <span>

#include "mbs/coupled_basis.hpp"
#include "mbs/sparse.hpp"

namespace mbs {

enum class LadderDirection { Raise, Lower };

// Matrix of sum_n w_n I_n^+- in the given coupled basis, one weight per
// block. Entries couple only states with M' = M +- 1; when the weights are
// uniform on each top-level subset of the basis scheme the operator is
// additionally block diagonal in alpha.
SparseOperator collective_ladder(const CoupledBasis& basis, std::span<const double> weights,
                                 LadderDirection direction, unsigned threads = 0);

// J^- : uniform weights, lowering.
SparseOperator total_lowering(const CoupledBasis& basis, unsigned threads = 0);

// j_X^+ - j_Y^+ for the bipartition named by `scheme` (A/B or C/D),
// expressed in `basis` (which may belong to either scheme).
SparseOperator subset_raising_difference(const CoupledBasis& basis, Scheme scheme,
                                         unsigned threads = 0);

// Orthogonal matrix of overlaps <to_f | from_i> between two coupled bases
// of the same block system; block diagonal in (J, M) by construction.
SparseOperator overlap_transform(const CoupledBasis& from, const CoupledBasis& to,
                                 unsigned threads = 0);

// Population transfer under a basis switch: p'_f = sum_i U_fi^2 p_i.
std::vector<double> map_populations(const SparseOperator& transform,
                                    std::span<const double> populations);

} // namespace mbs
