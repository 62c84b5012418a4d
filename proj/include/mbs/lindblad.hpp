#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "mbs/rate_dynamics.hpp"

namespace mbs {

// Density matrices stay real here: every jump operator has real matrix
// elements, so an initially real-symmetric state remains real-symmetric.
using DensityMatrix = Eigen::MatrixXd;

// Precomputed dense form of one dissipator.
struct DenseJump {
    Eigen::MatrixXd op;      // sqrt(rate) folded in
    Eigen::MatrixXd op_t_op; // op^T op
};

std::vector<DenseJump> densify(const JumpSet& jumps);

// drho/dt = -1/2 sum (L^T L rho + rho L^T L - 2 L rho L^T); traceless.
DensityMatrix lindblad_rhs(const DensityMatrix& rho, const std::vector<DenseJump>& jumps);

struct MasterSolution {
    std::vector<double> times;
    std::vector<DensityMatrix> states; // at the checkpoint times
    double max_trace_drift = 0.0;
    double min_eigenvalue = 0.0;
    std::size_t steps = 0;
    std::size_t rejected_steps = 0;
};

inline constexpr std::size_t kLindbladDimensionCap = 64;

// Adaptive Dormand-Prince integration of the master equation through the
// given checkpoint times (ascending, starting after 0). Positivity and
// trace are monitored at every checkpoint. Throws IntegrationError on
// step-size underflow and DimensionCapError above kLindbladDimensionCap.
MasterSolution integrate_master(const DensityMatrix& rho0, const JumpSet& jumps,
                                std::span<const double> checkpoints, double rel_tol = 1e-8);

} // namespace mbs
