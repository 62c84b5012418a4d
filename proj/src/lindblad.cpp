#include "mbs/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mbs/errors.hpp"

namespace mbs {

std::vector<DenseJump> densify(const JumpSet& jumps) {
    std::vector<DenseJump> out;
    out.reserve(jumps.size());
    for (const Jump& j : jumps) {
        const double scale = std::sqrt(j.rate);
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(j.op.rows()),
                                                      static_cast<Eigen::Index>(j.op.cols()));
        for (const auto& e : j.op.entries())
            dense(e.row, e.col) = scale * e.value;
        DenseJump dj;
        dj.op_t_op = dense.transpose() * dense;
        dj.op = std::move(dense);
        out.push_back(std::move(dj));
    }
    return out;
}

DensityMatrix lindblad_rhs(const DensityMatrix& rho, const std::vector<DenseJump>& jumps) {
    DensityMatrix out = DensityMatrix::Zero(rho.rows(), rho.cols());
    for (const DenseJump& j : jumps) {
        if (j.op.rows() != rho.rows())
            throw std::invalid_argument("lindblad_rhs: operator/state dimension mismatch");
        out.noalias() -= 0.5 * (j.op_t_op * rho + rho * j.op_t_op);
        out.noalias() += j.op * rho * j.op.transpose();
    }
    return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

} // namespace

MasterSolution integrate_master(const DensityMatrix& rho0, const JumpSet& jumps,
                                std::span<const double> checkpoints, double rel_tol) {
    if (static_cast<std::size_t>(rho0.rows()) > kLindbladDimensionCap)
        throw DimensionCapError(static_cast<std::size_t>(rho0.rows()), kLindbladDimensionCap);

    const auto dense = densify(jumps);
    auto rhs = [&](const DensityMatrix& rho) { return lindblad_rhs(rho, dense); };

    MasterSolution sol;
    DensityMatrix y = rho0;
    DensityMatrix k1 = rhs(y);
    double t = 0.0;

    // Fastest dissipation scale bounds the spectrum of the generator; the
    // explicit pair is only stable while h stays inside its real-axis
    // stability interval, and the error estimate alone cannot enforce that
    // once the state is near stationary.
    double rate_scale = 0.0;
    for (const DenseJump& j : dense)
        rate_scale = std::max(rate_scale, j.op_t_op.diagonal().maxCoeff());
    const double h_stable =
        rate_scale > 0.0 ? 1.4 / rate_scale : std::numeric_limits<double>::infinity();
    double h = std::min(0.1 / std::max(rate_scale, 1e-30), h_stable);
    if (!std::isfinite(h))
        h = 1e-3;

    const double abs_tol = rel_tol * 1e-2;
    const double trace0 = rho0.trace();
    sol.min_eigenvalue = rho0.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff();

    for (double target : checkpoints) {
        while (t < target) {
            h = std::min(h, target - t);
            if (h < 1e-15 * std::max(1.0, target))
                throw IntegrationError("integrate_master: step size underflow at t=" +
                                       std::to_string(t));

            const DensityMatrix k2 = rhs(y + h * (a21 * k1));
            const DensityMatrix k3 = rhs(y + h * (a31 * k1 + a32 * k2));
            const DensityMatrix k4 = rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            const DensityMatrix k5 = rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const DensityMatrix k6 =
                rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const DensityMatrix y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const DensityMatrix k7 = rhs(y5);
            const DensityMatrix err_mat =
                h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            const double scale = abs_tol + rel_tol * std::max(y.cwiseAbs().maxCoeff(),
                                                              y5.cwiseAbs().maxCoeff());
            const double err = err_mat.cwiseAbs().maxCoeff() / scale;

            if (std::isfinite(err) && err <= 1.0) {
                t += h;
                y = y5;
                k1 = k7; // FSAL
                ++sol.steps;
            } else {
                ++sol.rejected_steps;
            }
            const double grow =
                !std::isfinite(err) ? 0.2 : err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h = std::min(h * std::clamp(grow, 0.2, 5.0), h_stable);
        }
        sol.times.push_back(target);
        sol.states.push_back(y);
        sol.max_trace_drift = std::max(sol.max_trace_drift, std::abs(y.trace() - trace0));
        sol.min_eigenvalue =
            std::min(sol.min_eigenvalue,
                     y.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff());
    }
    return sol;
}

} // namespace mbs
