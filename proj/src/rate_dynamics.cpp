#include "mbs/rate_dynamics.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

#include "mbs/parallel.hpp"

namespace mbs {

namespace {

Eigen::MatrixXd sector_block(const SparseOperator& generator,
                             std::span<const std::size_t> indices) {
    const std::size_t n = indices.size();
    std::vector<std::size_t> slot(generator.cols(), SIZE_MAX);
    for (std::size_t k = 0; k < n; ++k)
        slot[indices[k]] = k;
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (const auto& e : generator.column(indices[k]))
            if (slot[e.row] != SIZE_MAX)
                block(static_cast<Eigen::Index>(slot[e.row]), static_cast<Eigen::Index>(k)) =
                    e.value;
    return block;
}

} // namespace

SparseOperator rate_matrix(const CoupledBasis& basis, const JumpSet& jumps) {
    const std::size_t dim = basis.dimension();
    for (const Jump& j : jumps) {
        if (j.op.rows() != dim || j.op.cols() != dim)
            throw std::invalid_argument("rate_matrix: jump operator dimension mismatch");
        if (j.rate < 0.0)
            throw std::invalid_argument("rate_matrix: negative rate");
    }

    std::vector<double> column_sum(dim, 0.0);
    SparseOperator w(dim, dim);
    for (const Jump& j : jumps) {
        for (const auto& e : j.op.entries()) {
            if (e.row == e.col)
                continue;
            const double rate = j.rate * e.value * e.value;
            w.add(e.row, e.col, rate);
            column_sum[e.col] += rate;
        }
    }
    for (std::size_t i = 0; i < dim; ++i)
        if (column_sum[i] != 0.0)
            w.add(i, i, -column_sum[i]);
    // Keep every rate, however small: thresholding here would break the
    // zero-column-sum contract.
    w.finalize(0.0);
    return w;
}

SectorPropagator::SectorPropagator(const CoupledBasis& basis, const SparseOperator& generator,
                                   double tau, unsigned threads)
    : basis_(&basis) {
    if (generator.rows() != basis.dimension() || generator.cols() != basis.dimension())
        throw std::invalid_argument("SectorPropagator: generator dimension mismatch");
    const auto& sectors = basis.sectors();
    blocks_.resize(sectors.size());
    parallel_for(sectors.size(), threads, [&](std::size_t s) {
        const auto& members = sectors[s].members;
        Eigen::MatrixXd block = sector_block(generator, members);
        Eigen::MatrixXd e = (block * tau).exp();
        blocks_[s].assign(e.data(), e.data() + e.size()); // column-major
    });
}

void SectorPropagator::apply(std::vector<double>& populations) const {
    if (populations.size() != basis_->dimension())
        throw std::invalid_argument("SectorPropagator: population dimension mismatch");
    const auto& sectors = basis_->sectors();
    std::vector<double> scratch;
    for (std::size_t s = 0; s < sectors.size(); ++s) {
        const auto& members = sectors[s].members;
        const std::size_t n = members.size();
        scratch.assign(n, 0.0);
        const double* e = blocks_[s].data();
        for (std::size_t c = 0; c < n; ++c) {
            const double p = populations[members[c]];
            if (p == 0.0)
                continue;
            const double* col = e + c * n;
            for (std::size_t r = 0; r < n; ++r)
                scratch[r] += col[r] * p;
        }
        for (std::size_t r = 0; r < n; ++r)
            populations[members[r]] = scratch[r];
    }
}

std::vector<double> evolve_populations(const CoupledBasis& basis, const SparseOperator& generator,
                                       std::span<const double> p0, double tau, unsigned threads) {
    if (p0.size() != basis.dimension())
        throw std::invalid_argument("evolve_populations: dimension mismatch");
    std::vector<double> p(p0.begin(), p0.end());
    const SectorPropagator prop(basis, generator, tau, threads);
    prop.apply(p);
    for (double v : p)
        if (v < -1e-10)
            throw std::runtime_error("evolve_populations: population went negative");
    return p;
}

SteadyStateResult steady_state(const SparseOperator& generator,
                               std::span<const std::size_t> sector_indices) {
    const std::size_t n = sector_indices.size();
    Eigen::MatrixXd block = sector_block(generator, sector_indices);

    const double scale = std::max(block.cwiseAbs().maxCoeff(), 1.0);
    Eigen::MatrixXd scaled = block / scale;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(scaled);
    lu.setThreshold(1e-12 * static_cast<double>(n));

    SteadyStateResult result;
    result.nullity = static_cast<int>(n) - static_cast<int>(lu.rank());
    Eigen::VectorXd v;
    if (result.nullity >= 1) {
        v = lu.kernel().col(0);
    } else {
        // Threshold judged the matrix full rank; fall back to the smallest
        // singular direction.
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeFullV);
        v = svd.matrixV().col(static_cast<Eigen::Index>(n) - 1);
        result.nullity = 1;
    }
    if (v.sum() < 0.0)
        v = -v;
    v = v.cwiseMax(0.0);
    const double total = v.sum();
    if (total <= 0.0)
        throw std::runtime_error("steady_state: null vector is not a distribution");
    v /= total;
    result.residual = (block * v).cwiseAbs().maxCoeff() / scale;
    result.populations.assign(v.data(), v.data() + v.size());
    return result;
}

std::vector<double> apply_steady_shortcut(const CoupledBasis& basis,
                                          const SparseOperator& generator,
                                          std::span<const double> populations) {
    std::vector<double> out(populations.begin(), populations.end());
    for (const auto& sector : basis.sectors()) {
        double weight = 0.0;
        for (std::size_t i : sector.members)
            weight += out[i];
        if (weight <= 0.0)
            continue;
        const SteadyStateResult ss = steady_state(generator, sector.members);
        for (std::size_t k = 0; k < sector.members.size(); ++k)
            out[sector.members[k]] = weight * ss.populations[k];
    }
    return out;
}

} // namespace mbs
