#include "mbs/collective_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mbs/parallel.hpp"

namespace mbs {

namespace {

struct ProductLayout {
    std::vector<std::size_t> stride;
    std::vector<std::size_t> dim;
    // amp[b][k] = ladder amplitude from digit k of block b.
    std::vector<std::vector<double>> amp;
};

ProductLayout make_layout(const BlockSystem& system, LadderDirection dir) {
    const std::size_t n = system.size();
    ProductLayout L;
    L.stride.assign(n, 1);
    L.dim.resize(n);
    L.amp.resize(n);
    for (std::size_t b = 0; b < n; ++b)
        L.dim[b] = static_cast<std::size_t>(system.block(b).spin.multiplicity());
    for (std::size_t b = n; b-- > 1;)
        L.stride[b - 1] = L.stride[b] * L.dim[b];
    for (std::size_t b = 0; b < n; ++b) {
        const double s = system.block(b).spin.value();
        L.amp[b].assign(L.dim[b], 0.0);
        for (std::size_t k = 0; k < L.dim[b]; ++k) {
            const double m = -s + static_cast<double>(k);
            const double target = dir == LadderDirection::Raise ? m + 1.0 : m - 1.0;
            if (target > s || target < -s)
                continue;
            L.amp[b][k] = std::sqrt(s * (s + 1.0) - m * target);
        }
    }
    return L;
}

SparseVector apply_ladder(const ProductLayout& L, std::span<const double> weights,
                          LadderDirection dir, const SparseVector& in) {
    SparseVector out;
    const std::size_t n = L.dim.size();
    for (const auto& e : in.entries) {
        std::size_t rest = e.index;
        for (std::size_t b = 0; b < n; ++b) {
            const std::size_t digit = rest / L.stride[b];
            rest %= L.stride[b];
            if (weights[b] == 0.0)
                continue;
            const double a = L.amp[b][digit];
            if (a == 0.0)
                continue;
            const std::size_t shifted =
                dir == LadderDirection::Raise ? e.index + L.stride[b] : e.index - L.stride[b];
            out.entries.push_back(
                {static_cast<std::uint32_t>(shifted), weights[b] * a * e.value});
        }
    }
    out.normalize();
    return out;
}

enum class Conservation { FullAlpha, ChainPrefix, MOnly };

// Uniform weights on each top-level subset commute with both subset spins;
// weights uniform only within intersection classes still conserve every
// class-internal label.
Conservation classify_weights(const BlockSystem& system, Scheme basis_scheme,
                              std::span<const double> weights) {
    bool per_class = true;
    double class_value[4];
    bool class_seen[4] = {false, false, false, false};
    for (std::size_t b = 0; b < system.size(); ++b) {
        const int c = static_cast<int>(system.block(b).membership);
        if (!class_seen[c]) {
            class_seen[c] = true;
            class_value[c] = weights[b];
        } else if (weights[b] != class_value[c]) {
            per_class = false;
        }
    }
    if (!per_class)
        return Conservation::MOnly;

    auto same_or_unseen = [&](int c1, int c2) {
        if (!class_seen[c1] || !class_seen[c2])
            return true;
        return class_value[c1] == class_value[c2];
    };
    const bool subset_uniform =
        basis_scheme == Scheme::AB
            ? same_or_unseen(0, 1) && same_or_unseen(2, 3)   // AC~AD, BC~BD
            : same_or_unseen(0, 2) && same_or_unseen(1, 3);  // AC~BC, AD~BD
    return subset_uniform ? Conservation::FullAlpha : Conservation::ChainPrefix;
}

} // namespace

SparseOperator collective_ladder(const CoupledBasis& basis, std::span<const double> weights,
                                 LadderDirection direction, unsigned threads) {
    const BlockSystem& system = basis.system();
    if (weights.size() != system.size())
        throw std::invalid_argument("collective_ladder: one weight per block required");
    for (double w : weights)
        if (!std::isfinite(w))
            throw std::invalid_argument("collective_ladder: weights must be finite");

    const ProductLayout layout = make_layout(system, direction);
    const Conservation conserved = classify_weights(system, basis.scheme(), weights);
    const int dm = direction == LadderDirection::Raise ? 2 : -2;

    // Columns are independent; entries land in per-column slots so the
    // result does not depend on the thread count.
    std::vector<std::vector<std::pair<std::size_t, double>>> columns(basis.dimension());
    parallel_for(basis.dimension(), threads, [&](std::size_t i) {
        const CoupledState& src = basis.state(i);
        const SparseVector image = apply_ladder(layout, weights, direction, src.amplitudes);
        if (image.entries.empty())
            return;
        const HalfInt m_target = HalfInt::from_twice(src.m.twice() + dm);

        if (conserved == Conservation::FullAlpha) {
            const auto& sector = basis.sectors()[basis.sector_of(i)];
            for (std::size_t f : sector.members) {
                if (basis.state(f).m != m_target)
                    continue;
                const double v = dot(basis.state(f).amplitudes, image);
                if (v != 0.0)
                    columns[i].emplace_back(f, v);
            }
        } else {
            for (std::size_t f : basis.states_with_m(m_target)) {
                const CoupledState& dst = basis.state(f);
                if (conserved == Conservation::ChainPrefix &&
                    !std::equal(src.alpha.begin(), src.alpha.end() - 2, dst.alpha.begin(),
                                dst.alpha.end() - 2))
                    continue;
                const double v = dot(dst.amplitudes, image);
                if (v != 0.0)
                    columns[i].emplace_back(f, v);
            }
        }
    });

    SparseOperator op(basis.dimension(), basis.dimension());
    for (std::size_t i = 0; i < basis.dimension(); ++i)
        for (const auto& [f, v] : columns[i])
            op.add(f, i, v);
    op.finalize();
    return op;
}

SparseOperator total_lowering(const CoupledBasis& basis, unsigned threads) {
    const auto w = basis.system().uniform_weights();
    return collective_ladder(basis, w, LadderDirection::Lower, threads);
}

SparseOperator subset_raising_difference(const CoupledBasis& basis, Scheme scheme,
                                         unsigned threads) {
    const auto w = basis.system().signed_weights(scheme);
    return collective_ladder(basis, w, LadderDirection::Raise, threads);
}

SparseOperator overlap_transform(const CoupledBasis& from, const CoupledBasis& to,
                                 unsigned threads) {
    if (!(from.system() == to.system()))
        throw std::invalid_argument("overlap_transform: bases belong to different systems");

    std::vector<std::vector<std::pair<std::size_t, double>>> columns(from.dimension());
    parallel_for(from.dimension(), threads, [&](std::size_t i) {
        const CoupledState& src = from.state(i);
        for (std::size_t f : to.states_with_jm(src.j, src.m)) {
            const double v = dot(to.state(f).amplitudes, src.amplitudes);
            if (v != 0.0)
                columns[i].emplace_back(f, v);
        }
    });

    SparseOperator u(to.dimension(), from.dimension());
    for (std::size_t i = 0; i < from.dimension(); ++i)
        for (const auto& [f, v] : columns[i])
            u.add(f, i, v);
    u.finalize();
    return u;
}

std::vector<double> map_populations(const SparseOperator& transform,
                                    std::span<const double> populations) {
    if (populations.size() != transform.cols())
        throw std::invalid_argument("map_populations: dimension mismatch");
    std::vector<double> out(transform.rows(), 0.0);
    for (const auto& e : transform.entries())
        out[e.row] += e.value * e.value * populations[e.col];
    return out;
}

} // namespace mbs
