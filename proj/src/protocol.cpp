#include "mbs/protocol.hpp"

#include <cmath>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>

#include "mbs/errors.hpp"
#include "mbs/lindblad.hpp"
#include "mbs/theory.hpp"

namespace mbs {

const char* protocol_mode_name(ProtocolMode m) {
    return m == ProtocolMode::Kinetic ? "kinetic" : "steady-shortcut";
}

ProtocolMode protocol_mode_from_name(const std::string& name) {
    if (name == "kinetic")
        return ProtocolMode::Kinetic;
    if (name == "steady-shortcut")
        return ProtocolMode::SteadyShortcut;
    throw std::invalid_argument("unknown protocol mode '" + name + "'");
}

ProtocolContext build_protocol_context(const BlockSystem& system, double rate_ratio,
                                       std::size_t dimension_cap, unsigned threads) {
    CoupledBasis basis_ab = couple_chain(system, Scheme::AB, dimension_cap);
    CoupledBasis basis_cd = couple_chain(system, Scheme::CD, dimension_cap);
    SparseOperator ab_to_cd = overlap_transform(basis_ab, basis_cd, threads);
    SparseOperator cd_to_ab = ab_to_cd.transposed();

    JumpSet jumps_ab;
    jumps_ab.push_back({total_lowering(basis_ab, threads), rate_ratio});
    jumps_ab.push_back({subset_raising_difference(basis_ab, Scheme::AB, threads), 1.0});
    JumpSet jumps_cd;
    jumps_cd.push_back({total_lowering(basis_cd, threads), rate_ratio});
    jumps_cd.push_back({subset_raising_difference(basis_cd, Scheme::CD, threads), 1.0});

    SparseOperator generator_ab = rate_matrix(basis_ab, jumps_ab);
    SparseOperator generator_cd = rate_matrix(basis_cd, jumps_cd);

    return {std::move(basis_ab), std::move(basis_cd), std::move(ab_to_cd),
            std::move(cd_to_ab), std::move(generator_ab), std::move(generator_cd)};
}

namespace {

std::vector<double> initial_populations(const CoupledBasis& basis, const ProtocolConfig& config) {
    if (config.initial_populations.empty())
        return std::vector<double>(basis.dimension(), 1.0 / static_cast<double>(basis.dimension()));
    if (config.initial_populations.size() != basis.dimension())
        throw std::invalid_argument("protocol: initial population vector has wrong dimension");
    double total = 0.0;
    for (double p : config.initial_populations) {
        if (p < 0.0)
            throw std::invalid_argument("protocol: negative initial population");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("protocol: initial populations must sum to 1");
    return config.initial_populations;
}

Checkpoint make_checkpoint(const CoupledBasis& basis, std::span<const double> populations,
                           int interval, double time) {
    Checkpoint cp;
    cp.interval = interval;
    cp.time = time;
    cp.total = 0.0;
    cp.min_population = 0.0;
    for (std::size_t i = 0; i < populations.size(); ++i) {
        const CoupledState& st = basis.state(i);
        cp.p_j[st.j] += populations[i];
        cp.p_multiplet[{st.j, st.top_j1(), st.top_j2()}] += populations[i];
        cp.total += populations[i];
        cp.min_population = std::min(cp.min_population, populations[i]);
    }
    cp.j_squared = 0.0;
    for (const auto& [j, p] : cp.p_j)
        cp.j_squared += j.value() * (j.value() + 1.0) * p;
    return cp;
}

} // namespace

ObservableSeries protocol_run(const ProtocolContext& ctx, const ProtocolConfig& config) {
    ObservableSeries series;
    series.rate_condition_min = rate_condition(ctx.basis_ab.system());
    series.rate_condition_ok = config.rate_ratio() > series.rate_condition_min;

    std::vector<double> p = initial_populations(ctx.basis_ab, config);
    series.points.push_back(make_checkpoint(ctx.basis_ab, p, 0, 0.0));

    const bool kinetic = config.mode == ProtocolMode::Kinetic;
    std::unique_ptr<SectorPropagator> prop_ab, prop_cd;
    if (kinetic) {
        prop_ab = std::make_unique<SectorPropagator>(ctx.basis_ab, ctx.generator_ab, config.tau,
                                                     config.threads);
        prop_cd = std::make_unique<SectorPropagator>(ctx.basis_cd, ctx.generator_cd, config.tau,
                                                     config.threads);
    }

    for (int k = 1; k <= config.intervals; ++k) {
        const bool odd = (k % 2) == 1;
        if (odd) {
            if (kinetic)
                prop_ab->apply(p);
            else
                p = apply_steady_shortcut(ctx.basis_ab, ctx.generator_ab, p);
        } else {
            p = map_populations(ctx.ab_to_cd, p);
            if (kinetic)
                prop_cd->apply(p);
            else
                p = apply_steady_shortcut(ctx.basis_cd, ctx.generator_cd, p);
            p = map_populations(ctx.cd_to_ab, p);
        }
        series.points.push_back(
            make_checkpoint(ctx.basis_ab, p, k, static_cast<double>(k) * config.tau));
    }
    series.final_populations = std::move(p);
    return series;
}

ObservableSeries protocol_run(const BlockSystem& system, const ProtocolConfig& config) {
    const ProtocolContext ctx = build_protocol_context(system, config.rate_ratio(),
                                                       config.dimension_cap, config.threads);
    return protocol_run(ctx, config);
}

AuditResult coherence_audit(const BlockSystem& system, const ProtocolConfig& config) {
    const std::size_t dim = system.product_dimension(config.dimension_cap);
    if (dim > kLindbladDimensionCap)
        throw DimensionCapError(dim, kLindbladDimensionCap);

    const ProtocolContext ctx = build_protocol_context(system, config.rate_ratio(),
                                                       config.dimension_cap, config.threads);
    const ObservableSeries diagonal = protocol_run(ctx, config);

    // All three jump operators expressed in the AB basis; the density
    // matrix never needs the basis switch, only the reporting does.
    const SparseOperator lower_ab = total_lowering(ctx.basis_ab);
    const SparseOperator raise_ab = subset_raising_difference(ctx.basis_ab, Scheme::AB);
    const SparseOperator raise_cd_in_ab = subset_raising_difference(ctx.basis_ab, Scheme::CD);

    JumpSet odd_jumps, even_jumps;
    odd_jumps.push_back({lower_ab, config.rate_ratio()});
    odd_jumps.push_back({raise_ab, 1.0});
    even_jumps.push_back({lower_ab, config.rate_ratio()});
    even_jumps.push_back({raise_cd_in_ab, 1.0});

    const std::vector<double> p0 = [&] {
        ProtocolConfig c = config;
        return c.initial_populations.empty()
                   ? std::vector<double>(dim, 1.0 / static_cast<double>(dim))
                   : c.initial_populations;
    }();
    DensityMatrix rho = DensityMatrix::Zero(static_cast<Eigen::Index>(dim),
                                            static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i)
        rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = p0[i];

    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
    for (const auto& e : ctx.ab_to_cd.entries())
        u(e.row, e.col) = e.value;

    const double checkpoint[] = {config.tau};
    AuditResult result;
    for (int k = 1; k <= config.intervals; ++k) {
        const bool odd = (k % 2) == 1;
        MasterSolution sol = integrate_master(rho, odd ? odd_jumps : even_jumps, checkpoint);
        rho = sol.states.back();

        const Eigen::MatrixXd rep = odd ? rho : Eigen::MatrixXd(u * rho * u.transpose());
        double offdiag = 0.0;
        for (Eigen::Index r = 0; r < rep.rows(); ++r)
            for (Eigen::Index c = 0; c < rep.cols(); ++c)
                if (r != c)
                    offdiag = std::max(offdiag, std::abs(rep(r, c)));

        std::map<HalfInt, double> p_j;
        for (std::size_t i = 0; i < dim; ++i)
            p_j[ctx.basis_ab.state(i).j] +=
                rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        double deviation = 0.0;
        for (const auto& [j, p] : diagonal.points[static_cast<std::size_t>(k)].p_j) {
            const auto it = p_j.find(j);
            const double full = it == p_j.end() ? 0.0 : it->second;
            deviation = std::max(deviation, std::abs(full - p));
        }

        result.boundaries.push_back(
            {k, static_cast<double>(k) * config.tau, offdiag, deviation});
        result.max_offdiag = std::max(result.max_offdiag, offdiag);
        result.max_p_deviation = std::max(result.max_p_deviation, deviation);
    }
    return result;
}

} // namespace mbs
