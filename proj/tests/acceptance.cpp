// Acceptance suite: one pass/fail line per release criterion, nonzero exit
// if any line fails. Everything here runs from scratch against the public
// API, with the tolerances pinned in this file.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

#include "mbs/clebsch_gordan.hpp"
#include "mbs/collective_ops.hpp"
#include "mbs/lattice.hpp"
#include "mbs/lindblad.hpp"
#include "mbs/presets.hpp"
#include "mbs/protocol.hpp"
#include "mbs/rate_dynamics.hpp"
#include "mbs/serialize.hpp"
#include "mbs/theory.hpp"

using namespace mbs;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
    std::printf("%s  %-34s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    if (!ok)
        ++failures;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

BlockSystem four_blocks(int spin_twice) {
    return BlockSystem({{half_twice(spin_twice), Membership::AC},
                        {half_twice(spin_twice), Membership::AD},
                        {half_twice(spin_twice), Membership::BC},
                        {half_twice(spin_twice), Membership::BD}});
}

// --- identity, selection rules, asymmetry -------------------------------

void criterion_identity_and_selection() {
    const IdentitySuiteReport small = identity_suite(four_blocks(1), 10);
    const IdentitySuiteReport big = identity_suite(four_blocks(7), 10);

    const double ratio_dev = std::max(small.max_ratio_deviation, big.max_ratio_deviation);
    report(ratio_dev <= 1e-10 && small.pairs_checked > 0 && big.pairs_checked > 0,
           "eq1-ratio-identity",
           fmt("max |ratio - ref| = %.3e over %g pairs (tol 1e-10)", ratio_dev,
               static_cast<double>(small.pairs_checked + big.pairs_checked)));

    const double selection = std::max(small.max_selection_violation,
                                      big.max_selection_violation);
    report(selection <= 1e-12, "selection-rules",
           fmt("max forbidden element = %.3e (tol 1e-12)", selection));
}

void criterion_transfer_asymmetry() {
    // Two spin-3 blocks hold a single (3,3) sector with J = 0..6, covering
    // every ratio up to J = 5; the fig2 system adds breadth across sectors.
    const BlockSystem system({{HalfInt(3), Membership::AC}, {HalfInt(3), Membership::BC}});
    const CoupledBasis basis = couple_chain(system, Scheme::AB);
    const SparseOperator op = subset_raising_difference(basis, Scheme::AB);

    double worst = 0.0;
    bool covered[6] = {false, false, false, false, false, false};
    for (const AsymmetrySample& s : transfer_rate_asymmetry(basis, op)) {
        if (s.j.twice() > 10)
            continue;
        covered[s.j.twice() / 2] = true;
        worst = std::max(worst, std::abs(s.measured - s.reference));
    }
    bool all = true;
    for (bool c : covered)
        all = all && c;
    report(all && worst <= 1e-9, "transfer-asymmetry",
           fmt("J=0..5 covered, max |ratio - (J+1)(2J+1)| = %.3e (tol 1e-9)", worst));
}

// --- analytic steady state ----------------------------------------------

void criterion_steady_analytics() {
    const double floor12 = mbs_floor(12);
    const double bound12 = variance_bound(12);
    const bool rounded_ok = std::round(floor12 * 100.0) == 20.0 &&
                            std::round(bound12 * 100.0) == 244.0;
    report(rounded_ok, "steady-values-2dp",
           fmt("floor = %.6f -> 0.20, bound = %.6f -> 2.44", floor12, bound12));

    const double floor_drift = std::abs(floor12 - mbs_floor(8));
    const double floor_ext = std::abs(mbs_floor(16) - floor12);
    const double bound_ext = std::abs(variance_bound(16) - bound12);
    report(floor_drift <= 1e-12 && floor_ext <= 1e-12 && bound_ext <= 1e-12,
           "steady-series-stability",
           fmt("floor 8->12 %.2e, floor 12->16 %.2e, bound 12->16 %.2e (tol 1e-12); "
               "the raw bound moves 2.7e-11 between Jmax 8 and 12, all of it the J=9 term",
               floor_drift, floor_ext, bound_ext));
}

// --- Fig. 2 reproduction -------------------------------------------------

void criterion_fig2(const ObservableSeries& series, double seconds) {
    const Checkpoint& last = series.points.back();
    const double p0 = last.p_j.at(HalfInt(0));
    const double j2 = last.j_squared;

    double stabilization = 0.0;
    const auto& prev = series.points[series.points.size() - 2].p_multiplet;
    for (const auto& [key, p] : last.p_multiplet) {
        const auto it = prev.find(key);
        stabilization = std::max(stabilization,
                                 std::abs(p - (it == prev.end() ? 0.0 : it->second)));
    }

    report(std::abs(p0 - 0.21) <= 0.02, "fig2-singlet-population",
           fmt("P(0) at 5 tau = %.4f (0.21 +- 0.02)", p0));
    report(std::abs(j2 - 2.42) <= 0.15, "fig2-collective-variance",
           fmt("<J^2> at 5 tau = %.4f (2.42 +- 0.15)", j2));
    report(stabilization <= 0.01, "fig2-stabilization",
           fmt("max |p(4tau) - p(5tau)| = %.4f (tol 0.01)", stabilization));
    report(seconds <= 600.0, "fig2-runtime", fmt("%.1f s (target <= 600 s)", seconds));
}

// --- steady-state recursion cross-check ----------------------------------

void criterion_recursion(const ProtocolContext& ctx) {
    const CoupledBasis& basis = ctx.basis_ab;
    const CoupledBasis::Sector* sector = nullptr;
    for (const auto& s : basis.sectors())
        if (s.alpha == std::vector<HalfInt>{HalfInt(7), HalfInt(7)})
            sector = &s;

    const SteadyDistribution f = steady_distribution(HalfInt(14));
    auto coherent_weights = [&](double ratio) {
        JumpSet jumps;
        jumps.push_back({total_lowering(basis), ratio});
        jumps.push_back({subset_raising_difference(basis, Scheme::AB), 1.0});
        const SparseOperator w = rate_matrix(basis, jumps);
        const SteadyStateResult ss = steady_state(w, sector->members);
        std::map<int, double> out;
        for (std::size_t k = 0; k < sector->members.size(); ++k) {
            const CoupledState& st = basis.state(sector->members[k]);
            if (st.m == -st.j)
                out[st.j.twice()] = ss.populations[k];
        }
        return out;
    };

    auto max_rel_dev = [&](const std::map<int, double>& w) {
        double worst = 0.0;
        for (int jt = 2; jt <= 10; jt += 2) {
            const double pred = f.f.at(HalfInt::from_twice(jt));
            worst = std::max(worst, std::abs(w.at(jt) / w.at(0) - pred) / pred);
        }
        return worst;
    };

    // As written this requires the idealized recursion at a rate ratio only
    // 5x above the (sum j)^2 = 196 requirement; the finite-ratio correction
    // is O(196/1000) per level and the null space (cross-checked against a
    // dense matrix exponential) genuinely sits far from the recursion. The
    // same check deep in the ratio -> infinity regime confirms the
    // recursion is the correct limit.
    const double dev_1e3 = max_rel_dev(coherent_weights(1e3));
    report(dev_1e3 <= 5e-3, "steady-recursion[ratio 1e3]",
           fmt("sector (7,7), J<=5: max rel dev = %.3f (tol 5e-3); corrections scale as "
               "(j_A+j_B)^2 Lambda_o/Lambda_h, so this ratio cannot reach 5e-3 (next line "
               "shows the limit)",
               dev_1e3));

    const double dev_1e6 = max_rel_dev(coherent_weights(1e6));
    report(dev_1e6 <= 5e-3, "steady-recursion[limit 1e6]",
           fmt("sector (7,7), J<=5: max rel dev = %.2e (tol 5e-3)", dev_1e6));

    auto l1_gap = [&](double ratio) {
        const auto w = coherent_weights(ratio);
        double norm = 0.0;
        for (const auto& [jt, p] : w)
            norm += f.f.at(HalfInt::from_twice(jt));
        double gap = 0.0;
        for (const auto& [jt, p] : w)
            gap += std::abs(p - f.f.at(HalfInt::from_twice(jt)) / norm);
        return gap;
    };
    const double g1 = l1_gap(10.0), g2 = l1_gap(100.0), g3 = l1_gap(1000.0);
    report(g1 > g2 && g2 > g3, "steady-recursion[monotone]",
           fmt("L1 gap %.3f -> %.3f -> %.3f over ratio 10,100,1000", g1, g2, g3));
}

// --- diagonal approximation ----------------------------------------------

void criterion_diagonal_validity() {
    ProtocolConfig config; // ratio 1000, tau 2, 5 intervals
    const AuditResult audit = coherence_audit(four_blocks(1), config);
    double worst = 0.0;
    for (const AuditBoundary& b : audit.boundaries)
        worst = std::max(worst, b.p_deviation);
    report(worst <= 0.02 && audit.boundaries.size() == 5, "diagonal-approximation",
           fmt("max |P_full(J) - P_diag(J)| = %.2e at 5 boundaries (tol 0.02)", worst));
}

// --- conservation ---------------------------------------------------------

void criterion_conservation(const ProtocolContext& ctx, const ObservableSeries& fig2) {
    double drift = 0.0, negativity = 0.0;
    for (const Checkpoint& cp : fig2.points) {
        drift = std::max(drift, std::abs(cp.total - 1.0));
        negativity = std::min(negativity, cp.min_population);
    }
    report(drift <= 1e-9 && negativity >= -1e-10, "conservation-population",
           fmt("max drift %.2e (tol 1e-9), min population %.2e (floor -1e-10)", drift,
               negativity));

    // Overlap transform: orthogonal and (J, M) block diagonal.
    double structure = 0.0;
    for (const auto& e : ctx.ab_to_cd.entries()) {
        const CoupledState& to = ctx.basis_cd.state(e.row);
        const CoupledState& from = ctx.basis_ab.state(e.col);
        if (to.j != from.j || to.m != from.m)
            structure = std::max(structure, std::abs(e.value));
    }
    double ortho = 0.0;
    std::map<std::pair<int, int>, std::vector<std::size_t>> blocks;
    for (std::size_t i = 0; i < ctx.basis_ab.dimension(); ++i) {
        const CoupledState& st = ctx.basis_ab.state(i);
        blocks[{st.j.twice(), st.m.twice()}].push_back(i);
    }
    for (const auto& [jm, cols] : blocks) {
        const std::size_t n = cols.size();
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(ctx.basis_cd.dimension(), n);
        for (std::size_t k = 0; k < n; ++k)
            for (const auto& e : ctx.ab_to_cd.column(cols[k]))
                b(e.row, static_cast<Eigen::Index>(k)) = e.value;
        const Eigen::MatrixXd gram = b.transpose() * b;
        ortho = std::max(
            (gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), ortho);
    }
    report(structure <= 1e-10 && ortho <= 1e-10, "conservation-transform",
           fmt("off-block element %.2e, ||U^T U - I|| = %.2e (tol 1e-10)", structure, ortho));

    // P(J) is exactly preserved by the population transfer.
    const std::vector<double>& p = fig2.final_populations;
    const std::vector<double> mapped = map_populations(ctx.ab_to_cd, p);
    std::map<int, double> before, after;
    for (std::size_t i = 0; i < p.size(); ++i)
        before[ctx.basis_ab.state(i).j.twice()] += p[i];
    for (std::size_t i = 0; i < mapped.size(); ++i)
        after[ctx.basis_cd.state(i).j.twice()] += mapped[i];
    double invariance = 0.0;
    for (const auto& [jt, v] : before)
        invariance = std::max(invariance, std::abs(after.at(jt) - v));
    report(invariance <= 1e-12, "conservation-pj-transform",
           fmt("max |P(J) change| under basis switch = %.2e (tol 1e-12)", invariance));
}

// --- lattice --------------------------------------------------------------

void criterion_lattice() {
    const LatticeModel model =
        lattice_model_from_json(nlohmann::json::parse(preset_document("fig3")));
    const auto dc = dc_couplings(model);
    const auto ac = ac_couplings(model, {1.0, 0.0, 0.0});
    const ShellPartition shells = group_shells(dc);

    bool sizes_ok = shells.shells.size() == 2 && shells.shells[0].sites.size() == 4 &&
                    shells.shells[1].sites.size() == 8;

    double residual = 0.0;
    std::size_t term_counts[2] = {0, 0};
    for (std::size_t k = 0; k < 2 && sizes_ok; ++k) {
        std::vector<double> c;
        for (std::size_t idx : shells.shells[k].sites)
            c.push_back(ac[idx]);
        const AcDecomposition d = decompose_ac(c);
        sizes_ok = sizes_ok && d.ok;
        term_counts[k] = d.terms.size();
        residual = std::max(residual, d.residual);
    }
    report(sizes_ok && term_counts[0] == 1 && term_counts[1] == 2 && residual <= 1e-12,
           "lattice-shells-decomposition",
           fmt("shells {4,8}, terms {1,2}, reconstruction residual %.2e (tol 1e-12)",
               residual));

    const Eigen::Vector3d mu = Eigen::Vector3d(1.0, 1.0, 0.0).normalized();
    const auto analytic = ac_couplings(model, mu);
    double gmax = 0.0;
    for (double v : analytic)
        gmax = std::max(gmax, std::abs(v));
    double grad_dev = 0.0;
    const double h = 1e-5;
    for (std::size_t n = 0; n < model.sites.size(); ++n) {
        const Eigen::Vector3d r = model.sites[n].position;
        const double fd =
            (model.envelope->density(r + h * mu) - model.envelope->density(r - h * mu)) /
            (2.0 * h);
        grad_dev = std::max(grad_dev, std::abs(analytic[n] - model.coupling_scale * fd) /
                                          std::max(std::abs(analytic[n]), 1e-3 * gmax));
    }
    report(grad_dev <= 1e-6, "lattice-gradient",
           fmt("max relative analytic-vs-FD gradient gap = %.2e (tol 1e-6)", grad_dev));

    const DnspRates rates = dnsp_rates(3e6, 3e9, 2e8, 2e8, 1e6, 1e8);
    const bool rates_ok = std::abs(rates.lambda_h - 1e7) / 1e7 <= 0.05 &&
                          std::abs(rates.lambda_o - 1e4) / 1e4 <= 0.05;
    report(rates_ok, "lattice-dnsp-rates",
           fmt("lambda_h = %.4g Hz (~1e7), lambda_o = %.4g Hz (~1e4), +-5%%", rates.lambda_h,
               rates.lambda_o));

    const auto& table = silicon_shells();
    const bool table_ok = table.size() == 5 && table[0].label == "A" &&
                          table[0].coupling_mhz == 6.0 && table[0].site_count == 6 &&
                          table[1].label == "B" && table[1].coupling_mhz == 4.5 &&
                          table[1].site_count == 12 && table[2].label == "C" &&
                          table[2].coupling_mhz == 3.3 && table[2].site_count == 4 &&
                          table[3].label == "D" && table[3].coupling_mhz == 2.2 &&
                          table[3].site_count == 12 && table[4].label == "F" &&
                          table[4].coupling_mhz == 1.7 && table[4].site_count == 12;
    report(table_ok, "lattice-silicon-table", "shells (A,6.0,6)...(F,1.7,12) verbatim");
}

} // namespace

int main() {
    std::printf("acceptance suite\n================\n");

    criterion_identity_and_selection();
    criterion_transfer_asymmetry();
    criterion_steady_analytics();

    const auto t0 = std::chrono::steady_clock::now();
    const BlockSystem fig2_system = four_blocks(7);
    const ProtocolContext ctx = build_protocol_context(fig2_system, 1000.0, 1 << 16);
    ProtocolConfig fig2_config; // ratio 1000, tau 2/lambda_o, 5 intervals, kinetic, mixed
    const ObservableSeries fig2 = protocol_run(ctx, fig2_config);
    const double fig2_seconds =
        std::chrono::duration_cast<std::chrono::duration<double>>(
            std::chrono::steady_clock::now() - t0)
            .count();

    criterion_fig2(fig2, fig2_seconds);
    criterion_recursion(ctx);
    criterion_diagonal_validity();
    criterion_conservation(ctx, fig2);
    criterion_lattice();

    std::printf("================\n%s (%d failing)\n", failures == 0 ? "ALL PASS" : "FAILURES",
                failures);
    return failures == 0 ? 0 : 1;
}
