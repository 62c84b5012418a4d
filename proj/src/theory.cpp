#include "mbs/theory.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "mbs/collective_ops.hpp"

namespace mbs {

namespace {

// Coherent-state indices grouped by J, each entry (state index, alpha).
std::map<int, std::vector<std::size_t>> coherent_by_j(const CoupledBasis& basis) {
    std::map<int, std::vector<std::size_t>> out;
    for (std::size_t i : basis.coherent_states())
        out[basis.state(i).j.twice()].push_back(i);
    return out;
}

template <typename Visit>
void for_each_adjacent_pair(const CoupledBasis& basis, const SparseOperator& op, Visit visit) {
    const auto groups = coherent_by_j(basis);
    for (const auto& [jt, lower_states] : groups) {
        auto upper_it = groups.find(jt + 2);
        if (upper_it == groups.end())
            continue;
        const HalfInt j = HalfInt::from_twice(jt);
        for (std::size_t lower : lower_states) {
            for (std::size_t upper : upper_it->second) {
                const CoupledState& up = basis.state(upper);
                // |J+1,-J+1,alpha'>, two rungs above the coherent state.
                const auto raised = basis.find(up.j, HalfInt::from_twice(up.m.twice() + 4),
                                               up.alpha);
                // |J+1, -J+1, alpha'> always exists alongside |J+1, -J-1, alpha'>.
                const double num = op.coeff(*raised, lower);
                const double den = op.coeff(lower, upper);
                visit(j, lower, upper, num, den);
            }
        }
    }
}

} // namespace

double identity_ratio_reference(HalfInt j) {
    return -1.0 / std::sqrt((j.value() + 1.0) * (2.0 * j.value() + 1.0));
}

std::vector<RatioSample> scan_ratio_identity(const CoupledBasis& basis,
                                             const SparseOperator& raising_op,
                                             double denominator_floor) {
    std::vector<RatioSample> samples;
    for_each_adjacent_pair(basis, raising_op,
                           [&](HalfInt j, std::size_t lower, std::size_t upper, double num,
                               double den) {
                               if (std::abs(den) <= denominator_floor)
                                   return;
                               samples.push_back({j, lower, upper, num, den, num / den,
                                                  identity_ratio_reference(j)});
                           });
    return samples;
}

double ratio_product_residual(const CoupledBasis& basis, const SparseOperator& raising_op) {
    double worst = 0.0;
    for_each_adjacent_pair(basis, raising_op,
                           [&](HalfInt j, std::size_t, std::size_t, double num, double den) {
                               worst = std::max(worst,
                                                std::abs(num - identity_ratio_reference(j) * den));
                           });
    return worst;
}

double selection_rule_scan(const CoupledBasis& basis, const SparseOperator& raising_op) {
    // A raising operator only ever produces M' = M + 1 = -J + 1 from a
    // coherent state, so M violations are structural zeros; the scan
    // reduces to |J' - J| > 1 within the stored entries.
    double worst = 0.0;
    for (std::size_t i : basis.coherent_states()) {
        const int jt = basis.state(i).j.twice();
        for (const auto& e : raising_op.column(i)) {
            if (std::abs(basis.state(e.row).j.twice() - jt) > 2)
                worst = std::max(worst, std::abs(e.value));
        }
    }
    return worst;
}

std::vector<AsymmetrySample> transfer_rate_asymmetry(const CoupledBasis& basis,
                                                     const SparseOperator& raising_op) {
    std::vector<AsymmetrySample> samples;
    for_each_adjacent_pair(basis, raising_op,
                           [&](HalfInt j, std::size_t, std::size_t, double num, double den) {
                               if (num == 0.0 && den == 0.0)
                                   return;
                               const double fwd = den * den, bwd = num * num;
                               samples.push_back({j, fwd / bwd,
                                                  (j.value() + 1.0) * (2.0 * j.value() + 1.0)});
                           });
    return samples;
}

IdentitySuiteReport identity_suite(const BlockSystem& system, int superpositions,
                                   std::uint64_t seed, std::size_t dimension_cap,
                                   unsigned threads) {
    IdentitySuiteReport report;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(0.25, 1.0);

    for (Scheme scheme : {Scheme::AB, Scheme::CD}) {
        const CoupledBasis basis = couple_chain(system, scheme, dimension_cap);
        const SparseOperator op_ab = subset_raising_difference(basis, Scheme::AB, threads);
        const SparseOperator op_cd = subset_raising_difference(basis, Scheme::CD, threads);

        std::vector<SparseOperator> ops;
        ops.push_back(op_ab);
        ops.push_back(op_cd);
        for (int k = 0; k < superpositions; ++k) {
            const double a1 = mag(rng) * (rng() & 1 ? 1.0 : -1.0);
            const double a2 = mag(rng) * (rng() & 1 ? 1.0 : -1.0);
            ops.push_back(SparseOperator::linear_combination(a1, op_ab, a2, op_cd));
        }

        for (const SparseOperator& op : ops) {
            for (const RatioSample& s : scan_ratio_identity(basis, op)) {
                report.max_ratio_deviation =
                    std::max(report.max_ratio_deviation, std::abs(s.measured - s.reference));
                ++report.pairs_checked;
            }
            report.max_product_residual =
                std::max(report.max_product_residual, ratio_product_residual(basis, op));
            report.max_selection_violation =
                std::max(report.max_selection_violation, selection_rule_scan(basis, op));
        }
        for (const AsymmetrySample& s : transfer_rate_asymmetry(basis, op_ab))
            report.max_asymmetry_deviation = std::max(
                report.max_asymmetry_deviation, std::abs(s.measured - s.reference) / s.reference);
    }
    return report;
}

SteadyDistribution steady_distribution(HalfInt j_max, HalfInt j_min) {
    if (j_min.twice() < 0 || j_max < j_min)
        throw std::domain_error("steady_distribution: need j_max >= j_min >= 0");
    if (((j_max.twice() - j_min.twice()) & 1) != 0)
        throw std::domain_error("steady_distribution: j_max and j_min on different ladders");
    SteadyDistribution d;
    d.j_min = j_min;
    d.j_max = j_max;
    double value = 1.0;
    d.f[j_min] = value;
    for (HalfInt j = j_min; j < j_max; j = j + HalfInt(1)) {
        value /= (j.value() + 1.0) * (2.0 * j.value() + 1.0);
        d.f[j + HalfInt(1)] = value;
    }
    return d;
}

GSeries g_series(int j_max) {
    GSeries s;
    s.g.resize(j_max + 1);
    s.partial_sums.resize(j_max + 1);
    double product = 1.0; // prod_{i<J} (i+1)(2i+1)
    for (int j = 0; j <= j_max; ++j) {
        if (j > 0)
            product *= static_cast<double>(j) * (2.0 * j - 1.0);
        s.g[j] = (2.0 * j + 1.0) / product;
        s.partial_sums[j] = (j > 0 ? s.partial_sums[j - 1] : 0.0) + s.g[j];
    }
    return s;
}

double mbs_floor(int j_max) {
    return 1.0 / g_series(j_max).partial_sums.back();
}

double variance_bound(int j_max) {
    const GSeries s = g_series(j_max);
    double weighted = 0.0;
    for (int j = 0; j <= j_max; ++j)
        weighted += j * (j + 1.0) * s.g[j];
    return weighted / s.partial_sums.back();
}

MultipletReport multiplet_count(const CoupledBasis& basis) {
    MultipletReport report;
    for (std::size_t i : basis.coherent_states())
        ++report.count[basis.state(i).j];
    const auto zero = report.count.find(HalfInt(0));
    const std::size_t n0 = zero == report.count.end() ? 0 : zero->second;
    for (const auto& [j, n] : report.count) {
        report.dimension += n * static_cast<std::size_t>(j.multiplicity());
        if (n > n0 * static_cast<std::size_t>(j.multiplicity()))
            report.bound_holds = false;
    }
    return report;
}

double rate_condition(const BlockSystem& system) {
    const double total = system.total_spin().value();
    return total * total;
}

double unentangled_bound(double variance, double s_bar) {
    if (s_bar <= 0.0)
        throw std::domain_error("unentangled_bound: mean spin must be positive");
    if (variance < 0.0)
        throw std::domain_error("unentangled_bound: variance must be nonnegative");
    return variance / s_bar;
}

} // namespace mbs
