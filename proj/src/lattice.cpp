#include "mbs/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mbs {

GaussianEnvelope::GaussianEnvelope(Eigen::Vector2d center, double sigma)
    : center_(std::move(center)), sigma_(sigma) {
    if (sigma_ <= 0.0)
        throw std::domain_error("GaussianEnvelope: sigma must be positive");
}

double GaussianEnvelope::density(const Eigen::Vector3d& r) const {
    const Eigen::Vector2d d = r.head<2>() - center_;
    return std::exp(-d.squaredNorm() / (sigma_ * sigma_));
}

Eigen::Vector3d GaussianEnvelope::gradient(const Eigen::Vector3d& r) const {
    const Eigen::Vector2d d = r.head<2>() - center_;
    const double rho = density(r);
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    g.head<2>() = (-2.0 / (sigma_ * sigma_)) * rho * d;
    return g;
}

void LatticeModel::validate() const {
    if (!envelope)
        throw std::invalid_argument("lattice model: missing envelope");
    if (sites.empty())
        throw std::invalid_argument("lattice model: no sites");
    for (const LatticeSite& s : sites) {
        require_spin(s.spin, "lattice site spin");
        if (envelope->density(s.position) <= 0.0)
            throw std::invalid_argument("lattice model: vanishing electron density at a site");
    }
}

std::vector<double> dc_couplings(const LatticeModel& model) {
    model.validate();
    std::vector<double> a(model.sites.size());
    for (std::size_t n = 0; n < model.sites.size(); ++n)
        a[n] = model.coupling_scale * model.envelope->density(model.sites[n].position);
    return a;
}

std::vector<double> ac_couplings(const LatticeModel& model, const Eigen::Vector3d& mu) {
    model.validate();
    const double norm = mu.norm();
    if (norm <= 0.0)
        throw std::invalid_argument("ac_couplings: direction must be nonzero");
    const Eigen::Vector3d unit = mu / norm;
    std::vector<double> c(model.sites.size());
    for (std::size_t n = 0; n < model.sites.size(); ++n)
        c[n] = model.coupling_scale * unit.dot(model.envelope->gradient(model.sites[n].position));
    return c;
}

ShellPartition group_shells(const std::vector<double>& couplings, double rel_tol) {
    std::vector<std::size_t> order(couplings.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return couplings[a] > couplings[b]; });

    ShellPartition partition;
    partition.tolerance = rel_tol;
    for (std::size_t idx : order) {
        const double v = couplings[idx];
        if (!partition.shells.empty()) {
            Shell& shell = partition.shells.back();
            const double ref = shell.coupling;
            if (std::abs(v - ref) <= rel_tol * std::max(std::abs(ref), std::abs(v))) {
                shell.sites.push_back(idx);
                continue;
            }
        }
        partition.shells.push_back({v, {idx}});
    }
    // Representative value: mean over the shell.
    for (Shell& shell : partition.shells) {
        double sum = 0.0;
        for (std::size_t idx : shell.sites)
            sum += couplings[idx];
        shell.coupling = sum / static_cast<double>(shell.sites.size());
    }
    return partition;
}

AcDecomposition decompose_ac(const std::vector<double>& c, double rel_tol) {
    AcDecomposition out;
    const std::size_t n = c.size();
    double cmax = 0.0;
    for (double v : c)
        cmax = std::max(cmax, std::abs(v));
    if (cmax == 0.0)
        return out; // all-zero shell: empty decomposition

    const double zero_floor = 1e-12 * cmax;

    // Magnitude classes among the nonzero couplings.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(c[i]) > zero_floor)
            order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(c[a]) > std::abs(c[b]);
    });

    std::size_t k = 0;
    while (k < order.size()) {
        const double head = std::abs(c[order[k]]);
        std::vector<std::size_t> members;
        while (k < order.size() && std::abs(std::abs(c[order[k]]) - head) <= rel_tol * head)
            members.push_back(order[k++]);

        AcTerm term;
        term.signs.assign(n, 0);
        double magnitude_sum = 0.0;
        int positive = 0, negative = 0;
        for (std::size_t idx : members) {
            term.signs[idx] = c[idx] > 0.0 ? 1 : -1;
            magnitude_sum += std::abs(c[idx]);
            (c[idx] > 0.0 ? positive : negative)++;
        }
        term.amplitude = magnitude_sum / static_cast<double>(members.size());
        if (positive != negative) {
            out.ok = false;
            out.failure = "magnitude class " + std::to_string(out.terms.size()) + " has " +
                          std::to_string(positive) + " positive vs " + std::to_string(negative) +
                          " negative couplings";
        }
        out.terms.push_back(std::move(term));
    }

    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double rebuilt = 0.0;
        for (const AcTerm& t : out.terms)
            rebuilt += t.amplitude * t.signs[i];
        worst = std::max(worst, std::abs(rebuilt - c[i]));
    }
    out.residual = worst / cmax;
    return out;
}

const std::array<SiliconShell, 5>& silicon_shells() {
    static const std::array<SiliconShell, 5> table = {{
        {"A", 6.0, 6},
        {"B", 4.5, 12},
        {"C", 3.3, 4},
        {"D", 2.2, 12},
        {"F", 1.7, 12},
    }};
    return table;
}

DnspRates dnsp_rates(double a, double rabi, double zeeman, double trion_width, double a_tilde,
                     double esr_width) {
    if (zeeman <= 0.0 || trion_width <= 0.0 || esr_width <= 0.0)
        throw std::domain_error("dnsp_rates: widths and the Zeeman splitting must be positive");
    if (a < 0.0 || rabi < 0.0 || a_tilde < 0.0)
        throw std::domain_error("dnsp_rates: couplings must be nonnegative");
    DnspRates r;
    r.lambda_h = a * a * rabi * rabi / (zeeman * zeeman * trion_width);
    r.lambda_o = a_tilde * a_tilde / esr_width;
    return r;
}

LowLossReport low_loss_check(const RateBudget& budget, double hierarchy_factor) {
    if (budget.lambda_h < 0.0 || budget.lambda_o < 0.0 || budget.gamma_n < 0.0)
        throw std::domain_error("low_loss_check: rates must be nonnegative");
    if (budget.site_count <= 0)
        throw std::domain_error("low_loss_check: need a positive site count");
    require_spin(budget.spin, "low_loss_check spin");

    const double s = budget.spin.value();
    const double threshold = 4.0 * budget.site_count * s * s;
    const double polarization_headroom = budget.lambda_h / threshold;

    LowLossReport report;
    report.hierarchy_factor = hierarchy_factor;
    report.polarization_ok = polarization_headroom > budget.lambda_o;
    report.polarization_margin =
        budget.lambda_o > 0.0 ? polarization_headroom / budget.lambda_o
                              : std::numeric_limits<double>::infinity();
    const double required = hierarchy_factor * budget.gamma_n;
    report.decoherence_ok = budget.lambda_o >= required;
    report.decoherence_margin = required > 0.0 ? budget.lambda_o / required
                                               : std::numeric_limits<double>::infinity();
    return report;
}

} // namespace mbs
