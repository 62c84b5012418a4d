#pragma once

#include <Eigen/Core>

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "mbs/half_int.hpp"

namespace mbs {

// Electron density |psi(r)|^2 sampled at lattice sites. Positions are in
// units of the envelope width, so the built-in Gaussian has unit sigma.
class Envelope {
  public:
    virtual ~Envelope() = default;
    virtual double density(const Eigen::Vector3d& r) const = 0;
    virtual Eigen::Vector3d gradient(const Eigen::Vector3d& r) const = 0;
};

// 2D isotropic Gaussian in the x-y plane, constant along z.
class GaussianEnvelope final : public Envelope {
  public:
    GaussianEnvelope(Eigen::Vector2d center = Eigen::Vector2d::Zero(), double sigma = 1.0);
    double density(const Eigen::Vector3d& r) const override;
    Eigen::Vector3d gradient(const Eigen::Vector3d& r) const override;
    const Eigen::Vector2d& center() const { return center_; }
    double sigma() const { return sigma_; }

  private:
    Eigen::Vector2d center_;
    double sigma_;
};

struct LatticeSite {
    Eigen::Vector3d position;
    HalfInt spin;
};

struct LatticeModel {
    std::vector<LatticeSite> sites;
    std::shared_ptr<const Envelope> envelope;
    double coupling_scale = 1.0; // frequency units

    void validate() const;
};

// dc hyperfine couplings a_n = scale * |psi(r_n)|^2.
std::vector<double> dc_couplings(const LatticeModel& model);

// ac hyperfine couplings c_n proportional to the density gradient along the
// drive direction mu (normalized internally).
std::vector<double> ac_couplings(const LatticeModel& model, const Eigen::Vector3d& mu);

struct Shell {
    double coupling;                // representative dc value
    std::vector<std::size_t> sites; // indices into the model
};

struct ShellPartition {
    std::vector<Shell> shells; // descending coupling
    double tolerance;
};

// Clusters sites by dc coupling within a relative tolerance.
ShellPartition group_shells(const std::vector<double>& couplings, double rel_tol = 1e-9);

// One raising-operator term a~_k (j_X^+ - j_Y^+): sign +1 on subset X,
// -1 on subset Y, 0 elsewhere, indexed like the input sites.
struct AcTerm {
    double amplitude;
    std::vector<int> signs;
};

struct AcDecomposition {
    std::vector<AcTerm> terms;
    bool ok = true;
    double residual = 0.0;     // max |reconstruction - c_n| / max |c_n|
    std::string failure;       // set when ok is false
};

// Splits a shell's ac couplings into zero-sum equal-magnitude terms. Fails
// (ok = false) when a magnitude class has unbalanced signs.
AcDecomposition decompose_ac(const std::vector<double>& shell_couplings, double rel_tol = 1e-9);

struct SiliconShell {
    std::string label;
    double coupling_mhz;
    int site_count;
};

// Measured coordination shells of the phosphorus donor in silicon.
const std::array<SiliconShell, 5>& silicon_shells();

struct DnspRates {
    double lambda_h; // dc polarization rate
    double lambda_o; // ac polarization rate
};

// lambda_h = a^2 Omega^2 / (omega_e^2 gamma_t), lambda_o = a~^2 / gamma_s.
// All inputs in one consistent frequency unit; denominators must be
// positive, numerators nonnegative.
DnspRates dnsp_rates(double a, double rabi, double zeeman, double trion_width, double a_tilde,
                     double esr_width);

struct RateBudget {
    double lambda_h;
    double lambda_o;
    double gamma_n; // single-spin decoherence rate
    int site_count;
    HalfInt spin;
};

struct LowLossReport {
    bool polarization_ok;      // lambda_h / (4 N s^2) > lambda_o
    bool decoherence_ok;       // lambda_o >= factor * gamma_n
    double polarization_margin; // lambda_h / (4 N s^2) / lambda_o
    double decoherence_margin;  // lambda_o / (factor * gamma_n)
    double hierarchy_factor;

    bool ok() const { return polarization_ok && decoherence_ok; }
};

LowLossReport low_loss_check(const RateBudget& budget, double hierarchy_factor = 100.0);

} // namespace mbs
