// mbs: drives spin ensembles toward many-body singlets with collective
// raising/lowering dissipation, and analyzes the hyperfine couplings that
// realize those operators around a confined electron.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mbs/errors.hpp"
#include "mbs/lattice.hpp"
#include "mbs/lindblad.hpp"
#include "mbs/presets.hpp"
#include "mbs/protocol.hpp"
#include "mbs/serialize.hpp"
#include "mbs/theory.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitInput = 2;
constexpr int kExitResource = 3;

struct Document {
    json body;
    std::string source; // "preset:NAME" or the file path
    std::string digest;
};

Document load_document(const std::string& preset, const std::string& config_path) {
    if (!preset.empty() && !config_path.empty())
        throw std::invalid_argument("give either --preset or --config, not both");
    if (preset.empty() && config_path.empty())
        throw std::invalid_argument("one of --preset or --config is required");
    std::string text;
    std::string source;
    if (!preset.empty()) {
        text = mbs::preset_document(preset);
        source = "preset:" + preset;
    } else {
        std::ifstream in(config_path);
        if (!in)
            throw std::invalid_argument("cannot read config file '" + config_path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
        source = config_path;
    }
    return {json::parse(text), source, mbs::fnv1a64_hex(text)};
}

class OutputDir {
  public:
    OutputDir(std::string path, std::string subcommand, const Document* input)
        : path_(std::move(path)), start_(std::chrono::steady_clock::now()) {
        manifest_["subcommand"] = std::move(subcommand);
        manifest_["tool_version"] = kVersion;
        if (input)
            manifest_["inputs"] = {{input->source, input->digest}};
        if (enabled())
            std::filesystem::create_directories(path_);
    }

    bool enabled() const { return !path_.empty(); }

    void set_config(json config) { manifest_["config"] = std::move(config); }

    void write_json(const std::string& name, const json& body) const {
        if (!enabled())
            return;
        std::ofstream out(path_ + "/" + name);
        out << body.dump(2) << "\n";
    }

    void write_text(const std::string& name, const std::string& body) const {
        if (!enabled())
            return;
        std::ofstream out(path_ + "/" + name);
        out << body;
    }

    void finish() {
        if (!enabled())
            return;
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        manifest_["wall_time_seconds"] =
            std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();
        write_json("manifest.json", manifest_);
    }

  private:
    std::string path_;
    std::chrono::steady_clock::time_point start_;
    json manifest_;
};

mbs::BlockSystem system_from_document(const json& body) {
    if (body.contains("system"))
        return mbs::block_system_from_json(body.at("system"));
    return mbs::block_system_from_json(body);
}

int cmd_verify(const std::string& preset, const std::string& config_path,
               const std::string& out_dir, double ratio_tol, int samples, unsigned threads) {
    const Document doc = load_document(preset, config_path);
    const mbs::BlockSystem system = system_from_document(doc.body);

    OutputDir out(out_dir, "verify", &doc);
    const mbs::IdentitySuiteReport report = mbs::identity_suite(
        system, samples, 20260810, mbs::BlockSystem::kDefaultDimensionCap, threads);

    const double selection_tol = 1e-12;
    const double asymmetry_tol = 1e-9;
    const bool pass = report.max_ratio_deviation < ratio_tol &&
                      report.max_selection_violation < selection_tol &&
                      report.max_asymmetry_deviation < asymmetry_tol;

    json body = {{"system", mbs::block_system_to_json(system)},
                 {"pairs_checked", report.pairs_checked},
                 {"superpositions", samples},
                 {"max_ratio_deviation", report.max_ratio_deviation},
                 {"max_product_residual", report.max_product_residual},
                 {"max_selection_violation", report.max_selection_violation},
                 {"max_asymmetry_deviation", report.max_asymmetry_deviation},
                 {"tolerances",
                  {{"ratio", ratio_tol},
                   {"selection", selection_tol},
                   {"asymmetry", asymmetry_tol}}},
                 {"pass", pass}};
    out.set_config(doc.body);
    out.write_json("verify_report.json", body);
    out.finish();

    std::cout << "pairs checked:            " << report.pairs_checked << "\n"
              << "max ratio deviation:      " << mbs::format_number(report.max_ratio_deviation)
              << " (tol " << mbs::format_number(ratio_tol) << ")\n"
              << "max product residual:     " << mbs::format_number(report.max_product_residual)
              << "\n"
              << "max selection violation:  "
              << mbs::format_number(report.max_selection_violation) << " (tol 1e-12)\n"
              << "max asymmetry deviation:  "
              << mbs::format_number(report.max_asymmetry_deviation) << " (tol 1e-9)\n"
              << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kExitOk : kExitTolerance;
}

int cmd_steady(int j_max, const std::string& out_dir) {
    if (j_max < 1)
        throw std::invalid_argument("--jmax must be at least 1");
    OutputDir out(out_dir, "steady", nullptr);

    const mbs::GSeries series = mbs::g_series(j_max);
    const mbs::SteadyDistribution dist =
        mbs::steady_distribution(mbs::HalfInt(j_max), mbs::HalfInt(0));
    const double floor = mbs::mbs_floor(j_max);
    const double bound = mbs::variance_bound(j_max);

    std::ostringstream csv;
    csv << "j,f_over_f0,g,partial_sum\n";
    std::cout << "  J     f(J)/f(0)          g(J)            sum g\n";
    for (int j = 0; j <= j_max; ++j) {
        const double f = dist.f.at(mbs::HalfInt(j));
        csv << j << ',' << mbs::format_number(f) << ',' << mbs::format_number(series.g[j])
            << ',' << mbs::format_number(series.partial_sums[j]) << "\n";
        std::printf("%3d  %14.6e  %14.6e  %14.10f\n", j, f, series.g[j],
                    series.partial_sums[j]);
    }
    std::printf("singlet floor  %.6f  (2 d.p. %.2f)\n", floor, floor);
    std::printf("variance bound %.6f  (2 d.p. %.2f)\n", bound, bound);

    out.set_config({{"j_max", j_max}});
    out.write_text("steady.csv", csv.str());
    out.write_json("steady.json", {{"j_max", j_max},
                                   {"singlet_floor", floor},
                                   {"variance_bound", bound},
                                   {"singlet_floor_2dp", std::round(floor * 100.0) / 100.0},
                                   {"variance_bound_2dp", std::round(bound * 100.0) / 100.0}});
    out.finish();
    return kExitOk;
}

json checkpoint_to_json(const mbs::Checkpoint& cp) {
    json p_j = json::object();
    for (const auto& [j, p] : cp.p_j)
        p_j[std::to_string(j.twice())] = p;
    return {{"interval", cp.interval},
            {"time", cp.time},
            {"p_j_twice", std::move(p_j)},
            {"j_squared", cp.j_squared}};
}

int cmd_simulate(const std::string& preset, const std::string& config_path,
                 const std::string& out_dir, const std::string& mode_override, bool audit,
                 unsigned threads) {
    const Document doc = load_document(preset, config_path);
    mbs::SimulationSpec spec = mbs::simulation_spec_from_json(doc.body);
    if (!mode_override.empty())
        spec.config.mode = mbs::protocol_mode_from_name(mode_override);
    spec.config.threads = threads;

    OutputDir out(out_dir, "simulate", &doc);

    const mbs::ProtocolContext ctx = mbs::build_protocol_context(
        spec.system, spec.config.rate_ratio(), spec.config.dimension_cap, threads);
    spec.config.initial_populations =
        mbs::resolve_initial_populations(ctx.basis_ab, spec.initial);

    const mbs::ObservableSeries series = mbs::protocol_run(ctx, spec.config);
    if (!series.rate_condition_ok)
        std::cerr << "warning: rate ratio " << spec.config.rate_ratio()
                  << " does not exceed the polarization requirement "
                  << series.rate_condition_min << "\n";

    std::ostringstream csv;
    csv << "interval,time,j_twice,p\n";
    for (const mbs::Checkpoint& cp : series.points)
        for (const auto& [j, p] : cp.p_j)
            csv << cp.interval << ',' << mbs::format_number(cp.time) << ',' << j.twice() << ','
                << mbs::format_number(p) << "\n";

    const mbs::Checkpoint& last = series.points.back();
    double stabilization = 0.0;
    if (series.points.size() >= 2) {
        const auto& prev = series.points[series.points.size() - 2].p_multiplet;
        for (const auto& [key, p] : last.p_multiplet) {
            const auto it = prev.find(key);
            stabilization =
                std::max(stabilization, std::abs(p - (it == prev.end() ? 0.0 : it->second)));
        }
    }

    const double p0 = last.p_j.count(mbs::HalfInt(0)) ? last.p_j.at(mbs::HalfInt(0)) : 0.0;
    json summary = {
        {"mode", mbs::protocol_mode_name(spec.config.mode)},
        {"intervals", spec.config.intervals},
        {"tau", spec.config.tau},
        {"rate_ratio", spec.config.rate_ratio()},
        {"rate_condition_min", series.rate_condition_min},
        {"rate_condition_ok", series.rate_condition_ok},
        {"final",
         {{"time", last.time},
          {"p0", p0},
          {"p0_paper_precision", std::round(p0 * 100.0) / 100.0},
          {"j_squared", last.j_squared},
          {"j_squared_paper_precision", std::round(last.j_squared * 100.0) / 100.0}}},
        {"stabilization_gap_last_two", stabilization},
        {"checkpoints", json::array()}};
    for (const mbs::Checkpoint& cp : series.points)
        summary["checkpoints"].push_back(checkpoint_to_json(cp));

    if (audit) {
        const std::size_t dim = spec.system.product_dimension(spec.config.dimension_cap);
        if (dim > mbs::kLindbladDimensionCap) {
            std::cerr << "audit skipped: dimension " << dim
                      << " exceeds the full-Lindblad cap " << mbs::kLindbladDimensionCap
                      << "\n";
            summary["audit"] = {{"skipped", true}, {"dimension", dim}};
        } else {
            const mbs::AuditResult a = mbs::coherence_audit(spec.system, spec.config);
            summary["audit"] = {{"skipped", false},
                                {"max_offdiag", a.max_offdiag},
                                {"max_p_deviation", a.max_p_deviation}};
            std::cout << "audit: max off-diagonal " << mbs::format_number(a.max_offdiag)
                      << ", max P(J) deviation " << mbs::format_number(a.max_p_deviation)
                      << "\n";
        }
    }

    out.set_config(doc.body);
    out.write_text("series.csv", csv.str());
    out.write_json("summary.json", summary);
    out.finish();

    std::printf("final: t=%g  P(0)=%.4f  <J^2>=%.4f  (mode %s)\n", last.time, p0,
                last.j_squared, mbs::protocol_mode_name(spec.config.mode));
    return kExitOk;
}

int cmd_lattice(const std::string& preset, const std::string& config_path,
                const std::string& direction, const std::string& out_dir) {
    const Document doc = load_document(preset, config_path);
    OutputDir out(out_dir, "lattice", &doc);
    out.set_config(doc.body);

    if (doc.body.value("kind", "lattice") == "silicon") {
        json shells = json::array();
        std::cout << "shell  coupling (MHz)  sites\n";
        for (const mbs::SiliconShell& s : mbs::silicon_shells()) {
            shells.push_back({{"label", s.label},
                              {"coupling_mhz", s.coupling_mhz},
                              {"sites", s.site_count}});
            std::printf("  %s    %10.1f      %4d\n", s.label.c_str(), s.coupling_mhz,
                        s.site_count);
        }
        out.write_json("silicon_shells.json", shells);
        out.finish();
        return kExitOk;
    }

    Eigen::Vector3d mu;
    if (direction == "x")
        mu = {1.0, 0.0, 0.0};
    else if (direction == "y")
        mu = {0.0, 1.0, 0.0};
    else if (direction == "z")
        mu = {0.0, 0.0, 1.0};
    else
        throw std::invalid_argument("--direction must be x, y or z");

    const mbs::LatticeModel model = mbs::lattice_model_from_json(doc.body);
    const auto dc = mbs::dc_couplings(model);
    const auto ac = mbs::ac_couplings(model, mu);
    const mbs::ShellPartition shells = mbs::group_shells(dc);

    std::ostringstream csv;
    csv << "site,x,y,z,spin_twice,dc,ac\n";
    for (std::size_t n = 0; n < model.sites.size(); ++n) {
        const auto& s = model.sites[n];
        csv << n << ',' << mbs::format_number(s.position.x()) << ','
            << mbs::format_number(s.position.y()) << ',' << mbs::format_number(s.position.z())
            << ',' << s.spin.twice() << ',' << mbs::format_number(dc[n]) << ','
            << mbs::format_number(ac[n]) << "\n";
    }
    out.write_text("couplings.csv", csv.str());

    bool all_ok = true;
    json shell_report = json::array();
    for (std::size_t k = 0; k < shells.shells.size(); ++k) {
        const mbs::Shell& shell = shells.shells[k];
        std::vector<double> c;
        for (std::size_t idx : shell.sites)
            c.push_back(ac[idx]);
        const mbs::AcDecomposition d = mbs::decompose_ac(c);
        all_ok = all_ok && d.ok;

        json terms = json::array();
        for (const mbs::AcTerm& t : d.terms)
            terms.push_back({{"amplitude", t.amplitude}, {"signs", t.signs}});
        shell_report.push_back({{"shell", k},
                                {"dc_coupling", shell.coupling},
                                {"sites", shell.sites},
                                {"terms", std::move(terms)},
                                {"ok", d.ok},
                                {"residual", d.residual},
                                {"failure", d.failure}});
        std::printf("shell %zu: %zu sites, dc %.6g, %zu raising term(s)%s\n", k,
                    shell.sites.size(), shell.coupling, d.terms.size(),
                    d.ok ? "" : "  DECOMPOSITION FAILED");
        if (!d.ok)
            std::cerr << "shell " << k << ": " << d.failure << " (residual "
                      << mbs::format_number(d.residual) << ")\n";
    }
    out.write_json("decomposition.json", shell_report);
    out.finish();
    return all_ok ? kExitOk : kExitTolerance;
}

int cmd_rates(double a, double rabi, double zeeman, double trion_width, double a_tilde,
              double esr_width, double gamma_n, int sites, int spin_twice, double factor,
              const std::string& out_dir) {
    OutputDir out(out_dir, "rates", nullptr);
    const mbs::DnspRates rates =
        mbs::dnsp_rates(a, rabi, zeeman, trion_width, a_tilde, esr_width);
    const mbs::RateBudget budget{rates.lambda_h, rates.lambda_o, gamma_n, sites,
                                 mbs::half_twice(spin_twice)};
    const mbs::LowLossReport report = mbs::low_loss_check(budget, factor);

    std::printf("lambda_h = %.6g Hz   (dc polarization)\n", rates.lambda_h);
    std::printf("lambda_o = %.6g Hz   (ac polarization)\n", rates.lambda_o);
    std::printf("polarization  %s  margin %.3f   [lambda_h/(4 N s^2) > lambda_o]\n",
                report.polarization_ok ? "pass" : "FAIL", report.polarization_margin);
    std::printf("decoherence   %s  margin %.3f   [lambda_o >= %g * gamma_n]\n",
                report.decoherence_ok ? "pass" : "FAIL", report.decoherence_margin, factor);

    out.set_config({{"a", a},
                    {"rabi", rabi},
                    {"zeeman", zeeman},
                    {"trion_width", trion_width},
                    {"a_tilde", a_tilde},
                    {"esr_width", esr_width},
                    {"gamma_n", gamma_n},
                    {"site_count", sites},
                    {"spin_twice", spin_twice},
                    {"hierarchy_factor", factor}});
    out.write_json("rates.json", {{"lambda_h", rates.lambda_h},
                                  {"lambda_o", rates.lambda_o},
                                  {"polarization_ok", report.polarization_ok},
                                  {"polarization_margin", report.polarization_margin},
                                  {"decoherence_ok", report.decoherence_ok},
                                  {"decoherence_margin", report.decoherence_margin},
                                  {"low_loss_ok", report.ok()}});
    out.finish();
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"many-body singlet preparation toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string preset, config_path, out_dir, direction = "x", mode;
    unsigned threads = 0;
    double ratio_tol = 1e-10;
    int samples = 10;
    int j_max = 12;
    bool audit = false;

    // rates defaults: the donor-shell estimate baked into the silicon preset
    double a = 3e6, rabi = 3e9, zeeman = 2e8, trion_width = 2e8, a_tilde = 1e6,
           esr_width = 1e8, gamma_n = 100.0, factor = 100.0;
    int sites = 4, spin_twice = 7;

    auto add_input_flags = [&](CLI::App* cmd) {
        cmd->add_option("--preset", preset, "built-in configuration name");
        cmd->add_option("--config", config_path, "path to a JSON configuration");
        cmd->add_option("--out", out_dir, "directory for reports and the run manifest");
    };

    CLI::App* verify = app.add_subcommand(
        "verify", "check the ratio identity, selection rules and transfer asymmetry");
    add_input_flags(verify);
    verify->add_option("--tol", ratio_tol, "ratio identity tolerance");
    verify->add_option("--samples", samples, "number of random operator superpositions");
    verify->add_option("--threads", threads, "worker threads (0 = all cores)");

    CLI::App* steady = app.add_subcommand(
        "steady", "print the analytic steady-state table, singlet floor and variance bound");
    steady->add_option("--jmax", j_max, "series truncation");
    steady->add_option("--out", out_dir, "directory for reports and the run manifest");

    CLI::App* simulate =
        app.add_subcommand("simulate", "run the alternating polarization protocol");
    add_input_flags(simulate);
    simulate->add_option("--mode", mode, "kinetic or steady-shortcut");
    simulate->add_flag("--audit", audit, "cross-check with full Lindblad integration");
    simulate->add_option("--threads", threads, "worker threads (0 = all cores)");

    CLI::App* lattice = app.add_subcommand(
        "lattice", "hyperfine couplings, coordination shells and raising-operator terms");
    add_input_flags(lattice);
    lattice->add_option("--direction", direction, "drive direction (x, y or z)");

    CLI::App* rates = app.add_subcommand("rates", "polarization rates and the low-loss budget");
    rates->add_option("--a", a, "dc hyperfine coupling (Hz)");
    rates->add_option("--rabi", rabi, "optical Rabi frequency (Hz)");
    rates->add_option("--zeeman", zeeman, "electron Zeeman splitting (Hz)");
    rates->add_option("--trion-width", trion_width, "charged-exciton broadening (Hz)");
    rates->add_option("--atilde", a_tilde, "ac hyperfine coupling (Hz)");
    rates->add_option("--esr-width", esr_width, "electron spin resonance broadening (Hz)");
    rates->add_option("--gamma-n", gamma_n, "nuclear dephasing rate (Hz)");
    rates->add_option("--sites", sites, "number of shell sites");
    rates->add_option("--spin-twice", spin_twice, "twice the nuclear spin");
    rates->add_option("--factor", factor, "hierarchy factor for the 'much greater' test");
    rates->add_option("--out", out_dir, "directory for reports and the run manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (verify->parsed())
            return cmd_verify(preset, config_path, out_dir, ratio_tol, samples, threads);
        if (steady->parsed())
            return cmd_steady(j_max, out_dir);
        if (simulate->parsed())
            return cmd_simulate(preset, config_path, out_dir, mode, audit, threads);
        if (lattice->parsed())
            return cmd_lattice(preset, config_path, direction, out_dir);
        if (rates->parsed())
            return cmd_rates(a, rabi, zeeman, trion_width, a_tilde, esr_width, gamma_n, sites,
                             spin_twice, factor, out_dir);
    } catch (const mbs::DimensionCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitResource;
    } catch (const mbs::IntegrationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTolerance;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
