#include "mbs/serialize.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>

namespace mbs {

using nlohmann::json;

json block_system_to_json(const BlockSystem& system) {
    json blocks = json::array();
    for (const Block& b : system.blocks())
        blocks.push_back({{"spin_twice", b.spin.twice()},
                          {"class", membership_name(b.membership)}});
    return {{"blocks", std::move(blocks)}};
}

BlockSystem block_system_from_json(const json& j) {
    std::vector<Block> blocks;
    for (const json& b : j.at("blocks")) {
        Block block;
        block.spin = HalfInt::from_twice(b.at("spin_twice").get<int>());
        block.membership = membership_from_name(b.at("class").get<std::string>());
        blocks.push_back(block);
    }
    return BlockSystem(std::move(blocks));
}

namespace {

json half_int_list(const std::vector<HalfInt>& values) {
    json out = json::array();
    for (HalfInt v : values)
        out.push_back(v.twice());
    return out;
}

std::vector<HalfInt> half_int_list_from_json(const json& j) {
    std::vector<HalfInt> out;
    for (const json& v : j)
        out.push_back(HalfInt::from_twice(v.get<int>()));
    return out;
}

} // namespace

json coupled_basis_to_json(const CoupledBasis& basis) {
    json states = json::array();
    for (const CoupledState& st : basis.states()) {
        json amps = json::array();
        for (const auto& e : st.amplitudes.entries)
            amps.push_back({e.index, e.value});
        states.push_back({{"j_twice", st.j.twice()},
                          {"m_twice", st.m.twice()},
                          {"alpha_twice", half_int_list(st.alpha)},
                          {"amplitudes", std::move(amps)}});
    }
    return {{"scheme", scheme_name(basis.scheme())},
            {"system", block_system_to_json(basis.system())},
            {"states", std::move(states)}};
}

CoupledBasis coupled_basis_from_json(const json& j) {
    BlockSystem system = block_system_from_json(j.at("system"));
    const Scheme scheme = scheme_from_name(j.at("scheme").get<std::string>());
    std::vector<CoupledState> states;
    for (const json& s : j.at("states")) {
        CoupledState st;
        st.j = HalfInt::from_twice(s.at("j_twice").get<int>());
        st.m = HalfInt::from_twice(s.at("m_twice").get<int>());
        st.alpha = half_int_list_from_json(s.at("alpha_twice"));
        for (const json& e : s.at("amplitudes"))
            st.amplitudes.entries.push_back(
                {e.at(0).get<std::uint32_t>(), e.at(1).get<double>()});
        st.amplitudes.normalize();
        states.push_back(std::move(st));
    }
    return CoupledBasis(scheme, std::move(system), std::move(states));
}

json sparse_operator_to_json(const SparseOperator& op) {
    json entries = json::array();
    for (const auto& e : op.entries())
        entries.push_back({e.row, e.col, e.value});
    return {{"rows", op.rows()}, {"cols", op.cols()}, {"entries", std::move(entries)}};
}

SparseOperator sparse_operator_from_json(const json& j) {
    SparseOperator op(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    for (const json& e : j.at("entries"))
        op.add(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(), e.at(2).get<double>());
    op.finalize();
    return op;
}

LatticeModel lattice_model_from_json(const json& j) {
    LatticeModel model;
    model.coupling_scale = j.value("coupling_scale", 1.0);

    const json& env = j.at("envelope");
    const std::string type = env.value("type", "gaussian");
    if (type != "gaussian")
        throw std::invalid_argument("lattice model: unknown envelope type '" + type + "'");
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    if (env.contains("center")) {
        const json& c = env.at("center");
        center << c.at(0).get<double>(), c.at(1).get<double>();
    }
    model.envelope = std::make_shared<GaussianEnvelope>(center, env.value("sigma", 1.0));

    for (const json& s : j.at("sites")) {
        LatticeSite site;
        const json& p = s.at("position");
        site.position << p.at(0).get<double>(), p.at(1).get<double>(),
            p.size() > 2 ? p.at(2).get<double>() : 0.0;
        site.spin = HalfInt::from_twice(s.at("spin_twice").get<int>());
        model.sites.push_back(site);
    }
    model.validate();
    return model;
}

SimulationSpec simulation_spec_from_json(const json& j) {
    SimulationSpec spec{block_system_from_json(j.at("system")), {}, json{{"type", "mixed"}}};
    ProtocolConfig& c = spec.config;
    c.lambda_h = j.value("lambda_h", 1000.0);
    c.lambda_o = j.value("lambda_o", 1.0);
    if (c.lambda_h <= 0.0 || c.lambda_o <= 0.0)
        throw std::invalid_argument("simulation: rates must be positive");
    c.tau = j.value("tau", 2.0);
    if (c.tau < 0.0)
        throw std::invalid_argument("simulation: tau must be nonnegative");
    c.intervals = j.value("intervals", 5);
    if (c.intervals < 0)
        throw std::invalid_argument("simulation: interval count must be nonnegative");
    c.mode = protocol_mode_from_name(j.value("mode", "kinetic"));
    if (j.contains("initial"))
        spec.initial = j.at("initial");
    return spec;
}

std::vector<double> resolve_initial_populations(const CoupledBasis& basis, const json& initial) {
    const std::string type = initial.value("type", "mixed");
    if (type == "mixed")
        return {};
    if (type != "explicit")
        throw std::invalid_argument("initial state: unknown type '" + type + "'");

    std::vector<double> p(basis.dimension(), 0.0);
    for (const json& entry : initial.at("populations")) {
        const HalfInt j = HalfInt::from_twice(entry.at("j_twice").get<int>());
        const HalfInt m = HalfInt::from_twice(entry.at("m_twice").get<int>());
        const auto alpha = half_int_list_from_json(entry.at("alpha_twice"));
        const auto idx = basis.find(j, m, alpha);
        if (!idx)
            throw std::invalid_argument("initial state: no basis state with J=" + j.to_string() +
                                        " M=" + m.to_string());
        p[*idx] += entry.at("p").get<double>();
    }
    return p;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace mbs
