#include "mbs/coupled_basis.hpp"

#include <algorithm>
#include <stdexcept>

#include "mbs/clebsch_gordan.hpp"

namespace mbs {

namespace {

struct PartialState {
    HalfInt j;
    HalfInt m;
    std::vector<HalfInt> chain; // internal coupling labels, own total excluded
    SparseVector amps;          // over the node-local product space
};

struct PartialBasis {
    std::vector<std::size_t> positions; // block indices, local radix order
    std::size_t local_dim = 1;
    bool composite = false; // holds two or more blocks
    std::vector<PartialState> states;
};

PartialBasis single_block(const BlockSystem& system, std::size_t pos) {
    const HalfInt s = system.block(pos).spin;
    PartialBasis pb;
    pb.positions = {pos};
    pb.local_dim = static_cast<std::size_t>(s.multiplicity());
    for (int k = 0; k < s.multiplicity(); ++k) {
        PartialState st;
        st.j = s;
        st.m = HalfInt::from_twice(-s.twice() + 2 * k);
        st.amps.entries = {{static_cast<std::uint32_t>(k), 1.0}};
        pb.states.push_back(std::move(st));
    }
    return pb;
}

PartialBasis trivial_singlet() {
    PartialBasis pb;
    pb.local_dim = 1;
    PartialState st;
    st.amps.entries = {{0, 1.0}};
    pb.states.push_back(std::move(st));
    return pb;
}

// Multiplet grouping of one node: all states sharing (j, chain), indexed by
// projection.
struct Multiplet {
    HalfInt j;
    std::vector<HalfInt> chain;
    std::vector<const PartialState*> by_m; // size j.multiplicity()
};

std::vector<Multiplet> group_multiplets(const PartialBasis& pb) {
    std::map<std::pair<int, std::vector<HalfInt>>, Multiplet> groups;
    for (const PartialState& st : pb.states) {
        auto key = std::make_pair(st.j.twice(), st.chain);
        auto it = groups.find(key);
        if (it == groups.end()) {
            Multiplet mult;
            mult.j = st.j;
            mult.chain = st.chain;
            mult.by_m.assign(st.j.multiplicity(), nullptr);
            it = groups.emplace(std::move(key), std::move(mult)).first;
        }
        const int slot = (st.m.twice() + st.j.twice()) / 2;
        it->second.by_m[slot] = &st;
    }
    std::vector<Multiplet> out;
    out.reserve(groups.size());
    for (auto& [key, mult] : groups)
        out.push_back(std::move(mult));
    return out;
}

SparseVector tensor_sum(const Multiplet& left, const Multiplet& right, HalfInt j12, HalfInt m12,
                        std::size_t right_dim) {
    SparseVector out;
    for (int ka = 0; ka < left.j.multiplicity(); ++ka) {
        const HalfInt m1 = HalfInt::from_twice(-left.j.twice() + 2 * ka);
        const HalfInt m2 = m12 - m1;
        if (!valid_projection(right.j, m2))
            continue;
        const double cg = clebsch_gordan(left.j, m1, right.j, m2, j12, m12);
        if (cg == 0.0)
            continue;
        const int kb = (m2.twice() + right.j.twice()) / 2;
        const PartialState* ls = left.by_m[ka];
        const PartialState* rs = right.by_m[kb];
        for (const auto& ea : ls->amps.entries)
            for (const auto& eb : rs->amps.entries)
                out.entries.push_back({static_cast<std::uint32_t>(ea.index * right_dim + eb.index),
                                       cg * ea.value * eb.value});
    }
    out.normalize();
    return out;
}

// Couples two nonempty nodes. When `top` is set, both child totals are
// recorded at the end of the chain regardless of compositeness, giving the
// (j_A, j_B) / (j_C, j_D) tail of alpha.
PartialBasis couple(const PartialBasis& left, const PartialBasis& right, bool top = false) {
    PartialBasis out;
    out.positions = left.positions;
    out.positions.insert(out.positions.end(), right.positions.begin(), right.positions.end());
    out.local_dim = left.local_dim * right.local_dim;
    out.composite = out.positions.size() >= 2;

    const auto left_mults = group_multiplets(left);
    const auto right_mults = group_multiplets(right);
    for (const Multiplet& lm : left_mults) {
        for (const Multiplet& rm : right_mults) {
            std::vector<HalfInt> chain = lm.chain;
            if (!top && left.composite)
                chain.push_back(lm.j);
            chain.insert(chain.end(), rm.chain.begin(), rm.chain.end());
            if (!top && right.composite)
                chain.push_back(rm.j);
            if (top) { // alpha ends with the top-level subset pair
                chain.push_back(lm.j);
                chain.push_back(rm.j);
            }

            for (HalfInt j12 = abs(lm.j - rm.j); j12 <= lm.j + rm.j;
                 j12 = j12 + HalfInt(1)) {
                for (int km = 0; km < j12.multiplicity(); ++km) {
                    PartialState st;
                    st.j = j12;
                    st.m = HalfInt::from_twice(-j12.twice() + 2 * km);
                    st.chain = chain;
                    st.amps = tensor_sum(lm, rm, j12, st.m, right.local_dim);
                    out.states.push_back(std::move(st));
                }
            }
        }
    }
    return out;
}

std::optional<PartialBasis> fold_class(const BlockSystem& system,
                                       const std::vector<std::size_t>& members) {
    if (members.empty())
        return std::nullopt;
    PartialBasis acc = single_block(system, members[0]);
    for (std::size_t i = 1; i < members.size(); ++i)
        acc = couple(acc, single_block(system, members[i]));
    return acc;
}

std::optional<PartialBasis> combine(std::optional<PartialBasis> a, std::optional<PartialBasis> b) {
    if (!a)
        return b;
    if (!b)
        return a;
    return couple(*a, *b);
}

// Remaps node-local product indices (mixed radix over `positions`) to the
// canonical product index of the full system.
void remap_to_canonical(const BlockSystem& system, const std::vector<std::size_t>& positions,
                        SparseVector& amps) {
    const std::size_t n = system.size();
    std::vector<std::size_t> canonical_stride(n, 1);
    for (std::size_t b = n; b-- > 1;)
        canonical_stride[b - 1] =
            canonical_stride[b] * static_cast<std::size_t>(system.block(b).spin.multiplicity());

    std::vector<std::size_t> local_dim(positions.size());
    for (std::size_t k = 0; k < positions.size(); ++k)
        local_dim[k] = static_cast<std::size_t>(system.block(positions[k]).spin.multiplicity());

    for (auto& e : amps.entries) {
        std::size_t rest = e.index;
        std::size_t canonical = 0;
        for (std::size_t k = positions.size(); k-- > 0;) {
            const std::size_t digit = rest % local_dim[k];
            rest /= local_dim[k];
            canonical += digit * canonical_stride[positions[k]];
        }
        e.index = static_cast<std::uint32_t>(canonical);
    }
    amps.normalize();
}

bool alpha_less(const std::vector<HalfInt>& a, const std::vector<HalfInt>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace

CoupledBasis::CoupledBasis(Scheme scheme, BlockSystem system, std::vector<CoupledState> states)
    : scheme_(scheme), system_(std::move(system)), states_(std::move(states)) {
    std::sort(states_.begin(), states_.end(), [](const CoupledState& a, const CoupledState& b) {
        if (a.j != b.j)
            return a.j > b.j;
        if (a.m != b.m)
            return a.m < b.m;
        return alpha_less(a.alpha, b.alpha);
    });

    std::map<std::vector<HalfInt>, std::vector<std::size_t>> sector_map;
    for (std::size_t i = 0; i < states_.size(); ++i) {
        const CoupledState& st = states_[i];
        m_groups_[st.m.twice()].push_back(i);
        jm_groups_[{st.j.twice(), st.m.twice()}].push_back(i);
        sector_map[st.alpha].push_back(i);
    }
    sector_of_.assign(states_.size(), 0);
    for (auto& [alpha, members] : sector_map) {
        for (std::size_t idx : members)
            sector_of_[idx] = sectors_.size();
        sectors_.push_back({alpha, std::move(members)});
    }
}

const std::vector<std::size_t>& CoupledBasis::states_with_m(HalfInt m) const {
    static const std::vector<std::size_t> empty;
    auto it = m_groups_.find(m.twice());
    return it == m_groups_.end() ? empty : it->second;
}

const std::vector<std::size_t>& CoupledBasis::states_with_jm(HalfInt j, HalfInt m) const {
    static const std::vector<std::size_t> empty;
    auto it = jm_groups_.find({j.twice(), m.twice()});
    return it == jm_groups_.end() ? empty : it->second;
}

std::optional<std::size_t> CoupledBasis::find(HalfInt j, HalfInt m,
                                              const std::vector<HalfInt>& alpha) const {
    for (std::size_t i : states_with_jm(j, m))
        if (states_[i].alpha == alpha)
            return i;
    return std::nullopt;
}

std::vector<std::size_t> CoupledBasis::coherent_states() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < states_.size(); ++i)
        if (states_[i].m == -states_[i].j)
            out.push_back(i);
    return out;
}

CoupledBasis couple_chain(const BlockSystem& system, Scheme scheme, std::size_t dimension_cap) {
    const std::size_t dim = system.product_dimension(dimension_cap);

    std::optional<PartialBasis> first, second;
    if (scheme == Scheme::AB) {
        first = combine(fold_class(system, system.class_members(Membership::AC)),
                        fold_class(system, system.class_members(Membership::AD)));
        second = combine(fold_class(system, system.class_members(Membership::BC)),
                         fold_class(system, system.class_members(Membership::BD)));
    } else {
        first = combine(fold_class(system, system.class_members(Membership::AC)),
                        fold_class(system, system.class_members(Membership::BC)));
        second = combine(fold_class(system, system.class_members(Membership::AD)),
                         fold_class(system, system.class_members(Membership::BD)));
    }

    PartialBasis top_left = first ? std::move(*first) : trivial_singlet();
    PartialBasis top_right = second ? std::move(*second) : trivial_singlet();
    PartialBasis root = couple(top_left, top_right, /*top=*/true);

    std::vector<CoupledState> states;
    states.reserve(dim);
    for (PartialState& st : root.states) {
        remap_to_canonical(system, root.positions, st.amps);
        states.push_back({st.j, st.m, std::move(st.chain), std::move(st.amps)});
    }
    if (states.size() != dim)
        throw std::logic_error("coupled basis state count mismatch");
    return CoupledBasis(scheme, system, std::move(states));
}

} // namespace mbs
