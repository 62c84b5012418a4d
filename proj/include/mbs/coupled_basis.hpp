#pragma once

#include <map>
#include <optional>
#include <vector>

#include "mbs/block_system.hpp"
#include "mbs/half_int.hpp"
#include "mbs/sparse.hpp"

namespace mbs {

// One coupled state |J, M, alpha>, expanded over the canonical product
// basis of the block system. alpha lists the intermediate spins of the
// fixed coupling tree; its last two entries are the top-level subset pair
// (j_A, j_B) for scheme AB, (j_C, j_D) for scheme CD.
struct CoupledState {
    HalfInt j;
    HalfInt m;
    std::vector<HalfInt> alpha;
    SparseVector amplitudes;

    // Conserved sector labels under collective ladder operators built with
    // class-uniform weights: everything in alpha except the top pair.
    std::vector<HalfInt> chain_prefix() const {
        return {alpha.begin(), alpha.end() - 2};
    }
    HalfInt top_j1() const { return alpha[alpha.size() - 2]; }
    HalfInt top_j2() const { return alpha[alpha.size() - 1]; }
};

// Complete orthonormal eigenbasis of (J^2, J_z) for one coupling tree.
// State order is canonical: J descending, M ascending, alpha lexicographic.
class CoupledBasis {
  public:
    struct Sector {
        std::vector<HalfInt> alpha;        // full conserved label set
        std::vector<std::size_t> members;  // state indices, canonical order
    };

    CoupledBasis(Scheme scheme, BlockSystem system, std::vector<CoupledState> states);

    Scheme scheme() const { return scheme_; }
    const BlockSystem& system() const { return system_; }
    std::size_t dimension() const { return states_.size(); }
    const CoupledState& state(std::size_t i) const { return states_[i]; }
    const std::vector<CoupledState>& states() const { return states_; }

    const std::vector<std::size_t>& states_with_m(HalfInt m) const;
    const std::vector<std::size_t>& states_with_jm(HalfInt j, HalfInt m) const;
    const std::vector<Sector>& sectors() const { return sectors_; }
    std::size_t sector_of(std::size_t state_index) const { return sector_of_[state_index]; }

    std::optional<std::size_t> find(HalfInt j, HalfInt m,
                                    const std::vector<HalfInt>& alpha) const;

    // State indices of the spin coherent states |J, -J, alpha>.
    std::vector<std::size_t> coherent_states() const;

  private:
    Scheme scheme_;
    BlockSystem system_;
    std::vector<CoupledState> states_;
    std::map<int, std::vector<std::size_t>> m_groups_;                 // key: 2M
    std::map<std::pair<int, int>, std::vector<std::size_t>> jm_groups_; // key: (2J, 2M)
    std::vector<Sector> sectors_;
    std::vector<std::size_t> sector_of_;
};

// Builds the coupled basis for the fixed tree of the given scheme:
// scheme AB couples (AC x AD) -> j_A and (BC x BD) -> j_B, then
// j_A x j_B -> J; scheme CD couples (AC x BC) -> j_C and (AD x BD) -> j_D,
// then j_C x j_D -> J. Blocks inside one class fold left to right.
CoupledBasis couple_chain(const BlockSystem& system, Scheme scheme,
                          std::size_t dimension_cap = BlockSystem::kDefaultDimensionCap);

} // namespace mbs
