#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbs/errors.hpp"
#include "mbs/half_int.hpp"

namespace mbs {

// Intersection class of the two bipartitions A/B and C/D. Every block
// belongs to exactly one class; A = AC u AD, B = BC u BD, C = AC u BC,
// D = AD u BD.
enum class Membership : std::uint8_t { AC = 0, AD = 1, BC = 2, BD = 3 };

const char* membership_name(Membership m);
Membership membership_from_name(const std::string& name);

inline bool in_subset_a(Membership m) { return m == Membership::AC || m == Membership::AD; }
inline bool in_subset_c(Membership m) { return m == Membership::AC || m == Membership::BC; }

// Which bipartition a collective operator refers to.
enum class Scheme : std::uint8_t { AB = 0, CD = 1 };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct Block {
    HalfInt spin;
    Membership membership;

    friend bool operator==(const Block&, const Block&) = default;
};

// Ordered list of elementary block spins with their intersection-class
// labels. The product space is the tensor product of the block spaces in
// list order (first block is the slowest index).
class BlockSystem {
  public:
    explicit BlockSystem(std::vector<Block> blocks);

    std::size_t size() const { return blocks_.size(); }
    const Block& block(std::size_t i) const { return blocks_.at(i); }
    const std::vector<Block>& blocks() const { return blocks_; }

    // Pi (2 s_i + 1); throws DimensionCapError beyond `cap` to keep the
    // multiplication overflow-safe.
    std::size_t product_dimension(std::size_t cap = kDefaultDimensionCap) const;

    // Indices of blocks in the given class, in system order.
    std::vector<std::size_t> class_members(Membership m) const;

    // +1 on the first subset of the scheme, -1 on the second (A/B or C/D).
    std::vector<double> signed_weights(Scheme s) const;
    // +1 everywhere; with direction `lower` this weights the total
    // lowering operator.
    std::vector<double> uniform_weights() const;

    // Sum of all block spins; the largest reachable collective spin.
    HalfInt total_spin() const;

    friend bool operator==(const BlockSystem&, const BlockSystem&) = default;

    static constexpr std::size_t kDefaultDimensionCap = std::size_t{1} << 16;

  private:
    std::vector<Block> blocks_;
};

} // namespace mbs
