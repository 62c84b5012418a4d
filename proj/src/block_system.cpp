#include "mbs/block_system.hpp"

#include <stdexcept>

namespace mbs {

const char* membership_name(Membership m) {
    switch (m) {
    case Membership::AC: return "AC";
    case Membership::AD: return "AD";
    case Membership::BC: return "BC";
    case Membership::BD: return "BD";
    }
    return "?";
}

Membership membership_from_name(const std::string& name) {
    if (name == "AC") return Membership::AC;
    if (name == "AD") return Membership::AD;
    if (name == "BC") return Membership::BC;
    if (name == "BD") return Membership::BD;
    throw std::invalid_argument("unknown membership class '" + name + "'");
}

const char* scheme_name(Scheme s) { return s == Scheme::AB ? "AB" : "CD"; }

Scheme scheme_from_name(const std::string& name) {
    if (name == "AB") return Scheme::AB;
    if (name == "CD") return Scheme::CD;
    throw std::invalid_argument("unknown partition scheme '" + name + "'");
}

BlockSystem::BlockSystem(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty())
        throw std::invalid_argument("block system needs at least one block");
    for (const Block& b : blocks_)
        require_spin(b.spin, "block spin");
}

std::size_t BlockSystem::product_dimension(std::size_t cap) const {
    std::size_t dim = 1;
    for (const Block& b : blocks_) {
        dim *= static_cast<std::size_t>(b.spin.multiplicity());
        if (dim > cap)
            throw DimensionCapError(dim, cap);
    }
    return dim;
}

std::vector<std::size_t> BlockSystem::class_members(Membership m) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < blocks_.size(); ++i)
        if (blocks_[i].membership == m)
            out.push_back(i);
    return out;
}

std::vector<double> BlockSystem::signed_weights(Scheme s) const {
    std::vector<double> w(blocks_.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const bool positive = s == Scheme::AB ? in_subset_a(blocks_[i].membership)
                                              : in_subset_c(blocks_[i].membership);
        w[i] = positive ? 1.0 : -1.0;
    }
    return w;
}

std::vector<double> BlockSystem::uniform_weights() const {
    return std::vector<double>(blocks_.size(), 1.0);
}

HalfInt BlockSystem::total_spin() const {
    HalfInt total;
    for (const Block& b : blocks_)
        total = total + b.spin;
    return total;
}

} // namespace mbs
