#pragma once

#include <stdexcept>
#include <string>

namespace mbs {

// Requested Hilbert-space dimension exceeds the configured cap.
class DimensionCapError : public std::runtime_error {
  public:
    DimensionCapError(std::size_t requested, std::size_t cap)
        : std::runtime_error("product dimension " + std::to_string(requested) +
                             " exceeds cap " + std::to_string(cap)),
          requested_(requested), cap_(cap) {}
    std::size_t requested() const { return requested_; }
    std::size_t cap() const { return cap_; }

  private:
    std::size_t requested_, cap_;
};

// Adaptive integrator could not meet the tolerance.
class IntegrationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace mbs
