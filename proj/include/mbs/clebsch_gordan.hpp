#pragma once

#include "mbs/half_int.hpp"

namespace mbs {

// Clebsch-Gordan coefficient <j1 m1 j2 m2 | J M> in the Condon-Shortley
// convention, evaluated from the Racah sum with a log-factorial table.
// Returns 0 when M != m1+m2 or the triangle rule fails; throws
// std::domain_error on malformed quantum numbers (negative j, |m| > j,
// j - m not an integer).
double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);

// Triangle rule for coupling j1 x j2 -> J, including the integer-perimeter
// parity condition.
bool triangle_rule(HalfInt j1, HalfInt j2, HalfInt J);

} // namespace mbs
