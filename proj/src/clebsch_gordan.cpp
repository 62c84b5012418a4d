#include "mbs/clebsch_gordan.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mbs {

namespace {

// ln(n!) for twice-even factorial arguments appearing in the Racah sum.
double log_factorial(int n) {
    static const std::vector<double> table = [] {
        std::vector<double> t(256);
        for (int i = 0; i < 256; ++i)
            t[i] = std::lgamma(i + 1.0);
        return t;
    }();
    if (n < static_cast<int>(table.size()))
        return table[n];
    return std::lgamma(n + 1.0);
}

// Factorial argument from a twice-valued integer; callers guarantee the
// value is even and nonnegative.
int half(int twice) { return twice / 2; }

} // namespace

bool triangle_rule(HalfInt j1, HalfInt j2, HalfInt J) {
    if (((j1.twice() + j2.twice() + J.twice()) & 1) != 0)
        return false;
    return J >= abs(j1 - j2) && J <= j1 + j2;
}

double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
    require_projection(j1, m1, "clebsch_gordan j1");
    require_projection(j2, m2, "clebsch_gordan j2");
    require_projection(J, M, "clebsch_gordan J");

    if (m1 + m2 != M || !triangle_rule(j1, j2, J))
        return 0.0;

    // Racah's closed form: prefactor * alternating sum over k.
    const int a = half(j1.twice() + j2.twice() - J.twice());
    const int b = half(j1.twice() - j2.twice() + J.twice());
    const int c = half(-j1.twice() + j2.twice() + J.twice());
    const int perim = half(j1.twice() + j2.twice() + J.twice());

    const double log_pref =
        std::log(static_cast<double>(J.twice() + 1)) + log_factorial(a) + log_factorial(b) +
        log_factorial(c) - log_factorial(perim + 1) + log_factorial(half((j1 + m1).twice())) +
        log_factorial(half((j1 - m1).twice())) + log_factorial(half((j2 + m2).twice())) +
        log_factorial(half((j2 - m2).twice())) + log_factorial(half((J + M).twice())) +
        log_factorial(half((J - M).twice()));

    const int d1 = half((j1 - m1).twice());             // j1 - m1 - k >= 0
    const int d2 = half((j2 + m2).twice());             // j2 + m2 - k >= 0
    const int e1 = half((J - j2 + m1).twice());         // J - j2 + m1 + k >= 0
    const int e2 = half((J - j1 - m2).twice());         // J - j1 - m2 + k >= 0

    const int k_min = std::max({0, -e1, -e2});
    const int k_max = std::min({a, d1, d2});

    double sum = 0.0;
    for (int k = k_min; k <= k_max; ++k) {
        const double log_term = log_factorial(k) + log_factorial(a - k) + log_factorial(d1 - k) +
                                log_factorial(d2 - k) + log_factorial(e1 + k) +
                                log_factorial(e2 + k);
        const double term = std::exp(0.5 * log_pref - log_term);
        sum += (k & 1) ? -term : term;
    }
    return sum;
}

} // namespace mbs
