#include <cmath>

#include "gfaccess/analytic.hpp"

namespace gfaccess {

PilotEvents pilot_event_probs(int U, int Q, const AccessLaw& law, bool as_printed) {
    if (Q < 1) throw std::invalid_argument("pilot pool size must be at least 1");
    PilotEvents ev;
    const double miss = 1.0 - 1.0 / Q;
    for (int L = 1; L <= U - 1; ++L) {
        const double w = p_int(L, U, law);
        if (w == 0) continue;
        const double intact = std::pow(miss, L);
        ev.p_I += w * (1.0 - intact);
        if (L < 2) continue;
        // All L interferers on distinct pilots, none equal to the user's.
        double distinct = 1.0;
        for (int i = as_printed ? 0 : 1; i <= (as_printed ? L - 1 : L); ++i) distinct *= static_cast<double>(Q - i) / Q;
        ev.p_II += w * (intact - distinct);
    }
    return ev;
}

double pilot_bound(double R, int U, int Q, const AccessLaw& law) {
    const PilotEvents ev = pilot_event_probs(U, Q, law);
    const double z = sinr_threshold(R);
    const int K = law.K;
    double b = std::pow(ev.p_I, K);
    for (int n = 1; n <= K; ++n) {
        b += binomial(K, n) * std::pow(ev.p_I, K - n) * std::pow(ev.p_II, n) * beta_prime_cdf(z, n, 2.0);
    }
    return std::min(1.0, std::max(0.0, b));
}

}  // namespace gfaccess
