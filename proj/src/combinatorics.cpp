#include "gfaccess/combinatorics.hpp"

#include <cmath>
#include <limits>

namespace gfaccess {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// prod_{i<terms} (a - i) / (b - i); zero once a numerator factor hits zero.
double falling_ratio(long long a, long long b, long long terms) {
    double r = 1.0;
    for (long long i = 0; i < terms; ++i) {
        if (a - i <= 0) return 0.0;
        r *= static_cast<double>(a - i) / static_cast<double>(b - i);
    }
    return r;
}

void check_steiner(const AccessLaw& law, int U) {
    if (!law.is_steiner()) throw std::invalid_argument("expected a Steiner access law");
    if (U > law.C) {
        throw UTooLarge("U=" + std::to_string(U) + " exceeds the codebook size C=" + std::to_string(law.C));
    }
}

}  // namespace

AccessLaw AccessLaw::random(int M, int K) {
    if (K < 1 || K > M) throw std::invalid_argument("random law: need 1 <= K <= M");
    AccessLaw law;
    law.mode = AccessMode::Random;
    law.M = M;
    law.K = K;
    return law;
}

AccessLaw AccessLaw::steiner(int t, int K, int M) {
    const DesignParams p = derive_params(t, K, M);
    AccessLaw law;
    law.mode = AccessMode::Steiner;
    law.M = M;
    law.K = K;
    law.t = t;
    law.C = p.C;
    law.D = static_cast<int>(p.D);
    return law;
}

AccessLaw AccessLaw::of(const PatternCodebook& codebook) {
    return codebook.is_steiner() ? steiner(codebook.t(), codebook.K(), codebook.M())
                                 : random(codebook.M(), codebook.K());
}

std::string AccessLaw::key() const {
    if (is_steiner()) return "steiner:" + std::to_string(t) + "," + std::to_string(K) + "," + std::to_string(M);
    return "random:" + std::to_string(M) + "," + std::to_string(K);
}

double log_binomial(double n, double k) {
    if (k < 0 || n < 0 || k > n) return kNegInf;
    if (k == 0 || k == n) return 0.0;
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

double binomial(long long n, long long k) {
    if (k < 0 || n < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    if (n <= 60) {
        double r = 1.0;
        for (long long i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
        return std::round(r);
    }
    return std::exp(log_binomial(static_cast<double>(n), static_cast<double>(k)));
}

double log_binomial_pmf(double k, double n, double p) {
    if (k < 0 || k > n) return kNegInf;
    if (p <= 0.0) return k == 0 ? 0.0 : kNegInf;
    if (p >= 1.0) return k == n ? 0.0 : kNegInf;
    return log_binomial(n, k) + k * std::log(p) + (n - k) * std::log1p(-p);
}

double binomial_pmf(long long k, long long n, double p) {
    return std::exp(log_binomial_pmf(static_cast<double>(k), static_cast<double>(n), p));
}

double p_cf_random(int Kp, int U, const AccessLaw& law) {
    const int K = law.K;
    const int M = law.M;
    if (Kp < 0 || Kp > K || U < 1) return 0.0;
    double sum = 0.0;
    for (int n = 0; n <= K - Kp; ++n) {
        const double ratio = falling_ratio(M - Kp - n, M, K);
        const double V = U == 1 ? 1.0 : std::pow(ratio, U - 1);
        sum += (n % 2 ? -1.0 : 1.0) * binomial(K - Kp, n) * V;
    }
    return clamp01(binomial(K, Kp) * sum);
}

double p_cf_steiner(int Kp, int U, const AccessLaw& law) {
    check_steiner(law, U);
    const int K = law.K;
    if (Kp < 0 || Kp > K || U < 1) return 0.0;
    double sum = 0.0;
    for (int n = 0; n <= K - Kp; ++n) {
        const long long A = law.C - 1 - static_cast<long long>(law.D - 1) * (n + Kp);
        const double W = falling_ratio(A, law.C - 1, U - 1);
        sum += (n % 2 ? -1.0 : 1.0) * binomial(K - Kp, n) * W;
    }
    return clamp01(binomial(K, K - Kp) * sum);
}

double p_cf(int Kp, int U, const AccessLaw& law) {
    return law.is_steiner() ? p_cf_steiner(Kp, U, law) : p_cf_random(Kp, U, law);
}

double p_int_random(int L, int U, const AccessLaw& law) {
    if (L < 0 || L > U - 1) return 0.0;
    return binomial_pmf(L, U - 1, static_cast<double>(law.K) / law.M);
}

double p_int_steiner(int L, int U, const AccessLaw& law) {
    check_steiner(law, U);
    if (L < 0 || L > U - 1 || L > law.D - 1) return 0.0;
    return std::exp(log_binomial(law.D - 1, L) + log_binomial(static_cast<double>(law.C - law.D), U - 1 - L) -
                    log_binomial(static_cast<double>(law.C - 1), U - 1));
}

double p_int(int L, int U, const AccessLaw& law) {
    return law.is_steiner() ? p_int_steiner(L, U, law) : p_int_random(L, U, law);
}

double p_int_random_cond(int L, int Kp, int U, const AccessLaw& law) {
    if (L < 0 || L > U - 1) return 0.0;
    if (U == 1) return L == 0 ? 1.0 : 0.0;
    const int pool = law.M - Kp;
    if (pool < law.K) return 0.0;
    return binomial_pmf(L, U - 1, static_cast<double>(law.K) / pool);
}

double p_int_steiner_cond(int L, int Kp, int U, const AccessLaw& law) {
    check_steiner(law, U);
    if (L < 0 || L > U - 1 || L > law.D - 1) return 0.0;
    const double pool = static_cast<double>(law.C - 1 - static_cast<long long>(law.D - 1) * Kp);
    const double denom = log_binomial(pool, U - 1);
    if (denom == kNegInf) return 0.0;
    return std::exp(log_binomial(law.D - 1, L) + log_binomial(pool - (law.D - 1), U - 1 - L) - denom);
}

double p_int_cond(int L, int Kp, int U, const AccessLaw& law) {
    return law.is_steiner() ? p_int_steiner_cond(L, Kp, U, law) : p_int_random_cond(L, Kp, U, law);
}

double expected_free_slots(int U, const AccessLaw& law) {
    double k = 0.0;
    for (int Kp = 1; Kp <= law.K; ++Kp) k += Kp * p_cf(Kp, U, law);
    return k;
}

double activation_pmf(int u, const ActivationLaw& activation) {
    return binomial_pmf(u, activation.N, activation.b);
}

}  // namespace gfaccess
