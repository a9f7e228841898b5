#pragma once

#include "gfaccess/codebook.hpp"

namespace gfaccess {

/// Parameters of the slot-selection law seen by one reference user.
struct AccessLaw {
    AccessMode mode = AccessMode::Random;
    int M = 0;
    int K = 0;
    // Steiner only.
    int t = 0;
    long long C = 0;
    int D = 0;

    static AccessLaw random(int M, int K);
    static AccessLaw steiner(int t, int K, int M);
    static AccessLaw of(const PatternCodebook& codebook);

    bool is_steiner() const { return mode == AccessMode::Steiner; }
    /// Stable text key, e.g. "steiner:2,4,25" or "random:25,4".
    std::string key() const;
};

/// N users, each active independently with probability b.
struct ActivationLaw {
    int N = 0;
    double b = 0.0;
};

/// log binom(n, k); -inf when k < 0 or k > n (including negative n).
double log_binomial(double n, double k);

/// binom(n, k) as a double, 0 outside the support.
double binomial(long long n, long long k);

/// log of the binomial pmf f_bin(k; n, p); -inf outside the support.
double log_binomial_pmf(double k, double n, double p);
double binomial_pmf(long long k, long long n, double p);

/// Probability that exactly K' of the reference user's K slots are
/// collision-free when the other U-1 users pick uniform K-subsets.
double p_cf_random(int Kp, int U, const AccessLaw& law);
/// Same for U distinct Steiner patterns; throws UTooLarge if U > C.
double p_cf_steiner(int Kp, int U, const AccessLaw& law);
double p_cf(int Kp, int U, const AccessLaw& law);

/// Probability of L interferers in one slot of the reference user.
double p_int_random(int L, int U, const AccessLaw& law);
double p_int_steiner(int L, int U, const AccessLaw& law);
double p_int(int L, int U, const AccessLaw& law);

/// Interferer law in a further slot given that K' designated slots of the
/// reference user are collision-free.
double p_int_random_cond(int L, int Kp, int U, const AccessLaw& law);
double p_int_steiner_cond(int L, int Kp, int U, const AccessLaw& law);
double p_int_cond(int L, int Kp, int U, const AccessLaw& law);

/// Mean number of collision-free slots per user.
double expected_free_slots(int U, const AccessLaw& law);

double activation_pmf(int u, const ActivationLaw& activation);

}  // namespace gfaccess
