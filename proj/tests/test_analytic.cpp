#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "gfaccess/analytic.hpp"
#include "gfaccess/bundled.hpp"

using namespace gfaccess;
using doctest::Approx;

namespace {

double quad(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b);
}

double db(double x) { return std::pow(10.0, x / 10.0); }

}  // namespace

TEST_CASE("collision outage") {
    const auto r = AccessLaw::random(25, 4);
    CHECK(outage_collision(2.0, 10.0, 1, r) == Approx(gamma_cdf(3.0, {4.0, 10.0})).epsilon(1e-14));
    CHECK(outage_collision(2.0, 1e12, 7, r) == Approx(p_cf(0, 7, r)).epsilon(1e-9));
    CHECK(outage_collision(1.0, 10.0, 2, AccessLaw::steiner(2, 3, 7)) == Approx(4.68e-3).epsilon(1e-3));
    CHECK(outage_collision(1.0, 10.0, 2, AccessLaw::steiner(2, 3, 7)) ==
          Approx(gamma_cdf(1.0, {2.0, 10.0})).epsilon(1e-12));

    // Mixture over the enumerated free-slot law.
    const auto table = oracle::random_law(6, 3, 4);
    double ref = 0;
    for (int kp = 0; kp <= 3; ++kp) ref += table.cf[kp] * (kp == 0 ? 1.0 : gamma_cdf(1.5, {double(kp), 2.0}));
    CHECK(outage_collision(std::log2(2.5), 2.0, 4, AccessLaw::random(6, 3)) == Approx(ref).epsilon(1e-12));
}

TEST_CASE("residual SNR") {
    // Every replica collides: the whole threshold is missing.
    CHECK(residual_snr(1.0, 5.0, 2, AccessLaw::random(2, 2)) == Approx(1.0));
    CHECK(residual_snr(2.0, 1e-9, 5, AccessLaw::random(25, 4)) == Approx(3.0).epsilon(1e-6));

    // Quadrature over the truncated gamma mixture.
    const double pcf[3] = {1.0 / 6, 4.0 / 6, 1.0 / 6};
    double ref = 0;
    for (int kp = 0; kp <= 2; ++kp) {
        double mean = 0;
        if (kp > 0) {
            const GammaParams g{double(kp), 1.0};
            mean = quad([&](double x) { return x * gamma_pdf(x, g); }, 0.0, 1.0) / gamma_cdf(1.0, g);
        }
        ref += pcf[kp] * (1.0 - mean);
    }
    CHECK(residual_snr(1.0, 1.0, 2, AccessLaw::random(4, 2)) == Approx(ref).epsilon(1e-9));
}

TEST_CASE("second SIC round") {
    const auto law = AccessLaw::steiner(2, 4, 25);
    // Two slots, two repetitions: cancelling one peer of three frees nothing.
    CHECK(outage_sic_round2(1, 2.0, 10.0, 3, AccessLaw::random(2, 2)) == 1.0);
    CHECK_THROWS_AS(outage_sic_round2(0, 2.0, 10.0, 5, law), std::invalid_argument);

    const double rho = residual_snr(2.0, 10.0, 5, law);
    const double gain = expected_free_slots(3, law) - expected_free_slots(5, law);
    REQUIRE(gain > 0);
    std::mt19937_64 rng(11);
    std::gamma_distribution<double> g(gain, 10.0);
    const int n = 400000;
    int below = 0;
    for (int i = 0; i < n; ++i) below += g(rng) <= rho;
    const double p = outage_sic_round2(2, 2.0, 10.0, 5, law);
    CHECK(std::abs(below / double(n) - p) < 4 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("conditional SIC outage reductions") {
    const auto law = AccessLaw::steiner(2, 4, 25);
    CHECK(outage_sic_conditional(2.0, 30.0, 1, 0, law) == Approx(outage_collision(2.0, 30.0, 1, law)).epsilon(1e-14));
    for (int U : {2, 5, 9})
        CHECK(outage_sic_conditional(2.0, 30.0, U, U - 1, law) ==
              Approx(outage_collision(2.0, 30.0, U, law)).epsilon(1e-14));
    // Fewer cancelable peers never helps.
    for (int S = 1; S < 8; ++S)
        CHECK(outage_sic_conditional(2.0, 30.0, 9, S, law) >= outage_sic_conditional(2.0, 30.0, 9, S - 1, law) - 1e-15);
    CHECK(outage_sic_conditional(2.0, 30.0, 9, 0, law) <= outage_collision(2.0, 30.0, 9, law));
}

TEST_CASE("stopping-set occurrence") {
    CHECK(q1_stopping(7, 10, 0, 50) == 0.0);
    CHECK(q1_stopping(7, 6, 266, 50) == 0.0);
    CHECK(q1_stopping(7, 10, 266, 50) == Approx(3.194e-4).epsilon(1e-3));
    const double p = 266.0 / 99884400.0;
    CHECK(q1_stopping(7, 10, 266, 50) == Approx(120 * p * std::pow(1 - p, 119)).epsilon(1e-12));
}

TEST_CASE("SIC outage") {
    const auto cb = load_system("S(2,4,25)");
    const auto law = AccessLaw::of(cb);
    const auto catalog = StoppingSetCatalog::build_for_sic(cb);
    CHECK(outage_collision_sic(2.0, db(15), 1, law, catalog) == Approx(outage_collision(2.0, db(15), 1, law)));
    for (int U : {2, 4, 6})
        CHECK(outage_collision_sic(2.0, db(15), U, law, catalog) ==
              Approx(outage_sic_conditional(2.0, db(15), U, 0, law)).epsilon(1e-14));
    for (int U : {8, 15, 30}) {
        const double v = outage_collision_sic(2.0, db(15), U, law, catalog);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v <= outage_collision(2.0, db(15), U, law) + 1e-12);
    }
    CHECK_THROWS_AS(outage_collision_sic(2.0, 10.0, 3, AccessLaw::random(25, 4), catalog), RandomLawUnsupported);
}

TEST_CASE("per-slot SINR law") {
    CHECK(sinr_pdf_given_L(0.7, 3.0, 0) == Approx(std::exp(-0.7 / 3.0) / 3.0).epsilon(1e-14));
    CHECK(sinr_pdf_given_L(0.0, 3.0, 2) == Approx((3.0 * 2 + 1) / 3.0).epsilon(1e-14));
    for (int L : {1, 2, 5})
        for (double th : {1.0, 10.0}) {
            CHECK(quad([&](double z) { return sinr_pdf_given_L(z, th, L); }, 0.0,
                       std::numeric_limits<double>::infinity()) == Approx(1.0).epsilon(1e-10));
            CHECK(quad([&](double z) { return sinr_pdf_given_L(z, th, L); }, 0.0, 2.0) ==
                  Approx(sinr_cdf_given_L(2.0, th, L)).epsilon(1e-10));
        }
}

TEST_CASE("interfered slot law") {
    const auto r = AccessLaw::random(25, 4);
    const InterferedSlotLaw two(5.0, 2, 1, r);
    for (double z : {0.0, 0.3, 2.0}) CHECK(two.pdf(z) == Approx(sinr_pdf_given_L(z, 5.0, 1)).epsilon(1e-14));
    CHECK_THROWS_AS(InterferedSlotLaw(5.0, 1, 0, r), DegenerateConditioning);

    const InterferedSlotLaw many(5.0, 12, 2, r);
    CHECK(quad([&](double z) { return many.pdf(z); }, 0.0, std::numeric_limits<double>::infinity()) ==
          Approx(1.0).epsilon(1e-9));
    CHECK(quad([&](double z) { return many.pdf(z); }, 0.0, 1.5) == Approx(many.cdf(1.5)).epsilon(1e-9));

    const auto s = AccessLaw::steiner(2, 4, 25);
    const InterferedSlotLaw st(5.0, 40, 1, s);
    for (const auto& [L, w] : st.weights()) {
        CHECK(L >= 1);
        CHECK(L <= s.D - 1);
    }
}

TEST_CASE("full MRC outage") {
    const auto r = AccessLaw::random(25, 4);
    CHECK(outage_full_mrc(2.0, 10.0, 1, r) == Approx(gamma_cdf(3.0, {4.0, 10.0})).epsilon(1e-12));
    CHECK(outage_full_mrc(1e-7, 10.0, 5, r) < 1e-9);

    // Sampling oracle of the same model: K' free slots and K-K' interfered
    // slots with L drawn from the conditional interferer law.
    for (const auto& law : {r, AccessLaw::steiner(2, 4, 25)}) {
        const int U = 6;
        const double theta = db(10);
        const double z = 3.0;
        std::mt19937_64 rng(5);
        std::vector<double> kp_weights;
        for (int k = 0; k <= law.K; ++k) kp_weights.push_back(p_cf(k, U, law));
        std::discrete_distribution<int> kp_draw(kp_weights.begin(), kp_weights.end());
        std::vector<std::discrete_distribution<int>> l_draw;
        for (int k = 0; k < law.K; ++k) {
            std::vector<double> w(U, 0.0);
            for (int l = 1; l < U; ++l) w[l] = p_int_cond(l, k, U, law);
            l_draw.emplace_back(w.begin(), w.end());
        }
        std::exponential_distribution<double> ex(1.0);
        const int n = 400000;
        int fails = 0;
        for (int i = 0; i < n; ++i) {
            const int kp = kp_draw(rng);
            double sinr = 0;
            for (int k = 0; k < kp; ++k) sinr += theta * ex(rng);
            for (int k = kp; k < law.K; ++k) {
                const int L = l_draw[std::min(kp, law.K - 1)](rng);
                double interf = 0;
                for (int l = 0; l < L; ++l) interf += ex(rng);
                sinr += theta * ex(rng) / (1 + theta * interf);
            }
            fails += sinr < z;
        }
        const double mc = fails / double(n);
        const double p = outage_full_mrc(2.0, theta, U, law);
        CHECK(std::abs(mc - p) < 4 * std::sqrt(p * (1 - p) / n) + 1e-4 * p);
    }
}

TEST_CASE("gamma self-fit") {
    for (const GammaParams truth : {GammaParams{2.5, 0.8}, GammaParams{1.3, 4.0}, GammaParams{6.0, 0.2}}) {
        auto density = [&](double z) { return gamma_pdf(z, truth); };
        const double upper = gamma_quantile(0.999, truth);
        const auto fit = fit_gamma_to_density(density, upper, {truth.shape * 1.3, truth.scale * 0.7});
        CHECK(fit.shape == Approx(truth.shape).epsilon(1e-6));
        CHECK(fit.scale == Approx(truth.scale).epsilon(1e-6));
    }
}

TEST_CASE("gamma fit is a local optimum") {
    const auto r = AccessLaw::random(25, 4);
    const double theta = db(20);
    const InterferedSlotLaw slot(theta, 10, 1, r);
    const auto fit = gamma_fit(theta, 10, 1, r, 2.0);
    auto density = [&](double z) { return slot.pdf(z); };
    const double best = gamma_fit_objective(density, 3.0, fit);
    // Frozen regression value of the squared-error integral on [0, 3].
    CHECK(best == Approx(0.01370594404).epsilon(1e-6));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nudge(0.0, 0.05);
    for (int i = 0; i < 20; ++i) {
        const GammaParams p{fit.shape * std::exp(nudge(rng)), fit.scale * std::exp(nudge(rng))};
        CHECK(best <= gamma_fit_objective(density, 3.0, p));
    }
}

TEST_CASE("sum of two gammas") {
    CHECK(gamma_sum_cdf(2.0, 1.5, 3.0, 2.0, 3.0) == Approx(gamma_cdf(2.0, {3.5, 3.0})).epsilon(1e-10));
    CHECK(gamma_sum_pdf(2.0, 1.5, 3.0, 2.0, 3.0) == Approx(gamma_pdf(2.0, {3.5, 3.0})).epsilon(1e-10));
    for (const auto& [a1, th, a2, al] : {std::tuple{2.0, 5.0, 1.3, 0.9}, std::tuple{1.0, 0.5, 2.7, 3.0}}) {
        for (double z : {0.5, 2.0, 6.0}) {
            const double conv = quad(
                [&](double x) { return gamma_pdf(x, {a1, th}) * gamma_pdf(z - x, {a2, al}); }, 0.0, z);
            CHECK(gamma_sum_pdf(z, a1, th, a2, al) == Approx(conv).epsilon(1e-8));
            CHECK(quad([&](double x) { return gamma_sum_pdf(x, a1, th, a2, al); }, 0.0, z) ==
                  Approx(gamma_sum_cdf(z, a1, th, a2, al)).epsilon(1e-8));
        }
    }
}

TEST_CASE("gamma approximation of the MRC outage") {
    const auto r = AccessLaw::random(25, 4);
    CHECK(outage_full_mrc_gamma(2.0, 10.0, 1, r) == Approx(gamma_cdf(3.0, {4.0, 10.0})).epsilon(1e-10));
    for (int U : {2, 5}) {
        const double a = outage_full_mrc(2.0, db(15), U, r);
        const double g = outage_full_mrc_gamma(2.0, db(15), U, r);
        CHECK(std::abs(g - a) <= 0.5 * a);
    }
}

TEST_CASE("pilot events") {
    const auto r = AccessLaw::random(25, 4);
    const auto none = pilot_event_probs(1, 4, r);
    CHECK(none.p_I == 0.0);
    CHECK(none.p_II == 0.0);
    const auto huge = pilot_event_probs(8, 1000000000, r);
    CHECK(huge.p_I < 1e-8);
    CHECK(huge.p_II < 1e-8);

    for (int U : {2, 3, 4})
        for (int Q : {2, 3}) {
            double p1 = 0, p2 = 0;
            for (int L = 0; L < U; ++L) {
                const auto [e1, e2] = oracle::pilot_events(L, Q);
                p1 += p_int(L, U, r) * e1;
                p2 += p_int(L, U, r) * e2;
            }
            const auto ev = pilot_event_probs(U, Q, r);
            CHECK(ev.p_I == Approx(p1).epsilon(1e-14));
            CHECK(ev.p_II == Approx(p2).epsilon(1e-14));
        }

    // Product index from 0: negative second term.
    CHECK(pilot_event_probs(3, 24, r, true).p_II < 0.0);
    CHECK(pilot_event_probs(3, 24, r).p_II >= 0.0);
}

TEST_CASE("pilot bound") {
    const auto r = AccessLaw::random(25, 4);
    // Two users: no interferer pair, so only the total-loss term remains.
    const auto ev = pilot_event_probs(2, 6, r);
    CHECK(ev.p_II == 0.0);
    CHECK(pilot_bound(2.0, 2, 6, r) == Approx(std::pow(ev.p_I, 4)).epsilon(1e-14));
    const double lo = pilot_bound(2.0, 10, 24, r);
    CHECK(lo > 0.0);
    CHECK(lo < pilot_bound(3.0, 10, 24, r));
    CHECK(pilot_bound(2.0, 10, 24, r) > pilot_bound(2.0, 10, 48, r));
}

TEST_CASE("activation marginalization") {
    auto fn = [](int u) { return 1.0 / (1.0 + u); };
    CHECK(marginalize_over_U(fn, {50, 1.0}) == Approx(fn(50)));
    CHECK(marginalize_over_U(fn, {50, 1.0}, Marginalization::Population) == Approx(fn(50)));
    CHECK(marginalize_over_U(fn, {50, 0.0}, Marginalization::Population) == 0.0);
    CHECK(marginalize_over_U(fn, {50, 0.0}) == Approx(fn(1)));

    const auto law = AccessLaw::steiner(2, 4, 25);
    auto point = [&](int u) { return outage_collision(2.0, db(15), u, law); };
    double peer = 0, pop = 0;
    for (int u = 1; u <= 50; ++u) {
        peer += binomial_pmf(u - 1, 49, 0.1) * point(u);
        pop += binomial_pmf(u, 50, 0.1) * point(u);
    }
    CHECK(std::abs(marginalize_over_U(point, {50, 0.1}) - peer) <= 1e-12);
    CHECK(std::abs(marginalize_over_U(point, {50, 0.1}, Marginalization::Population) - pop) <= 1e-12);
}

TEST_CASE("model dispatch") {
    const auto cb = load_system("S(2,4,25)");
    const auto catalog = StoppingSetCatalog::build_for_sic(cb);
    AnalyticSetup setup;
    setup.law = AccessLaw::of(cb);
    setup.catalog = &catalog;
    const double th = db(12);
    CHECK(point_outage(OutageModel::Collision, 2.0, th, 9, setup) == outage_collision(2.0, th, 9, setup.law));
    CHECK(point_outage(OutageModel::CollisionSic, 2.0, th, 9, setup) ==
          outage_collision_sic(2.0, th, 9, setup.law, catalog));
    CHECK(point_outage(OutageModel::FullMrc, 2.0, th, 9, setup) == outage_full_mrc(2.0, th, 9, setup.law));
    CHECK(point_outage(OutageModel::FullMrcGamma, 2.0, th, 9, setup) ==
          outage_full_mrc_gamma(2.0, th, 9, setup.law));
}
