#include <cmath>

#include "doctest.h"

#include "gfaccess/analytic.hpp"
#include "gfaccess/bundled.hpp"
#include "gfaccess/simulator.hpp"

using namespace gfaccess;
using doctest::Approx;

namespace {

double db(double x) { return std::pow(10.0, x / 10.0); }

ReceiverSpec receiver(ReceiverModel m) {
    ReceiverSpec s;
    s.model = m;
    return s;
}

}  // namespace

TEST_CASE("no activations") {
    const auto cb = load_system("S(2,4,25)");
    const auto est = simulate(cb, {50, 0.0, 2.0, 10.0}, receiver(ReceiverModel::Collision), 1000, 1, 1);
    CHECK(est.activations == 0);
    CHECK(est.outage_events == 0);
    CHECK(std::isnan(est.estimate));
}

TEST_CASE("same seed, same counts") {
    const auto cb = load_system("S(2,4,25)");
    for (auto m : {ReceiverModel::Collision, ReceiverModel::CollisionSic, ReceiverModel::FullMrc,
                   ReceiverModel::FullMrcSic}) {
        const FrameConfig cfg{50, 0.1, 2.0, db(10)};
        const auto a = simulate(cb, cfg, receiver(m), 5000, 42, 1);
        const auto b = simulate(cb, cfg, receiver(m), 5000, 42, 3);
        CHECK(a.activations == b.activations);
        CHECK(a.outage_events == b.outage_events);
        const auto c = simulate(cb, cfg, receiver(m), 5000, 43, 1);
        CHECK(c.activations != a.activations);
    }
}

TEST_CASE("hand-built frames") {
    // Two users on the same pattern never see a free slot.
    auto same = make_frame(6, {{0, 1, 2}, {0, 1, 2}}, {});
    CHECK(decode_collision(same, 1e9, 1.0) == std::vector<char>{0, 0});
    CHECK(decode_collision_sic(same, 1e9, 1.0) == std::vector<char>{0, 0});

    // Chain: B only reaches the threshold 2 once A's replica in slot 2 is cancelled.
    auto chain = make_frame(6, {{0, 1, 2}, {2, 3, 4}}, {{1.0, 1.0, 1.0}, {1.0, 0.5, 0.5}});
    const double R = std::log2(3.0);
    CHECK(decode_collision(chain, 1.5, R) == std::vector<char>{1, 0});
    CHECK(decode_collision_sic(chain, 1.5, R) == std::vector<char>{1, 1});
    CHECK(decode_collision(chain, 1e6, R) == std::vector<char>{1, 1});

    // Without interference the MRC receiver agrees with the collision receiver.
    auto apart = make_frame(9, {{0, 1, 2}, {3, 4, 5}}, {{0.2, 0.3, 0.1}, {1.0, 2.0, 0.5}});
    for (double th : {1.0, 3.0, 10.0})
        CHECK(decode_full_mrc(apart, th, 1.5, false) == decode_collision(apart, th, 1.5));

    // Tie at the threshold counts as a decode.
    auto single = make_frame(3, {{0, 1, 2}}, {{1.0, 1.0, 1.0}});
    CHECK(decode_collision(single, 1.0, 2.0) == std::vector<char>{1});
}

TEST_CASE("a stopping set stalls SIC at any SNR") {
    // The four Fano lines avoiding slot 0.
    const auto fano = load_system("S(2,3,7)");
    std::vector<std::vector<Slot>> pats;
    for (int p : {3, 4, 5, 6}) pats.push_back(fano.patterns()[p].slots);
    CHECK(decode_collision_sic(make_frame(7, pats, {}), 1e12, 0.1) == std::vector<char>(4, 0));
    CHECK(decode_full_mrc(make_frame(7, pats, {}), 1.0, 3.0, true) == std::vector<char>(4, 0));
}

TEST_CASE("MRC SINR falls as interference grows") {
    double last = 1e300;
    for (double g : {0.0, 0.5, 1.0, 4.0, 100.0}) {
        auto f = make_frame(6, {{0, 1, 2}, {2, 3, 4}}, {{1.0, 1.0, 1.0}, {g, 1.0, 1.0}});
        const double s = idealized_mrc_sinr(f, 0, 10.0);
        CHECK(s <= last);
        last = s;
    }
    // The interfered replica contributes at most |g|^2 / |g'|^2.
    auto f = make_frame(6, {{0, 1, 2}, {2, 3, 4}}, {{1.0, 1.0, 1.0}, {1e6, 1.0, 1.0}});
    CHECK(idealized_mrc_sinr(f, 0, 1e9) < 2e9 + 1.0);
}

TEST_CASE("exact combiner with single overlaps") {
    auto f = make_frame(9, {{0, 1, 2}, {2, 3, 4}, {0, 5, 6}, {1, 7, 8}}, {});
    f.users[0].gain = {{0.3, -1.1}, {0.7, 0.2}, {-0.4, 0.9}};
    f.users[1].gain = {{1.2, 0.1}, {-0.3, 0.5}, {0.8, 0.8}};
    f.users[2].gain = {{-0.6, -0.6}, {0.2, 1.4}, {0.1, 0.1}};
    f.users[3].gain = {{0.9, -0.2}, {0.5, 0.5}, {-1.0, 0.3}};
    for (auto& u : f.users)
        for (std::size_t p = 0; p < u.gain.size(); ++p) u.power[p] = std::norm(u.gain[p]);
    for (int u = 0; u < 4; ++u) CHECK(exact_mrc_sinr(f, u, 7.0) == Approx(idealized_mrc_sinr(f, u, 7.0)).epsilon(1e-9));

    // Two shared slots break the equivalence.
    auto g = make_frame(4, {{0, 1}, {0, 1}}, {});
    g.users[0].gain = {{1.0, 0.0}, {1.0, 0.0}};
    g.users[1].gain = {{1.0, 0.0}, {1.0, 0.0}};
    for (auto& u : g.users)
        for (std::size_t p = 0; p < u.gain.size(); ++p) u.power[p] = std::norm(u.gain[p]);
    CHECK(exact_mrc_sinr(g, 0, 5.0) != Approx(idealized_mrc_sinr(g, 0, 5.0)));
}

TEST_CASE("single-user frames follow the gamma law") {
    const auto cb = load_system("S(2,4,25)");
    const double theta = 2.0;
    const auto est = simulate(cb, {1, 1.0, 2.0, theta}, receiver(ReceiverModel::Collision), 200000, 9, 1);
    const double p = gamma_cdf(3.0, {4.0, theta});
    const double sigma = std::sqrt(p * (1 - p) / est.activations);
    CHECK(std::abs(est.estimate - p) < 3 * sigma);
}

TEST_CASE("collision simulation against the analytic value") {
    const auto cb = load_system("S(2,4,25)");
    const FrameConfig cfg{50, 0.1, 2.0, db(15)};
    const auto est = simulate(cb, cfg, receiver(ReceiverModel::Collision), 300000, 2024, 0);
    const auto law = AccessLaw::of(cb);
    const double p = marginalize_over_U([&](int u) { return outage_collision(2.0, cfg.theta, u, law); }, {50, 0.1});
    const double sigma = std::sqrt(p * (1 - p) / est.activations);
    CHECK(std::abs(est.estimate - p) < 3 * sigma);
    CHECK(est.ci_low <= est.estimate);
    CHECK(est.ci_high >= est.estimate);
}

TEST_CASE("full MRC simulation against the analytic value, random law") {
    const auto cb = PatternCodebook::random(25, 4);
    const FrameConfig cfg{50, 0.1, 2.0, db(15)};
    const auto est = simulate(cb, cfg, receiver(ReceiverModel::FullMrc), 200000, 77, 0);
    const double p = marginalize_over_U(
        [&](int u) { return outage_full_mrc(2.0, cfg.theta, u, AccessLaw::random(25, 4)); }, {50, 0.1});
    const double sigma = std::sqrt(p * (1 - p) / est.activations);
    CHECK(std::abs(est.estimate - p) < 3 * sigma + 0.05 * p);
}

TEST_CASE("receiver dominance") {
    // SIC can only add decodes; the MRC receiver never loses a clean replica.
    const auto cb = load_system("S(2,4,25)");
    for (double b : {0.05, 0.2}) {
        const FrameConfig cfg{50, b, 2.0, db(12)};
        const auto col = simulate(cb, cfg, receiver(ReceiverModel::Collision), 20000, 5, 1);
        const auto sic = simulate(cb, cfg, receiver(ReceiverModel::CollisionSic), 20000, 5, 1);
        const auto mrc = simulate(cb, cfg, receiver(ReceiverModel::FullMrc), 20000, 5, 1);
        const auto mrcsic = simulate(cb, cfg, receiver(ReceiverModel::FullMrcSic), 20000, 5, 1);
        CHECK(sic.outage_events <= col.outage_events);
        CHECK(mrc.outage_events <= col.outage_events);
        CHECK(mrcsic.outage_events <= mrc.outage_events);
    }
}

TEST_CASE("scheduled pilots leave the Steiner receiver untouched") {
    const auto cb = load_system("S(2,4,25)");
    const FrameConfig cfg{50, 0.1, 2.0, db(15)};
    auto spec = receiver(ReceiverModel::FullMrcSic);
    const auto clean = simulate(cb, cfg, spec, 20000, 8, 1);
    spec.impairments.pilots = 8;
    const auto piloted = simulate(cb, cfg, spec, 20000, 8, 1);
    CHECK(piloted.outage_events == clean.outage_events);
    spec.impairments.pilots = 7;
    CHECK_THROWS_AS(simulate(cb, cfg, spec, 10, 8, 1), InsufficientPilots);
}

TEST_CASE("a single pilot erases every collided replica") {
    const auto cb = PatternCodebook::random(25, 4);
    const FrameConfig cfg{50, 0.1, 2.0, db(15)};
    auto col = receiver(ReceiverModel::Collision);
    auto mrc = receiver(ReceiverModel::FullMrc);
    mrc.impairments.pilots = 1;
    const auto a = simulate(cb, cfg, col, 20000, 4, 1);
    const auto b = simulate(cb, cfg, mrc, 20000, 4, 1);
    CHECK(a.activations == b.activations);
    CHECK(a.outage_events == b.outage_events);
}

TEST_CASE("pilot contamination hurts random access with SIC") {
    const auto cb = PatternCodebook::random(25, 4);
    const FrameConfig cfg{50, 0.2, 2.0, db(20)};
    auto spec = receiver(ReceiverModel::FullMrcSic);
    const auto ideal = simulate(cb, cfg, spec, 20000, 6, 1);
    spec.impairments.pilots = 24;
    const auto impaired = simulate(cb, cfg, spec, 20000, 6, 1);
    CHECK(impaired.activations == ideal.activations);
    CHECK(impaired.outage_events > ideal.outage_events);
}

TEST_CASE("Steiner population cap") {
    const auto cb = load_system("S(2,3,7)");
    CHECK_THROWS_AS(simulate(cb, {8, 0.5, 1.0, 1.0}, receiver(ReceiverModel::Collision), 10, 1, 1), UTooLarge);
}

TEST_CASE("Wilson interval") {
    auto [lo, hi] = wilson_interval(0, 100);
    CHECK(lo == 0.0);
    CHECK(hi == Approx(0.03699).epsilon(1e-3));
    std::tie(lo, hi) = wilson_interval(50, 100);
    CHECK(lo == Approx(0.4038).epsilon(1e-3));
    CHECK(hi == Approx(0.5962).epsilon(1e-3));
}
