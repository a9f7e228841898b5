#include "gfaccess/analytic.hpp"

#include <algorithm>
#include <cmath>

namespace gfaccess {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

double outage_collision(double R, double theta, int U, const AccessLaw& law) {
    const double z = sinr_threshold(R);
    double p = p_cf(0, U, law);
    for (int Kp = 1; Kp <= law.K; ++Kp) {
        const double w = p_cf(Kp, U, law);
        if (w > 0) p += w * gamma_cdf(z, {static_cast<double>(Kp), theta});
    }
    return clamp01(p);
}

double residual_snr(double R, double theta, int U, const AccessLaw& law) {
    const double z = sinr_threshold(R);
    double r = 0.0;
    for (int Kp = 0; Kp <= law.K; ++Kp) {
        const double w = p_cf(Kp, U, law);
        if (w > 0) r += (z - truncated_gamma_mean(z, Kp, theta)) * w;
    }
    return std::min(z, std::max(0.0, r));
}

namespace {

// Per-U quantities reused across the SIC sums.
class SicTables {
public:
    SicTables(double R, double theta, int U, const AccessLaw& law) : theta_(theta) {
        p_out_.assign(static_cast<std::size_t>(U) + 1, 0.0);
        k_hat_.assign(static_cast<std::size_t>(U) + 1, 0.0);
        for (int u = 1; u <= U; ++u) {
            p_out_[static_cast<std::size_t>(u)] = outage_collision(R, theta, u, law);
            k_hat_[static_cast<std::size_t>(u)] = expected_free_slots(u, law);
        }
        rho_res_ = residual_snr(R, theta, U, law);
    }

    double p_out(int u) const { return p_out_[static_cast<std::size_t>(u)]; }

    double round2(int l1, int U) const {
        if (rho_res_ <= 0) return 0.0;
        const double gain = k_hat_[static_cast<std::size_t>(U - l1)] - k_hat_[static_cast<std::size_t>(U)];
        if (gain <= 1e-12) return 1.0;
        return gamma_cdf(rho_res_, {gain, theta_});
    }

    double conditional(int U, int S) const {
        const double p = p_out(U);
        const int peers = U - 1 - S;
        double total = std::pow(p, U - S);
        for (int l1 = 1; l1 <= peers; ++l1) {
            const double w1 = binomial_pmf(l1, peers, 1.0 - p);
            if (w1 == 0) continue;
            const double p2 = round2(l1, U);
            double inner = 0.0;
            for (int l2 = 0; l2 <= peers - l1; ++l2) {
                inner += binomial_pmf(l2, peers - l1, 1.0 - p2) * p_out(U - l1 - l2);
            }
            total += w1 * inner;
        }
        return clamp01(total);
    }

private:
    double theta_;
    std::vector<double> p_out_;
    std::vector<double> k_hat_;
    double rho_res_ = 0.0;
};

}  // namespace

double outage_sic_round2(int l1, double R, double theta, int U, const AccessLaw& law) {
    if (l1 < 1 || l1 > U - 1) throw std::invalid_argument("outage_sic_round2: need 1 <= l1 <= U-1");
    const double rho = residual_snr(R, theta, U, law);
    if (rho <= 0) return 0.0;
    const double gain = expected_free_slots(U - l1, law) - expected_free_slots(U, law);
    if (gain <= 1e-12) return 1.0;
    return gamma_cdf(rho, {gain, theta});
}

double outage_sic_conditional(double R, double theta, int U, int S, const AccessLaw& law) {
    if (S < 0 || S > U - 1) throw std::invalid_argument("outage_sic_conditional: need 0 <= S <= U-1");
    return SicTables(R, theta, U, law).conditional(U, S);
}

double q1_stopping(int n, int U, long long stopping_sets, long long C) {
    if (stopping_sets <= 0 || U < n || n < 1) return 0.0;
    const double trials = binomial(U, n);
    const double log_p = std::log(static_cast<double>(stopping_sets)) - log_binomial(static_cast<double>(C), n);
    const double p = std::exp(log_p);
    if (p >= 1.0) return trials == 1.0 ? 1.0 : 0.0;
    return std::exp(std::log(trials) + log_p + (trials - 1.0) * std::log1p(-p));
}

double outage_collision_sic(double R, double theta, int U, const AccessLaw& law, const StoppingSetCatalog& catalog,
                            const std::optional<std::vector<int>>& orders) {
    if (!law.is_steiner()) throw RandomLawUnsupported("the SIC approximation is defined for Steiner codebooks only");
    const SicTables tables(R, theta, U, law);
    const std::vector<int> used = orders ? *orders : catalog.sic_orders();

    double q_total = 0.0;
    double mixture = 0.0;
    for (int n : used) {
        const auto e = catalog.entry(n);
        if (!e || !e->exhaustive) throw std::invalid_argument("catalog has no exhaustive entry for order " + std::to_string(n));
        const double q = q1_stopping(n, U, e->count, law.C);
        if (q == 0) continue;
        q_total += q;
        const double member = static_cast<double>(n) / U;
        const double rest = n < U ? tables.conditional(U, n) : 0.0;
        mixture += q * (member + (1.0 - member) * rest);
    }
    return clamp01(mixture + tables.conditional(U, 0) * (1.0 - q_total));
}

double sinr_pdf_given_L(double z, double theta, int L) {
    if (z < 0) return 0.0;
    return std::exp(-z / theta) * (theta * L + z + 1.0) / (theta * std::pow(z + 1.0, L + 1));
}

double sinr_cdf_given_L(double z, double theta, int L) {
    if (z <= 0) return 0.0;
    return -std::expm1(-z / theta - L * std::log1p(z));
}

InterferedSlotLaw::InterferedSlotLaw(double theta, int U, int Kp, const AccessLaw& law) : theta_(theta) {
    double total = 0.0;
    for (int L = 1; L <= U - 1; ++L) {
        const double w = p_int_cond(L, Kp, U, law);
        if (w > 0) {
            weights_.emplace_back(L, w);
            total += w;
        }
    }
    if (!(total > 0)) {
        throw DegenerateConditioning("no interfered slot is possible for U=" + std::to_string(U) +
                                     ", K'=" + std::to_string(Kp));
    }
    for (auto& [L, w] : weights_) w /= total;
}

double InterferedSlotLaw::pdf(double z) const {
    double f = 0.0;
    for (const auto& [L, w] : weights_) f += w * sinr_pdf_given_L(z, theta_, L);
    return f;
}

double InterferedSlotLaw::cdf(double z) const {
    double F = 0.0;
    for (const auto& [L, w] : weights_) F += w * sinr_cdf_given_L(z, theta_, L);
    return F;
}

double i_sinr_pdf(double z, double theta, int U, int Kp, const AccessLaw& law) {
    return InterferedSlotLaw(theta, U, Kp, law).pdf(z);
}

double outage_full_mrc(double R, double theta, int U, const AccessLaw& law, const MrcOptions& options) {
    const double z = sinr_threshold(R);
    if (z <= 0) return 0.0;
    const int K = law.K;
    double total = 0.0;
    for (int Kp = 0; Kp <= K; ++Kp) {
        const double w = p_cf(Kp, U, law);
        if (w <= 0) continue;
        if (Kp == K) {
            total += w * gamma_cdf(z, {static_cast<double>(K), theta});
            continue;
        }
        const InterferedSlotLaw slot(theta, U, Kp, law);
        const DiscretizedPdf f =
            DiscretizedPdf::sample([&](double s) { return slot.pdf(s); }, z, options.intervals);
        double cdf = 0.0;
        if (Kp > 0) {
            const std::vector<DiscretizedPdf> parts(static_cast<std::size_t>(K - Kp), f);
            const GammaParams g{static_cast<double>(Kp), theta};
            cdf = cdf_of_convolution(parts, [&](double s) { return gamma_cdf(s, g); }, z);
        } else {
            const std::vector<DiscretizedPdf> parts(static_cast<std::size_t>(K - 1), f);
            cdf = cdf_of_convolution(parts, [&](double s) { return slot.cdf(s); }, z);
        }
        total += w * cdf;
    }
    return clamp01(total);
}

double marginalize_over_U(const std::function<double(int)>& point_fn, const ActivationLaw& activation,
                          Marginalization convention, double eps_cut) {
    const int N = activation.N;
    if (N < 1) return 0.0;
    std::vector<double> w(static_cast<std::size_t>(N) + 1, 0.0);
    for (int u = 1; u <= N; ++u) {
        w[static_cast<std::size_t>(u)] = convention == Marginalization::Peer
                                             ? binomial_pmf(u - 1, N - 1, activation.b)
                                             : binomial_pmf(u, N, activation.b);
    }
    double mass = 0.0;
    for (double x : w) mass += x;
    if (mass == 0.0) return 0.0;

    // Grow a window around the mode until the mass left outside is below eps_cut.
    int lo = static_cast<int>(std::max_element(w.begin() + 1, w.end()) - w.begin());
    int hi = lo;
    double inside = w[static_cast<std::size_t>(lo)];
    while (mass - inside > eps_cut && (lo > 1 || hi < N)) {
        const double left = lo > 1 ? w[static_cast<std::size_t>(lo - 1)] : -1.0;
        const double right = hi < N ? w[static_cast<std::size_t>(hi + 1)] : -1.0;
        if (left >= right) {
            inside += w[static_cast<std::size_t>(--lo)];
        } else {
            inside += w[static_cast<std::size_t>(++hi)];
        }
    }
    double sum = 0.0;
    for (int u = lo; u <= hi; ++u) {
        const double wu = w[static_cast<std::size_t>(u)];
        if (wu > 0) sum += wu * point_fn(u);
    }
    return sum;
}

std::string to_string(OutageModel model) {
    switch (model) {
        case OutageModel::Collision: return "collision";
        case OutageModel::CollisionSic: return "collision-sic";
        case OutageModel::FullMrc: return "mrc";
        case OutageModel::FullMrcGamma: return "mrc-gamma";
    }
    return "unknown";
}

double point_outage(OutageModel model, double R, double theta, int U, const AnalyticSetup& setup) {
    switch (model) {
        case OutageModel::Collision: return outage_collision(R, theta, U, setup.law);
        case OutageModel::CollisionSic:
            if (!setup.catalog) throw std::invalid_argument("collision-sic needs a stopping-set catalog");
            return outage_collision_sic(R, theta, U, setup.law, *setup.catalog);
        case OutageModel::FullMrc: return outage_full_mrc(R, theta, U, setup.law, setup.mrc);
        case OutageModel::FullMrcGamma: return outage_full_mrc_gamma(R, theta, U, setup.law);
    }
    throw std::invalid_argument("unknown outage model");
}

}  // namespace gfaccess
