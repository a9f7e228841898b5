#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gfaccess/analytic.hpp"

namespace gfaccess {

double gamma_fit_objective(const std::function<double(double)>& density, double upper, GammaParams params) {
    return gauss_legendre_64(
        [&](double z) {
            const double d = density(z) - gamma_pdf(z, params);
            return d * d;
        },
        0.0, upper);
}

GammaParams moment_matched_start(const std::function<double(double)>& density, double upper) {
    const double m0 = gauss_legendre_64(density, 0.0, upper);
    const double m1 = gauss_legendre_64([&](double z) { return z * density(z); }, 0.0, upper) / m0;
    const double m2 = gauss_legendre_64([&](double z) { return z * z * density(z); }, 0.0, upper) / m0;
    const double var = std::max(m2 - m1 * m1, 1e-12 * m1 * m1);
    return {m1 * m1 / var, var / m1};
}

GammaParams fit_gamma_to_density(const std::function<double(double)>& density, double upper, GammaParams start) {
    using Point = std::array<double, 2>;
    auto objective = [&](const Point& p) {
        const double v = gamma_fit_objective(density, upper, {std::exp(p[0]), std::exp(p[1])});
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::array<Point, 3> x{Point{std::log(start.shape), std::log(start.scale)}};
    x[1] = {x[0][0] + 0.2, x[0][1]};
    x[2] = {x[0][0], x[0][1] + 0.2};
    std::array<double, 3> f{objective(x[0]), objective(x[1]), objective(x[2])};

    auto order = [&] {
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (f[j] < f[i]) {
                    std::swap(f[i], f[j]);
                    std::swap(x[i], x[j]);
                }
    };
    auto along = [](const Point& c, const Point& w, double t) {
        return Point{c[0] + t * (w[0] - c[0]), c[1] + t * (w[1] - c[1])};
    };

    double previous = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 5000; ++it) {
        order();
        const double size = std::max({std::abs(x[1][0] - x[0][0]), std::abs(x[1][1] - x[0][1]),
                                      std::abs(x[2][0] - x[0][0]), std::abs(x[2][1] - x[0][1])});
        const bool flat = std::abs(previous - f[0]) <= 1e-8 * std::abs(f[0]) && f[2] - f[0] <= 1e-8 * std::abs(f[0]);
        if (size < 1e-10 || (flat && size < 1e-6)) break;
        previous = f[0];

        const Point c{0.5 * (x[0][0] + x[1][0]), 0.5 * (x[0][1] + x[1][1])};
        const Point xr = along(c, x[2], -1.0);
        const double fr = objective(xr);
        if (fr < f[0]) {
            const Point xe = along(c, x[2], -2.0);
            const double fe = objective(xe);
            if (fe < fr) {
                x[2] = xe;
                f[2] = fe;
            } else {
                x[2] = xr;
                f[2] = fr;
            }
        } else if (fr < f[1]) {
            x[2] = xr;
            f[2] = fr;
        } else {
            const bool outside = fr < f[2];
            const Point xc = along(c, x[2], outside ? -0.5 : 0.5);
            const double fc = objective(xc);
            if (fc < (outside ? fr : f[2])) {
                x[2] = xc;
                f[2] = fc;
            } else {
                for (int i = 1; i < 3; ++i) {
                    x[i] = along(x[0], x[i], 0.5);
                    f[i] = objective(x[i]);
                }
            }
        }
    }
    order();
    const GammaParams best{std::exp(x[0][0]), std::exp(x[0][1])};
    if (!std::isfinite(f[0]) || !(best.shape > 0) || !(best.scale > 0) || !std::isfinite(best.shape) ||
        !std::isfinite(best.scale)) {
        throw OptimizerFailed("gamma fit did not reach a finite objective", best.shape, best.scale);
    }
    return best;
}

GammaParams gamma_fit(double theta, int U, int Kp, const AccessLaw& law, double R) {
    using Key = std::tuple<std::string, int, int, double, double>;
    static std::mutex mutex;
    static std::map<Key, GammaParams> cache;
    const Key key{law.key(), U, Kp, theta, R};
    {
        std::lock_guard<std::mutex> lock(mutex);
        const auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const InterferedSlotLaw slot(theta, U, Kp, law);
    const auto density = [&](double z) { return slot.pdf(z); };
    const double upper = sinr_threshold(R);
    const GammaParams fit = fit_gamma_to_density(density, upper, moment_matched_start(density, upper));
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace(key, fit);
    return fit;
}

double gamma_sum_pdf(double z, double a1, double theta, double a2, double alpha) {
    if (z <= 0) return 0.0;
    if (a1 <= 0) return gamma_pdf(z, {a2, alpha});
    if (a2 <= 0) return gamma_pdf(z, {a1, theta});
    const double kappa = a1 + a2;
    const double log_f = a1 * std::log(alpha / theta) - kappa * std::log(alpha) + (kappa - 1) * std::log(z) -
                         z / alpha - std::lgamma(kappa) + log_kummer_1f1(a1, kappa, z / alpha - z / theta);
    return std::exp(log_f);
}

double gamma_sum_cdf(double z, double a1, double theta, double a2, double alpha) {
    if (z <= 0) return 0.0;
    if (a1 <= 0) return gamma_cdf(z, {a2, alpha});
    if (a2 <= 0) return gamma_cdf(z, {a1, theta});
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double s) { return gamma_sum_pdf(s, a1, theta, a2, alpha); }, 0.0, z, 15, 1e-12);
    return std::min(1.0, std::max(0.0, v));
}

double outage_full_mrc_gamma(double R, double theta, int U, const AccessLaw& law) {
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
        const GammaParams fit = gamma_fit(theta, U, Kp, law, R);
        total += w * gamma_sum_cdf(z, Kp, theta, (K - Kp) * fit.shape, fit.scale);
    }
    return std::min(1.0, std::max(0.0, total));
}

}  // namespace gfaccess
