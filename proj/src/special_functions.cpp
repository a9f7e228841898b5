#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "gfaccess/errors.hpp"
#include "gfaccess/numerics.hpp"

namespace gfaccess {

namespace {

constexpr int kSeriesCap = 1000000;

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// sum_{n>=0} x^n / (s (s+1) ... (s+n)), the series behind gamma(s, x).
double lower_gamma_series(double s, double x) {
    double term = 1.0 / s;
    double sum = term;
    for (int n = 1; n < kSeriesCap; ++n) {
        term *= x / (s + n);
        sum += term;
        if (term < sum * 1e-17) return sum;
    }
    throw NoConvergence("lower incomplete gamma series did not converge");
}

}  // namespace

double gamma_pdf(double x, GammaParams p) {
    if (x < 0) return 0.0;
    if (p.shape <= 0) return 0.0;
    return boost::math::gamma_p_derivative(p.shape, x / p.scale) / p.scale;
}

double gamma_cdf(double x, GammaParams p) {
    if (p.shape <= 0) return x >= 0 ? 1.0 : 0.0;
    if (x <= 0) return 0.0;
    if (!std::isfinite(x)) return 1.0;
    return boost::math::gamma_p(p.shape, x / p.scale);
}

double gamma_quantile(double prob, GammaParams p) {
    if (prob <= 0) return 0.0;
    prob = std::min(prob, 1.0 - 1e-12);
    double lo = 0.0;
    double hi = p.scale * std::max(1.0, p.shape);
    while (gamma_cdf(hi, p) < prob) {
        lo = hi;
        hi *= 2;
    }
    for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (gamma_cdf(mid, p) < prob) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double truncated_gamma_mean(double z, double shape, double scale) {
    if (shape <= 0) return 0.0;
    if (!std::isfinite(z)) return shape * scale;
    const double x = z / scale;
    if (x <= 0) return 0.0;
    const double pk = boost::math::gamma_p(shape, x);
    if (pk > 1e-250) return scale * shape * boost::math::gamma_p(shape + 1, x) / pk;
    // Deep left tail: gamma(s+1,x)/gamma(s,x) = x * S(s+1) / S(s).
    return scale * x * lower_gamma_series(shape + 1, x) / lower_gamma_series(shape, x);
}

double beta_prime_cdf(double x, double alpha, double beta) {
    if (x <= 0) return 0.0;
    if (!std::isfinite(x)) return 1.0;
    if (x > 1) return boost::math::ibetac(beta, alpha, 1.0 / (1.0 + x));
    return boost::math::ibeta(alpha, beta, x / (1.0 + x));
}

double kummer_1f1(double a, double b, double x) {
    if (b <= 0) throw std::invalid_argument("kummer_1f1: b must be positive");
    if (x < 0) return std::exp(x) * kummer_1f1(b - a, b, -x);
    if (a == 0 || x == 0) return 1.0;
    double term = 1.0;
    double sum = 1.0;
    for (int n = 0; n < kSeriesCap; ++n) {
        term *= (a + n) * x / ((b + n) * (n + 1));
        sum += term;
        if (term == 0.0) return sum;
        if (std::abs(term) <= 1e-16 * std::abs(sum) && n + 1 > x && n + 1 > std::abs(a)) return sum;
    }
    throw NoConvergence("kummer_1f1: series did not converge");
}

double log_kummer_1f1(double a, double b, double x) {
    if (b <= 0) throw std::invalid_argument("log_kummer_1f1: b must be positive");
    if (x < 0) return x + log_kummer_1f1(b - a, b, -x);
    if (a < 0) throw std::invalid_argument("log_kummer_1f1: needs a >= 0 and b - a >= 0");
    if (a == 0 || x == 0) return 0.0;
    const double lx = std::log(x);
    double lterm = 0.0;
    double lsum = 0.0;
    for (int n = 0; n < kSeriesCap; ++n) {
        lterm += std::log(a + n) + lx - std::log(b + n) - std::log(n + 1.0);
        lsum = log_add(lsum, lterm);
        if (lterm - lsum < -39.0 && n + 1 > x && n + 1 > a) return lsum;
    }
    throw NoConvergence("log_kummer_1f1: series did not converge");
}

double gauss_legendre_64(const std::function<double(double)>& fn, double a, double b) {
    constexpr int N = 64;
    static const auto rule = [] {
        std::vector<std::pair<double, double>> nodes;
        for (int i = 1; i <= N / 2; ++i) {
            double x = std::cos(std::numbers::pi * (i - 0.25) / (N + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0;
                double p1 = x;
                for (int k = 2; k <= N; ++k) {
                    const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N * (x * p1 - p0) / (x * x - 1);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            const double w = 2.0 / ((1 - x * x) * dp * dp);
            nodes.emplace_back(x, w);
            nodes.emplace_back(-x, w);
        }
        return nodes;
    }();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (const auto& [x, w] : rule) sum += w * fn(mid + half * x);
    return sum * half;
}

}  // namespace gfaccess
