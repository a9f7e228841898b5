#pragma once

#include <functional>
#include <vector>

#include "gfaccess/errors.hpp"

namespace gfaccess {

struct GammaParams {
    double shape = 1.0;
    double scale = 1.0;
};

/// Density and regularized lower incomplete gamma cdf. Shape 0 is treated
/// as a point mass at the origin.
double gamma_pdf(double x, GammaParams params);
double gamma_cdf(double x, GammaParams params);
/// Bisection on the cdf; p is capped at 1 - 1e-12.
double gamma_quantile(double p, GammaParams params);

/// E[X | X < z] for X ~ gamma(shape, scale); 0 for shape 0.
double truncated_gamma_mean(double z, double shape, double scale);

/// Regularized incomplete beta at x/(1+x).
double beta_prime_cdf(double x, double alpha, double beta);

/// Series for 1F1(a; b; x), relative tolerance 1e-10. Throws NoConvergence.
double kummer_1f1(double a, double b, double x);
/// log 1F1 for a >= 0 and b - a >= 0 (all-positive series after Kummer's
/// transformation for negative x).
double log_kummer_1f1(double a, double b, double x);

/// Density sampled at z_i = i * dz, i = 0 .. values.size()-1. A Dirac pdf
/// carries no samples and acts as the identity under convolution.
struct DiscretizedPdf {
    double dz = 0.0;
    std::vector<double> values;
    bool dirac = false;

    static DiscretizedPdf delta(double dz);
    /// Samples fn on [0, z_max] with `intervals` steps.
    static DiscretizedPdf sample(const std::function<double(double)>& fn, double z_max, int intervals);

    double z_max() const { return values.empty() ? 0.0 : dz * static_cast<double>(values.size() - 1); }
    /// Trapezoidal mass on the sampled support.
    double mass() const;
};

/// Trapezoidal discrete convolution truncated to the shorter support.
/// Throws GridMismatch for different steps.
DiscretizedPdf convolve(const DiscretizedPdf& f, const DiscretizedPdf& g);

/// P(Y + X_1 + ... + X_n <= z) where Y has cdf `cdf_factor` and X_i have
/// the sampled densities. z must be a grid point of the shared grid.
double cdf_of_convolution(const std::vector<DiscretizedPdf>& fs, const std::function<double(double)>& cdf_factor,
                          double z);

/// Integral of fn over [a, b] by 64-point Gauss-Legendre.
double gauss_legendre_64(const std::function<double(double)>& fn, double a, double b);

}  // namespace gfaccess
