#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "gfaccess/analytic.hpp"

namespace gfaccess {

struct RateSolution {
    double R_star = 0.0;
    /// bN * R* / M
    double spectral_efficiency = 0.0;
    bool feasible = false;
    /// The target holds at the top of the bracket; R* is the bracket top.
    bool unbounded = false;
    std::string model;
    double eps_target = 0.0;
    double bN = 0.0;
    double R_upper = 0.0;
};

/// Largest R in [0, R_upper] with outage(R) <= eps, by bisection to `tolerance`.
/// outage must be non-decreasing in R.
RateSolution max_rate(const std::function<double(double)>& outage, double eps, double R_upper,
                      double tolerance = 1e-3);

/// log2(1 + F^{-1}_gam(eps; K, theta)); eps is capped at 1 - 1e-12.
double orthogonal_rate(int K, double theta, double eps);

/// theta for a fixed total theta*K given in dB.
double theta_per_repetition(double theta_k_db, int K);

struct CurveRequest {
    OutageModel model = OutageModel::FullMrc;
    AnalyticSetup setup;
    /// Population size; b = bN / N.
    int N = 0;
    double theta = 1.0;
    double eps = 1e-5;
    double tolerance = 1e-3;
    Marginalization convention = Marginalization::Peer;
};

/// One RateSolution per bN. The marginalization drops tail mass below eps*1e-3.
std::vector<RateSolution> rate_curve(const CurveRequest& request, const std::vector<double>& bN_grid);

/// Smallest bN with R*/M < R_orth/(C K), linearly interpolated between grid
/// points. Throws NoCrossover if the curve never drops below.
double crossover_traffic(const std::vector<RateSolution>& curve, int K, double theta, double eps, int M, long long C);

/// Columns: system,model,bN,theta_db,R_star,spectral_eff,feasible,unbounded
void write_curve_csv_header(std::ostream& out);
void write_curve_csv_rows(std::ostream& out, const std::string& system, double theta_db,
                          const std::vector<RateSolution>& curve);

}  // namespace gfaccess
