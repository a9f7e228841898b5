#include "gfaccess/optimizer.hpp"

#include <cmath>
#include <ostream>

namespace gfaccess {

RateSolution max_rate(const std::function<double(double)>& outage, double eps, double R_upper, double tolerance) {
    RateSolution sol;
    sol.eps_target = eps;
    sol.R_upper = R_upper;
    if (outage(R_upper) <= eps) {
        sol.R_star = R_upper;
        sol.feasible = true;
        sol.unbounded = true;
        return sol;
    }
    if (outage(tolerance) > eps) return sol;
    double lo = tolerance;
    double hi = R_upper;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (outage(mid) <= eps) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    sol.R_star = lo;
    sol.feasible = true;
    return sol;
}

double orthogonal_rate(int K, double theta, double eps) {
    return std::log2(1.0 + gamma_quantile(eps, {static_cast<double>(K), theta}));
}

double theta_per_repetition(double theta_k_db, int K) { return std::pow(10.0, theta_k_db / 10.0) / K; }

std::vector<RateSolution> rate_curve(const CurveRequest& request, const std::vector<double>& bN_grid) {
    const int K = request.setup.law.K;
    const double R_upper = orthogonal_rate(K, request.theta, request.eps) + 1.0;
    std::vector<RateSolution> curve;
    for (double bN : bN_grid) {
        const ActivationLaw activation{request.N, std::min(1.0, bN / request.N)};
        auto outage = [&](double R) {
            return marginalize_over_U(
                [&](int u) { return point_outage(request.model, R, request.theta, u, request.setup); }, activation,
                request.convention, request.eps * 1e-3);
        };
        RateSolution sol = max_rate(outage, request.eps, R_upper, request.tolerance);
        sol.model = to_string(request.model);
        sol.bN = bN;
        sol.spectral_efficiency = bN * sol.R_star / request.setup.law.M;
        curve.push_back(sol);
    }
    return curve;
}

double crossover_traffic(const std::vector<RateSolution>& curve, int K, double theta, double eps, int M, long long C) {
    const double orth = orthogonal_rate(K, theta, eps) / (static_cast<double>(C) * K);
    double prev_bn = 0.0;
    double prev_gap = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double gap = curve[i].R_star / M - orth;
        if (gap < 0) {
            if (i == 0) return curve[i].bN;
            return prev_bn + (curve[i].bN - prev_bn) * prev_gap / (prev_gap - gap);
        }
        prev_bn = curve[i].bN;
        prev_gap = gap;
    }
    throw NoCrossover("orthogonal allocation never becomes more efficient on this bN grid");
}

void write_curve_csv_header(std::ostream& out) {
    out << "system,model,bN,theta_db,R_star,spectral_eff,feasible,unbounded\n";
}

void write_curve_csv_rows(std::ostream& out, const std::string& system, double theta_db,
                          const std::vector<RateSolution>& curve) {
    for (const auto& s : curve) {
        out << '"' << system << '"' << ',' << s.model << ',' << s.bN << ',' << theta_db << ',' << s.R_star << ','
            << s.spectral_efficiency << ',' << (s.feasible ? 1 : 0) << ',' << (s.unbounded ? 1 : 0) << '\n';
    }
}

}  // namespace gfaccess
