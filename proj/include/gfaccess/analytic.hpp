#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gfaccess/combinatorics.hpp"
#include "gfaccess/numerics.hpp"
#include "gfaccess/stopping_sets.hpp"

namespace gfaccess {

/// 2^R - 1, the SINR a packet at rate R needs.
inline double sinr_threshold(double R) { return std::exp2(R) - 1.0; }

// ---- collision model -------------------------------------------------------

double outage_collision(double R, double theta, int U, const AccessLaw& law);

// ---- collision model with SIC ----------------------------------------------

/// Mean SNR still missing for users that failed the first round.
double residual_snr(double R, double theta, int U, const AccessLaw& law);

/// Outage in the second SIC round after l1 first-round decodes. The gamma
/// shape is the slot gain K^(U-l1) - K^(U) >= 0.
double outage_sic_round2(int l1, double R, double theta, int U, const AccessLaw& law);

/// Outage given S non-cancelable peers; SIC is halted after the third round.
double outage_sic_conditional(double R, double theta, int U, int S, const AccessLaw& law);

/// Probability of exactly one order-n stopping set among U active users.
double q1_stopping(int n, int U, long long stopping_sets, long long C);

/// Stopping-set weighted SIC outage. Steiner only (RandomLawUnsupported
/// otherwise). `orders` overrides the catalog's {n', n'+1} choice.
double outage_collision_sic(double R, double theta, int U, const AccessLaw& law, const StoppingSetCatalog& catalog,
                            const std::optional<std::vector<int>>& orders = std::nullopt);

// ---- full MRC --------------------------------------------------------------

double sinr_pdf_given_L(double z, double theta, int L);
/// 1 - e^{-z/theta} / (1+z)^L
double sinr_cdf_given_L(double z, double theta, int L);

/// SINR law of an interfered slot: mixture over L >= 1 of the per-L law
/// with the conditional interferer pmf renormalized.
class InterferedSlotLaw {
public:
    /// Throws DegenerateConditioning when no interferer is possible.
    InterferedSlotLaw(double theta, int U, int Kp, const AccessLaw& law);

    double pdf(double z) const;
    double cdf(double z) const;
    const std::vector<std::pair<int, double>>& weights() const { return weights_; }

private:
    double theta_;
    std::vector<std::pair<int, double>> weights_;
};

double i_sinr_pdf(double z, double theta, int U, int Kp, const AccessLaw& law);

struct MrcOptions {
    /// Grid intervals on [0, 2^R-1].
    int intervals = 4096;
};

/// Conditions on K', convolves a gamma(K', theta) part with K-K' interfered
/// slots and evaluates the cdf at 2^R-1.
double outage_full_mrc(double R, double theta, int U, const AccessLaw& law, const MrcOptions& options = {});

// ---- gamma approximation ---------------------------------------------------

/// Least-squares gamma fit of `density` over [0, upper] (64-point
/// Gauss-Legendre objective, Nelder-Mead in log-parameters).
GammaParams fit_gamma_to_density(const std::function<double(double)>& density, double upper, GammaParams start);
/// Objective value of the fit above.
double gamma_fit_objective(const std::function<double(double)>& density, double upper, GammaParams params);
/// Shape/scale from the first two moments of `density` restricted to [0, upper].
GammaParams moment_matched_start(const std::function<double(double)>& density, double upper);

/// Fit for the interfered-slot law; memoized per (law, U, K', theta, R).
GammaParams gamma_fit(double theta, int U, int Kp, const AccessLaw& law, double R);

/// Density and cdf of gamma(a1, theta) + gamma(a2, alpha) (1F1 form).
double gamma_sum_pdf(double z, double a1, double theta, double a2, double alpha);
double gamma_sum_cdf(double z, double a1, double theta, double a2, double alpha);

double outage_full_mrc_gamma(double R, double theta, int U, const AccessLaw& law);

// ---- pilot contamination ---------------------------------------------------

struct PilotEvents {
    double p_I = 0.0;
    double p_II = 0.0;
};

/// p_I: some interferer shares the user's pilot. p_II: the user's pilot is
/// intact but two interferers share one. `as_printed` evaluates the second
/// term with the product index starting at 0, which goes negative.
PilotEvents pilot_event_probs(int U, int Q, const AccessLaw& law, bool as_printed = false);

/// High-SNR lower bound with beta-prime(n, 2) sums.
double pilot_bound(double R, int U, int Q, const AccessLaw& law);

// ---- activation ------------------------------------------------------------

enum class Marginalization {
    /// Weight u by f_bin(u-1; b, N-1): U as seen by an active user.
    Peer,
    /// Weight u by f_bin(u; b, N), u = 0 contributing nothing.
    Population,
};

/// Sums point_fn(u) over u = 1..N with activation weights. Terms outside the
/// central window holding all but eps_cut of the mass are skipped.
double marginalize_over_U(const std::function<double(int)>& point_fn, const ActivationLaw& activation,
                          Marginalization convention = Marginalization::Peer, double eps_cut = 1e-12);

// ---- model dispatch --------------------------------------------------------

enum class OutageModel { Collision, CollisionSic, FullMrc, FullMrcGamma };

std::string to_string(OutageModel model);

struct AnalyticSetup {
    AccessLaw law;
    /// Needed by CollisionSic.
    const StoppingSetCatalog* catalog = nullptr;
    MrcOptions mrc;
};

double point_outage(OutageModel model, double R, double theta, int U, const AnalyticSetup& setup);

}  // namespace gfaccess
