#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gfaccess/codebook.hpp"

namespace gfaccess {

enum class ReceiverModel { Collision, CollisionSic, FullMrc, FullMrcSic };

std::string to_string(ReceiverModel model);

struct FrameConfig {
    int N = 0;
    double b = 0.0;
    double R = 1.0;
    /// Mean received SNR, linear.
    double theta = 1.0;
};

struct Impairments {
    /// Pilot pool size; 0 means perfect channel knowledge.
    int pilots = 0;
    /// Random law only: draw a fresh pilot per slot instead of per activation.
    /// Experimental.
    bool per_slot_pilots = false;
    /// Exact MRC combiner with complex gains instead of the sum of SINRs.
    bool correlated_mrc = false;
};

struct ReceiverSpec {
    ReceiverModel model = ReceiverModel::Collision;
    Impairments impairments;
};

struct OutageEstimate {
    double estimate = std::numeric_limits<double>::quiet_NaN();
    long long outage_events = 0;
    long long activations = 0;
    double ci_low = std::numeric_limits<double>::quiet_NaN();
    double ci_high = std::numeric_limits<double>::quiet_NaN();
    std::string ci_method = "wilson-95";
    std::uint64_t seed = 0;
    long long frames = 0;
    double wall_time = 0.0;
};

/// xoshiro256** seeded through splitmix64.
class FrameRng {
public:
    using result_type = std::uint64_t;
    FrameRng(std::uint64_t master_seed, std::uint64_t frame);
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

private:
    std::uint64_t s_[4];
};

struct ActiveUser {
    /// Codebook index (Steiner) or -1 (Random).
    int pattern_index = -1;
    std::vector<Slot> slots;
    /// |g|^2 per position in `slots`.
    std::vector<double> power;
    /// Complex gains, drawn only for the correlated combiner.
    std::vector<std::complex<double>> gain;
    /// Pilot per position; empty without pilot impairment.
    std::vector<int> pilot;
};

struct Frame {
    int M = 0;
    std::vector<ActiveUser> users;
};

/// Draws the active set, patterns, gains and pilots of one frame.
Frame draw_frame(const PatternCodebook& codebook, const FrameConfig& config, const ReceiverSpec& spec,
                 const PilotSchedule* schedule, FrameRng& rng);

/// Builds a frame from explicit patterns with unit-mean power draws; used by
/// tests and examples.
Frame make_frame(int M, std::vector<std::vector<Slot>> patterns, std::vector<std::vector<double>> powers);

/// Per-user success flags (SINR >= 2^R - 1).
std::vector<char> decode(const Frame& frame, const ReceiverSpec& spec, double theta, double R);
std::vector<char> decode_collision(const Frame& frame, double theta, double R);
std::vector<char> decode_collision_sic(const Frame& frame, double theta, double R);
std::vector<char> decode_full_mrc(const Frame& frame, double theta, double R, bool sic);

/// SINR of `user` with nobody cancelled: the sum of per-slot SINRs and the
/// exact complex combiner. Requires complex gains for the latter.
double idealized_mrc_sinr(const Frame& frame, int user, double theta);
double exact_mrc_sinr(const Frame& frame, int user, double theta);

/// Wilson score interval for k successes in n trials.
std::pair<double, double> wilson_interval(long long k, long long n, double z = 1.959963984540054);

/// Monte Carlo outage per activation. Frame i uses its own generator seeded
/// from (master_seed, i), so counts do not depend on the thread count.
OutageEstimate simulate(const PatternCodebook& codebook, const FrameConfig& config, const ReceiverSpec& spec,
                        long long frames, std::uint64_t master_seed, int threads = 0);

}  // namespace gfaccess
