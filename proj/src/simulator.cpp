#include "gfaccess/simulator.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <tuple>

#include "gfaccess/combinatorics.hpp"

namespace gfaccess {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

bool uses_sic(ReceiverModel m) { return m == ReceiverModel::CollisionSic || m == ReceiverModel::FullMrcSic; }

// Decoding state shared by all receivers: who sits in which slot, which
// replicas carry a contaminated pilot and who has been cancelled.
class Receiver {
public:
    Receiver(const Frame& frame, double theta) : frame_(frame), theta_(theta) {
        const std::size_t U = frame.users.size();
        members_.assign(static_cast<std::size_t>(frame.M), {});
        contaminated_.resize(U);
        cancelled_.assign(U, 0);
        for (std::size_t u = 0; u < U; ++u) {
            const auto& user = frame.users[u];
            contaminated_[u].assign(user.slots.size(), 0);
            for (std::size_t p = 0; p < user.slots.size(); ++p)
                members_[static_cast<std::size_t>(user.slots[p])].push_back({static_cast<int>(u), static_cast<int>(p)});
        }
        for (const auto& slot : members_) {
            for (std::size_t a = 0; a < slot.size(); ++a) {
                for (std::size_t b = a + 1; b < slot.size(); ++b) {
                    const auto& ua = frame.users[static_cast<std::size_t>(slot[a].first)];
                    const auto& ub = frame.users[static_cast<std::size_t>(slot[b].first)];
                    if (ua.pilot.empty() || ub.pilot.empty()) continue;
                    if (ua.pilot[static_cast<std::size_t>(slot[a].second)] ==
                        ub.pilot[static_cast<std::size_t>(slot[b].second)]) {
                        contaminated_[static_cast<std::size_t>(slot[a].first)][static_cast<std::size_t>(slot[a].second)] = 1;
                        contaminated_[static_cast<std::size_t>(slot[b].first)][static_cast<std::size_t>(slot[b].second)] = 1;
                    }
                }
            }
        }
    }

    // A cancelled user still occupies the slots where its channel estimate
    // was contaminated.
    bool present(int u, int pos) const {
        return !cancelled_[static_cast<std::size_t>(u)] ||
               contaminated_[static_cast<std::size_t>(u)][static_cast<std::size_t>(pos)];
    }

    bool usable(int u, int pos) const {
        return !contaminated_[static_cast<std::size_t>(u)][static_cast<std::size_t>(pos)];
    }

    void cancel(int u) { cancelled_[static_cast<std::size_t>(u)] = 1; }

    double collision_snr(int u) const {
        const auto& user = frame_.users[static_cast<std::size_t>(u)];
        double snr = 0.0;
        for (std::size_t p = 0; p < user.slots.size(); ++p) {
            if (!usable(u, static_cast<int>(p))) continue;
            bool alone = true;
            for (const auto& [k, kp] : members_[static_cast<std::size_t>(user.slots[p])])
                if (k != u && present(k, kp)) alone = false;
            if (alone) snr += theta_ * user.power[p];
        }
        return snr;
    }

    double interference(int u, Slot s) const {
        double i = 0.0;
        for (const auto& [k, kp] : members_[static_cast<std::size_t>(s)])
            if (k != u && present(k, kp)) i += frame_.users[static_cast<std::size_t>(k)].power[static_cast<std::size_t>(kp)];
        return i;
    }

    double mrc_sinr(int u) const {
        const auto& user = frame_.users[static_cast<std::size_t>(u)];
        double sinr = 0.0;
        for (std::size_t p = 0; p < user.slots.size(); ++p) {
            if (!usable(u, static_cast<int>(p))) continue;
            sinr += theta_ * user.power[p] / (1.0 + theta_ * interference(u, user.slots[p]));
        }
        return sinr;
    }

    double exact_sinr(int u) const {
        const auto& user = frame_.users[static_cast<std::size_t>(u)];
        const std::size_t U = frame_.users.size();
        std::vector<std::complex<double>> cross(U, 0.0);
        double signal = 0.0;
        double noise = 0.0;
        for (std::size_t p = 0; p < user.slots.size(); ++p) {
            if (!usable(u, static_cast<int>(p))) continue;
            const Slot s = user.slots[p];
            const std::complex<double> w = std::conj(user.gain[p]) / (1.0 + theta_ * interference(u, s));
            signal += (w * user.gain[p]).real();
            noise += std::norm(w);
            for (const auto& [k, kp] : members_[static_cast<std::size_t>(s)])
                if (k != u && present(k, kp))
                    cross[static_cast<std::size_t>(k)] += w * frame_.users[static_cast<std::size_t>(k)].gain[static_cast<std::size_t>(kp)];
        }
        double interf = 0.0;
        for (const auto& c : cross) interf += std::norm(c);
        const double denom = theta_ * interf + noise;
        return denom > 0 ? theta_ * signal * signal / denom : 0.0;
    }

private:
    const Frame& frame_;
    double theta_;
    std::vector<std::vector<std::pair<int, int>>> members_;
    std::vector<std::vector<char>> contaminated_;
    std::vector<char> cancelled_;
};

template <class SinrFn>
std::vector<char> run_decoder(Receiver& rx, std::size_t U, double threshold, bool sic, SinrFn sinr) {
    std::vector<char> ok(U, 0);
    if (!sic) {
        for (std::size_t u = 0; u < U; ++u) ok[u] = sinr(rx, static_cast<int>(u)) >= threshold;
        return ok;
    }
    // Each pass decodes at least one user or stops, so at most U passes.
    for (std::size_t pass = 0; pass < U; ++pass) {
        bool progress = false;
        for (std::size_t u = 0; u < U; ++u) {
            if (ok[u]) continue;
            if (sinr(rx, static_cast<int>(u)) >= threshold) {
                ok[u] = 1;
                rx.cancel(static_cast<int>(u));
                progress = true;
            }
        }
        if (!progress) break;
    }
    return ok;
}

}  // namespace

std::string to_string(ReceiverModel model) {
    switch (model) {
        case ReceiverModel::Collision: return "collision";
        case ReceiverModel::CollisionSic: return "collision-sic";
        case ReceiverModel::FullMrc: return "mrc";
        case ReceiverModel::FullMrcSic: return "mrc-sic";
    }
    return "unknown";
}

FrameRng::FrameRng(std::uint64_t master_seed, std::uint64_t frame) {
    std::uint64_t x = master_seed;
    std::uint64_t mixed = splitmix64(x) ^ (frame * 0xD1B54A32D192ED03ULL);
    for (auto& w : s_) w = splitmix64(mixed);
}

FrameRng::result_type FrameRng::operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

Frame draw_frame(const PatternCodebook& codebook, const FrameConfig& config, const ReceiverSpec& spec,
                 const PilotSchedule* schedule, FrameRng& rng) {
    Frame frame;
    frame.M = codebook.M();
    // Bernoulli(b) activation of N users is a Binomial(N, b) head count.
    std::binomial_distribution<int> active(config.N, config.b);
    const int U = active(rng);
    frame.users.resize(static_cast<std::size_t>(U));

    if (codebook.is_steiner()) {
        const int C = static_cast<int>(codebook.patterns().size());
        const Pattern picks = sample_random_pattern(C, U, rng);
        for (int u = 0; u < U; ++u) {
            auto& user = frame.users[static_cast<std::size_t>(u)];
            user.pattern_index = picks.slots[static_cast<std::size_t>(u)];
            user.slots = codebook.patterns()[static_cast<std::size_t>(user.pattern_index)].slots;
        }
    } else {
        for (auto& user : frame.users) user.slots = sample_random_pattern(codebook.M(), codebook.K(), rng).slots;
    }

    const bool complex_gains = spec.impairments.correlated_mrc;
    std::exponential_distribution<double> expo(1.0);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    for (auto& user : frame.users) {
        const std::size_t K = user.slots.size();
        user.power.resize(K);
        if (complex_gains) {
            user.gain.resize(K);
            for (std::size_t p = 0; p < K; ++p) {
                const double re = normal(rng);
                const double im = normal(rng);
                user.gain[p] = {re, im};
                user.power[p] = re * re + im * im;
            }
        } else {
            for (std::size_t p = 0; p < K; ++p) user.power[p] = expo(rng);
        }
    }

    const int Q = spec.impairments.pilots;
    if (Q > 0) {
        std::uniform_int_distribution<int> pick(0, Q - 1);
        for (auto& user : frame.users) {
            if (schedule) {
                user.pilot = schedule->pilots[static_cast<std::size_t>(user.pattern_index)];
            } else if (spec.impairments.per_slot_pilots) {
                user.pilot.resize(user.slots.size());
                for (auto& q : user.pilot) q = pick(rng);
            } else {
                user.pilot.assign(user.slots.size(), pick(rng));
            }
        }
    }
    return frame;
}

Frame make_frame(int M, std::vector<std::vector<Slot>> patterns, std::vector<std::vector<double>> powers) {
    Frame frame;
    frame.M = M;
    for (std::size_t u = 0; u < patterns.size(); ++u) {
        ActiveUser user;
        user.slots = std::move(patterns[u]);
        user.power = u < powers.size() ? std::move(powers[u]) : std::vector<double>(user.slots.size(), 1.0);
        frame.users.push_back(std::move(user));
    }
    return frame;
}

std::vector<char> decode_collision(const Frame& frame, double theta, double R) {
    Receiver rx(frame, theta);
    return run_decoder(rx, frame.users.size(), std::exp2(R) - 1.0, false,
                       [](const Receiver& r, int u) { return r.collision_snr(u); });
}

std::vector<char> decode_collision_sic(const Frame& frame, double theta, double R) {
    Receiver rx(frame, theta);
    return run_decoder(rx, frame.users.size(), std::exp2(R) - 1.0, true,
                       [](const Receiver& r, int u) { return r.collision_snr(u); });
}

std::vector<char> decode_full_mrc(const Frame& frame, double theta, double R, bool sic) {
    Receiver rx(frame, theta);
    return run_decoder(rx, frame.users.size(), std::exp2(R) - 1.0, sic,
                       [](const Receiver& r, int u) { return r.mrc_sinr(u); });
}

std::vector<char> decode(const Frame& frame, const ReceiverSpec& spec, double theta, double R) {
    const bool sic = uses_sic(spec.model);
    if (spec.model == ReceiverModel::Collision || spec.model == ReceiverModel::CollisionSic) {
        return sic ? decode_collision_sic(frame, theta, R) : decode_collision(frame, theta, R);
    }
    if (!spec.impairments.correlated_mrc) return decode_full_mrc(frame, theta, R, sic);
    Receiver rx(frame, theta);
    return run_decoder(rx, frame.users.size(), std::exp2(R) - 1.0, sic,
                       [](const Receiver& r, int u) { return r.exact_sinr(u); });
}

double idealized_mrc_sinr(const Frame& frame, int user, double theta) { return Receiver(frame, theta).mrc_sinr(user); }

double exact_mrc_sinr(const Frame& frame, int user, double theta) { return Receiver(frame, theta).exact_sinr(user); }

std::pair<double, double> wilson_interval(long long k, long long n, double z) {
    if (n <= 0) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2 * nn)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
    return {k == 0 ? 0.0 : std::max(0.0, center - half), k == n ? 1.0 : std::min(1.0, center + half)};
}

OutageEstimate simulate(const PatternCodebook& codebook, const FrameConfig& config, const ReceiverSpec& spec,
                        long long frames, std::uint64_t master_seed, int threads) {
    if (frames < 1) throw std::invalid_argument("simulate: frames must be at least 1");
    if (codebook.is_steiner() && config.N > codebook.C()) {
        throw UTooLarge("population N=" + std::to_string(config.N) + " exceeds the codebook size C=" +
                        std::to_string(codebook.C()));
    }
    std::optional<PilotSchedule> schedule;
    if (spec.impairments.pilots > 0 && codebook.is_steiner()) schedule = assign_pilots(codebook, spec.impairments.pilots);

    const auto start = std::chrono::steady_clock::now();
    constexpr long long kChunk = 1024;
    const long long chunks = (frames + kChunk - 1) / kChunk;
    std::atomic<long long> next{0};
    std::mutex merge;
    long long events = 0;
    long long activations = 0;

    auto work = [&] {
        long long local_events = 0;
        long long local_activations = 0;
        for (long long c = next++; c < chunks; c = next++) {
            const long long end = std::min(frames, (c + 1) * kChunk);
            for (long long f = c * kChunk; f < end; ++f) {
                FrameRng rng(master_seed, static_cast<std::uint64_t>(f));
                const Frame frame = draw_frame(codebook, config, spec, schedule ? &*schedule : nullptr, rng);
                if (frame.users.empty()) continue;
                const auto ok = decode(frame, spec, config.theta, config.R);
                local_activations += static_cast<long long>(ok.size());
                for (char s : ok) local_events += !s;
            }
        }
        std::lock_guard<std::mutex> lock(merge);
        events += local_events;
        activations += local_activations;
    };

    int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = static_cast<int>(std::min<long long>(workers, chunks));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    OutageEstimate est;
    est.outage_events = events;
    est.activations = activations;
    est.seed = master_seed;
    est.frames = frames;
    if (activations > 0) {
        est.estimate = static_cast<double>(events) / static_cast<double>(activations);
        std::tie(est.ci_low, est.ci_high) = wilson_interval(events, activations);
    }
    est.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return est;
}

}  // namespace gfaccess
