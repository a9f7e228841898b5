#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfaccess/errors.hpp"

namespace gfaccess {

using Slot = int;

/// The K slots a user transmits in, sorted ascending.
struct Pattern {
    std::vector<Slot> slots;

    bool contains(Slot s) const;
    friend bool operator==(const Pattern&, const Pattern&) = default;
};

enum class AccessMode { Steiner, Random };

/// Sizes implied by S(t,K,M): pattern count C, patterns per slot D and the
/// smallest order a stopping set can have.
struct DesignParams {
    long long C = 0;
    long long D = 0;
    int n_lower_bound = 0;
};

/// Throws NonIntegralDesign when the divisibility conditions fail and
/// std::invalid_argument when t < 2 or the parameters are out of range.
DesignParams derive_params(int t, int K, int M);

/// Access-pattern set. Steiner codebooks are verified on construction and
/// immutable afterwards; Random codebooks only carry (M, K).
class PatternCodebook {
public:
    static PatternCodebook random(int M, int K);

    /// Verifies every invariant; throws InvariantViolation with a witness.
    static PatternCodebook steiner(int t, int K, int M, std::vector<Pattern> patterns,
                                   std::string name = {}, std::vector<std::string> notes = {});

    AccessMode mode() const { return mode_; }
    bool is_steiner() const { return mode_ == AccessMode::Steiner; }
    int t() const { return t_; }
    int K() const { return K_; }
    int M() const { return M_; }
    /// Number of patterns (Steiner) or binom(M, K) (Random).
    long long C() const { return C_; }
    /// Patterns per slot; 0 in Random mode.
    int D() const { return D_; }

    const std::vector<Pattern>& patterns() const { return patterns_; }
    /// Indices of the patterns covering each slot, ascending.
    const std::vector<std::vector<int>>& slot_cover() const { return slot_cover_; }

    const std::string& name() const { return name_; }
    const std::vector<std::string>& notes() const { return notes_; }

private:
    PatternCodebook() = default;

    AccessMode mode_ = AccessMode::Random;
    int t_ = 0;
    int K_ = 0;
    int M_ = 0;
    long long C_ = 0;
    int D_ = 0;
    std::vector<Pattern> patterns_;
    std::vector<std::vector<int>> slot_cover_;
    std::string name_;
    std::vector<std::string> notes_;
};

/// Runs all Steiner invariants against raw patterns. Used by the loader and
/// by PatternCodebook::steiner.
void verify_steiner(int t, int K, int M, const std::vector<Pattern>& patterns);

/// Parses the text codebook format:
///   steiner t K M        followed by C lines of K ascending 0-based slots
///   random K M           descriptor only, no pattern lines
/// Lines starting with '#' are comments; comments after the header are kept
/// as provenance notes.
PatternCodebook load_codebook(std::istream& in, std::string name = {});
PatternCodebook load_codebook_file(const std::filesystem::path& path);

void write_codebook(std::ostream& out, const PatternCodebook& codebook);

/// Bose construction of S(2,3,M) for M = 3 (mod 6).
PatternCodebook construct_triple_system(int M);

/// Uniform K-subset of [0, M) via Floyd's algorithm, returned sorted.
template <class URBG>
Pattern sample_random_pattern(int M, int K, URBG& rng) {
    if (K < 0 || K > M) throw std::invalid_argument("sample_random_pattern: need 0 <= K <= M");
    Pattern p;
    p.slots.reserve(static_cast<std::size_t>(K));
    for (int j = M - K; j < M; ++j) {
        std::uniform_int_distribution<int> pick(0, j);
        const int x = pick(rng);
        bool present = false;
        for (int s : p.slots) present = present || s == x;
        p.slots.push_back(present ? j : x);
    }
    std::sort(p.slots.begin(), p.slots.end());
    return p;
}

/// pilots[p][i] is the pilot used by pattern p in slot patterns[p].slots[i].
struct PilotSchedule {
    int Q = 0;
    std::vector<std::vector<int>> pilots;

    int pilot(int pattern, int position) const { return pilots[pattern][position]; }
};

/// Within every slot the covering patterns are ranked by index and get
/// pilot = rank. Requires a Steiner codebook and Q >= D.
PilotSchedule assign_pilots(const PatternCodebook& codebook, int Q);

}  // namespace gfaccess
