#include "gfaccess/codebook.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace gfaccess {

namespace {

// Exact binomial; throws if the result does not fit in 63 bits.
long long exact_binomial(long long n, long long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (long long i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
        if (r > static_cast<unsigned __int128>(INT64_MAX)) throw std::overflow_error("binomial overflow");
    }
    return static_cast<long long>(r);
}

std::string steiner_name(int t, int K, int M) {
    return "S(" + std::to_string(t) + "," + std::to_string(K) + "," + std::to_string(M) + ")";
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

bool Pattern::contains(Slot s) const {
    return std::binary_search(slots.begin(), slots.end(), s);
}

DesignParams derive_params(int t, int K, int M) {
    if (t < 2) throw std::invalid_argument("derive_params: strength t must be at least 2");
    if (K < t || M < K) throw std::invalid_argument("derive_params: need t <= K <= M");
    const long long cn = exact_binomial(M, t);
    const long long cd = exact_binomial(K, t);
    const long long dn = exact_binomial(M - 1, t - 1);
    const long long dd = exact_binomial(K - 1, t - 1);
    if (cn % cd != 0 || dn % dd != 0) {
        throw NonIntegralDesign(steiner_name(t, K, M) + ": binomial ratios are not integral");
    }
    DesignParams p;
    p.C = cn / cd;
    p.D = dn / dd;
    p.n_lower_bound = (K + (t - 1) - 1) / (t - 1) + 1;
    return p;
}

void verify_steiner(int t, int K, int M, const std::vector<Pattern>& patterns) {
    using Kind = InvariantViolation::Kind;
    const DesignParams params = derive_params(t, K, M);

    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const auto& s = patterns[i].slots;
        const long long idx = static_cast<long long>(i);
        if (static_cast<int>(s.size()) != K) {
            throw InvariantViolation(Kind::PatternSize, {idx},
                                     "pattern " + std::to_string(i) + " has " + std::to_string(s.size()) +
                                         " slots, expected " + std::to_string(K));
        }
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (s[j] < 0 || s[j] >= M) {
                throw InvariantViolation(Kind::SlotRange, {idx, s[j]},
                                         "pattern " + std::to_string(i) + " uses slot " + std::to_string(s[j]) +
                                             " outside [0," + std::to_string(M) + ")");
            }
            if (j > 0 && s[j] <= s[j - 1]) {
                throw InvariantViolation(Kind::SlotOrder, {idx},
                                         "pattern " + std::to_string(i) + " is not strictly ascending");
            }
        }
    }

    if (static_cast<long long>(patterns.size()) != params.C) {
        throw InvariantViolation(Kind::PatternCount, {static_cast<long long>(patterns.size())},
                                 steiner_name(t, K, M) + " needs C=" + std::to_string(params.C) +
                                     " patterns, found " + std::to_string(patterns.size()));
    }

    for (std::size_t i = 0; i < patterns.size(); ++i) {
        for (std::size_t j = i + 1; j < patterns.size(); ++j) {
            const auto& a = patterns[i].slots;
            const auto& b = patterns[j].slots;
            int common = 0;
            for (std::size_t x = 0, y = 0; x < a.size() && y < b.size();) {
                if (a[x] == b[y]) {
                    ++common;
                    ++x;
                    ++y;
                } else if (a[x] < b[y]) {
                    ++x;
                } else {
                    ++y;
                }
            }
            if (common > t - 1) {
                throw InvariantViolation(Kind::PairIntersection,
                                         {static_cast<long long>(i), static_cast<long long>(j)},
                                         "patterns " + std::to_string(i) + " and " + std::to_string(j) + " share " +
                                             std::to_string(common) + " slots (at most " + std::to_string(t - 1) +
                                             " allowed)");
            }
        }
    }

    std::vector<long long> cover(static_cast<std::size_t>(M), 0);
    for (const auto& p : patterns)
        for (Slot s : p.slots) ++cover[static_cast<std::size_t>(s)];
    for (int s = 0; s < M; ++s) {
        if (cover[static_cast<std::size_t>(s)] != params.D) {
            throw InvariantViolation(Kind::SlotCoverage, {s},
                                     "slot " + std::to_string(s) + " is covered " +
                                         std::to_string(cover[static_cast<std::size_t>(s)]) + " times, expected D=" +
                                         std::to_string(params.D));
        }
    }
}

PatternCodebook PatternCodebook::random(int M, int K) {
    if (K < 1 || K > M) throw std::invalid_argument("random codebook: need 1 <= K <= M");
    PatternCodebook cb;
    cb.mode_ = AccessMode::Random;
    cb.K_ = K;
    cb.M_ = M;
    cb.C_ = exact_binomial(M, K);
    cb.name_ = "Random(" + std::to_string(M) + "," + std::to_string(K) + ")";
    return cb;
}

PatternCodebook PatternCodebook::steiner(int t, int K, int M, std::vector<Pattern> patterns, std::string name,
                                         std::vector<std::string> notes) {
    verify_steiner(t, K, M, patterns);
    const DesignParams params = derive_params(t, K, M);
    PatternCodebook cb;
    cb.mode_ = AccessMode::Steiner;
    cb.t_ = t;
    cb.K_ = K;
    cb.M_ = M;
    cb.C_ = params.C;
    cb.D_ = static_cast<int>(params.D);
    cb.patterns_ = std::move(patterns);
    cb.slot_cover_.assign(static_cast<std::size_t>(M), {});
    for (std::size_t i = 0; i < cb.patterns_.size(); ++i)
        for (Slot s : cb.patterns_[i].slots) cb.slot_cover_[static_cast<std::size_t>(s)].push_back(static_cast<int>(i));
    cb.name_ = name.empty() ? steiner_name(t, K, M) : std::move(name);
    cb.notes_ = std::move(notes);
    return cb;
}

PatternCodebook load_codebook(std::istream& in, std::string name) {
    std::string line;
    int lineno = 0;
    bool have_header = false;
    bool is_random = false;
    int t = 0, K = 0, M = 0;
    std::vector<Pattern> patterns;
    std::vector<std::string> notes;

    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(line);
        if (body.empty()) continue;
        if (body[0] == '#') {
            if (have_header) notes.push_back(trim(body.substr(1)));
            continue;
        }
        std::istringstream ss(body);
        if (!have_header) {
            std::string kind;
            ss >> kind;
            if (kind == "steiner") {
                if (!(ss >> t >> K >> M)) throw ParseError(lineno, "expected 'steiner t K M'");
            } else if (kind == "random") {
                if (!(ss >> K >> M)) throw ParseError(lineno, "expected 'random K M'");
                is_random = true;
            } else {
                throw ParseError(lineno, "unknown header '" + kind + "'");
            }
            std::string extra;
            if (ss >> extra) throw ParseError(lineno, "trailing tokens after header");
            have_header = true;
            continue;
        }
        if (is_random) throw ParseError(lineno, "random descriptor takes no pattern lines");
        Pattern p;
        std::string tok;
        while (ss >> tok) {
            try {
                std::size_t used = 0;
                const int v = std::stoi(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                p.slots.push_back(v);
            } catch (const std::exception&) {
                throw ParseError(lineno, "bad slot index '" + tok + "'");
            }
        }
        patterns.push_back(std::move(p));
    }
    if (!have_header) throw ParseError(lineno, "missing header line");
    if (is_random) return PatternCodebook::random(M, K);
    return PatternCodebook::steiner(t, K, M, std::move(patterns), std::move(name), std::move(notes));
}

PatternCodebook load_codebook_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open codebook file " + path.string());
    return load_codebook(in);
}

void write_codebook(std::ostream& out, const PatternCodebook& codebook) {
    if (!codebook.is_steiner()) {
        out << "random " << codebook.K() << ' ' << codebook.M() << '\n';
        return;
    }
    out << "steiner " << codebook.t() << ' ' << codebook.K() << ' ' << codebook.M() << '\n';
    for (const auto& n : codebook.notes()) out << "# " << n << '\n';
    for (const auto& p : codebook.patterns()) {
        for (std::size_t i = 0; i < p.slots.size(); ++i) out << (i ? " " : "") << p.slots[i];
        out << '\n';
    }
}

PatternCodebook construct_triple_system(int M) {
    if (M < 3 || M % 6 != 3) {
        throw UnsupportedM("Bose construction needs M = 3 (mod 6), got M=" + std::to_string(M));
    }
    // Points (x, layer) -> x + n*layer over the idempotent commutative
    // quasigroup x o y = (x + y)/2 mod n.
    const int n = M / 3;
    const int half = (n + 1) / 2;
    auto point = [n](int x, int layer) { return x + n * layer; };
    auto op = [n, half](int x, int y) { return ((x + y) % n) * half % n; };

    std::vector<Pattern> patterns;
    for (int x = 0; x < n; ++x) patterns.push_back({{point(x, 0), point(x, 1), point(x, 2)}});
    for (int x = 0; x < n; ++x) {
        for (int y = x + 1; y < n; ++y) {
            for (int layer = 0; layer < 3; ++layer) {
                patterns.push_back({{point(x, layer), point(y, layer), point(op(x, y), (layer + 1) % 3)}});
            }
        }
    }
    for (auto& p : patterns) std::sort(p.slots.begin(), p.slots.end());
    std::sort(patterns.begin(), patterns.end(), [](const Pattern& a, const Pattern& b) { return a.slots < b.slots; });
    return PatternCodebook::steiner(2, 3, M, std::move(patterns), "S(2,3," + std::to_string(M) + ")",
                                    {"Bose construction"});
}

PilotSchedule assign_pilots(const PatternCodebook& codebook, int Q) {
    if (!codebook.is_steiner()) throw std::invalid_argument("assign_pilots: needs a Steiner codebook");
    if (Q < codebook.D()) {
        throw InsufficientPilots("assign_pilots: Q=" + std::to_string(Q) + " < D=" + std::to_string(codebook.D()));
    }
    PilotSchedule schedule;
    schedule.Q = Q;
    schedule.pilots.resize(codebook.patterns().size());
    for (std::size_t p = 0; p < codebook.patterns().size(); ++p)
        schedule.pilots[p].assign(codebook.patterns()[p].slots.size(), -1);

    for (int s = 0; s < codebook.M(); ++s) {
        const auto& covering = codebook.slot_cover()[static_cast<std::size_t>(s)];
        for (std::size_t rank = 0; rank < covering.size(); ++rank) {
            const int p = covering[rank];
            const auto& slots = codebook.patterns()[static_cast<std::size_t>(p)].slots;
            const auto pos = std::lower_bound(slots.begin(), slots.end(), s) - slots.begin();
            schedule.pilots[static_cast<std::size_t>(p)][static_cast<std::size_t>(pos)] = static_cast<int>(rank);
        }
    }
    return schedule;
}

}  // namespace gfaccess
