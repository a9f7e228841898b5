#include "gfaccess/stopping_sets.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <mutex>
#include <thread>

#include "json.hpp"

namespace gfaccess {

namespace {

int worker_count(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct BudgetState {
    long long limit = 0;
    std::atomic<long long> used{0};
    std::atomic<bool> exceeded{false};
};

// One worker's search state. `first` is the smallest pattern index in the
// current subset; every other member has a larger index, so each subset is
// reached from exactly one first index.
class Searcher {
public:
    Searcher(const PatternCodebook& cb, int n, bool collect, BudgetState& budget)
        : cb_(cb), n_(n), collect_(collect), budget_(budget),
          occ_(static_cast<std::size_t>(cb.M()), 0),
          chosen_(cb.patterns().size(), 0),
          excluded_(cb.patterns().size(), 0) {}

    void run_first(int first) {
        first_ = first;
        push(first);
        dfs(1);
        pop(first);
    }

    long long count = 0;
    std::vector<std::vector<int>> sets;

private:
    void push(int p) {
        chosen_[static_cast<std::size_t>(p)] = 1;
        stack_.push_back(p);
        for (Slot s : cb_.patterns()[static_cast<std::size_t>(p)].slots) {
            int& o = occ_[static_cast<std::size_t>(s)];
            if (o == 1) --singles_;
            ++o;
            if (o == 1) ++singles_;
        }
    }

    void pop(int p) {
        for (Slot s : cb_.patterns()[static_cast<std::size_t>(p)].slots) {
            int& o = occ_[static_cast<std::size_t>(s)];
            if (o == 1) --singles_;
            --o;
            if (o == 1) ++singles_;
        }
        stack_.pop_back();
        chosen_[static_cast<std::size_t>(p)] = 0;
    }

    bool available(int q) const {
        return q > first_ && !chosen_[static_cast<std::size_t>(q)] && !excluded_[static_cast<std::size_t>(q)];
    }

    void tick() {
        if (budget_.limit <= 0) return;
        if (++local_ticks_ == 4096) {
            if (budget_.used.fetch_add(local_ticks_) + local_ticks_ > budget_.limit) budget_.exceeded = true;
            local_ticks_ = 0;
        }
    }

    void try_with(int q, int depth, std::vector<int>& tried) {
        push(q);
        dfs(depth + 1);
        pop(q);
        excluded_[static_cast<std::size_t>(q)] = 1;
        tried.push_back(q);
    }

    void dfs(int depth) {
        if (budget_.exceeded) return;
        tick();
        if (depth == n_) {
            if (singles_ == 0) {
                ++count;
                if (collect_) {
                    auto s = stack_;
                    std::sort(s.begin(), s.end());
                    sets.push_back(std::move(s));
                }
            }
            return;
        }
        const int remaining = n_ - depth;
        if (singles_ > remaining * cb_.K()) return;

        // Branch on the singly-occupied slot with the fewest candidates:
        // one of them must join, otherwise the slot stays a singleton.
        int best = -1;
        int best_count = INT_MAX;
        for (int s = 0; s < cb_.M() && best_count > 0; ++s) {
            if (occ_[static_cast<std::size_t>(s)] != 1) continue;
            int c = 0;
            for (int q : cb_.slot_cover()[static_cast<std::size_t>(s)]) c += available(q);
            if (c < best_count) {
                best_count = c;
                best = s;
            }
        }

        std::vector<int> tried;
        if (best < 0) {
            const int C = static_cast<int>(cb_.patterns().size());
            for (int q = first_ + 1; q < C; ++q)
                if (available(q)) try_with(q, depth, tried);
        } else if (best_count > 0) {
            std::vector<int> cands;
            for (int q : cb_.slot_cover()[static_cast<std::size_t>(best)])
                if (available(q)) cands.push_back(q);
            for (int q : cands) try_with(q, depth, tried);
        }
        for (int q : tried) excluded_[static_cast<std::size_t>(q)] = 0;
    }

    const PatternCodebook& cb_;
    int n_;
    bool collect_;
    BudgetState& budget_;
    std::vector<int> occ_;
    std::vector<char> chosen_;
    std::vector<char> excluded_;
    std::vector<int> stack_;
    int singles_ = 0;
    int first_ = 0;
    long long local_ticks_ = 0;
};

}  // namespace

bool is_stopping_set(const PatternCodebook& codebook, const std::vector<int>& pattern_indices) {
    std::vector<int> occ(static_cast<std::size_t>(codebook.M()), 0);
    for (int p : pattern_indices)
        for (Slot s : codebook.patterns().at(static_cast<std::size_t>(p)).slots) ++occ[static_cast<std::size_t>(s)];
    return std::none_of(occ.begin(), occ.end(), [](int o) { return o == 1; });
}

StoppingSetEntry enumerate_stopping_sets(const PatternCodebook& codebook, int n, const EnumerationOptions& options) {
    if (!codebook.is_steiner()) throw std::invalid_argument("stopping sets need a Steiner codebook");
    if (n < 1 || n > options.max_order) {
        throw std::invalid_argument("order " + std::to_string(n) + " outside [1," + std::to_string(options.max_order) +
                                    "]");
    }
    StoppingSetEntry entry;
    entry.n = n;
    const int C = static_cast<int>(codebook.patterns().size());
    if (n > C) {
        entry.exhaustive = true;
        return entry;
    }

    BudgetState budget;
    budget.limit = options.budget;
    std::atomic<int> next_first{0};
    std::mutex merge;
    const int workers = std::min(worker_count(options.threads), C);

    auto work = [&] {
        Searcher searcher(codebook, n, options.collect_sets, budget);
        for (int first = next_first++; first < C && !budget.exceeded; first = next_first++) searcher.run_first(first);
        std::lock_guard<std::mutex> lock(merge);
        entry.count += searcher.count;
        for (auto& s : searcher.sets) entry.sets.push_back(std::move(s));
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (budget.exceeded) {
        throw BudgetExceeded("stopping-set search of order " + std::to_string(n) + " exceeded " +
                             std::to_string(options.budget) + " nodes");
    }
    std::sort(entry.sets.begin(), entry.sets.end());
    entry.exhaustive = true;
    return entry;
}

void StoppingSetCatalog::add(StoppingSetEntry entry) { entries_[entry.n] = std::move(entry); }

std::optional<StoppingSetEntry> StoppingSetCatalog::entry(int n) const {
    const auto it = entries_.find(n);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

StoppingSetCatalog StoppingSetCatalog::build(const PatternCodebook& codebook, int n_max,
                                             const EnumerationOptions& options) {
    StoppingSetCatalog catalog(codebook.name());
    const int bound = derive_params(codebook.t(), codebook.K(), codebook.M()).n_lower_bound;
    for (int n = bound; n <= n_max; ++n) catalog.add(enumerate_stopping_sets(codebook, n, options));
    return catalog;
}

StoppingSetCatalog StoppingSetCatalog::build_for_sic(const PatternCodebook& codebook,
                                                     const EnumerationOptions& options) {
    StoppingSetCatalog catalog(codebook.name());
    const int bound = derive_params(codebook.t(), codebook.K(), codebook.M()).n_lower_bound;
    const int C = static_cast<int>(codebook.patterns().size());
    for (int n = bound; n <= std::min(options.max_order, C); ++n) {
        catalog.add(enumerate_stopping_sets(codebook, n, options));
        if (catalog.entries_.at(n).count > 0) {
            if (n + 1 <= std::min(options.max_order, C)) catalog.add(enumerate_stopping_sets(codebook, n + 1, options));
            break;
        }
    }
    return catalog;
}

std::optional<int> StoppingSetCatalog::lowest_order() const {
    for (const auto& [n, e] : entries_)
        if (e.exhaustive && e.count > 0) return n;
    return std::nullopt;
}

std::vector<int> StoppingSetCatalog::sic_orders() const {
    std::vector<int> orders;
    const auto low = lowest_order();
    if (!low) return orders;
    orders.push_back(*low);
    const auto next = entry(*low + 1);
    if (next && next->exhaustive && next->count > 0) orders.push_back(*low + 1);
    return orders;
}

std::string StoppingSetCatalog::to_json(int indent) const {
    nlohmann::ordered_json j;
    j["system"] = system_;
    j["entries"] = nlohmann::ordered_json::array();
    for (const auto& [n, e] : entries_) {
        nlohmann::ordered_json row;
        row["n"] = n;
        row["count"] = e.count;
        row["exhaustive"] = e.exhaustive;
        if (!e.sets.empty()) row["sets"] = e.sets;
        j["entries"].push_back(row);
    }
    return j.dump(indent);
}

StoppingSetCatalog StoppingSetCatalog::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    StoppingSetCatalog catalog(j.at("system").get<std::string>());
    for (const auto& row : j.at("entries")) {
        StoppingSetEntry e;
        e.n = row.at("n").get<int>();
        e.count = row.at("count").get<long long>();
        e.exhaustive = row.at("exhaustive").get<bool>();
        if (row.contains("sets")) e.sets = row.at("sets").get<std::vector<std::vector<int>>>();
        catalog.add(std::move(e));
    }
    return catalog;
}

}  // namespace gfaccess
