#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gfaccess/codebook.hpp"

namespace gfaccess {

struct StoppingSetEntry {
    int n = 0;
    long long count = 0;
    bool exhaustive = false;
    /// Ascending pattern-index tuples; filled only when collect_sets is set.
    std::vector<std::vector<int>> sets;
};

struct EnumerationOptions {
    bool collect_sets = false;
    /// Cap on visited search nodes; 0 means unlimited.
    long long budget = 0;
    /// Worker threads; 0 picks std::thread::hardware_concurrency().
    int threads = 0;
    int max_order = 12;
};

/// True iff no slot is occupied by exactly one of the given patterns.
bool is_stopping_set(const PatternCodebook& codebook, const std::vector<int>& pattern_indices);

/// Exact count of order-n stopping sets. Depth-first extension over pattern
/// indices; a branch is abandoned when some singly-occupied slot has no
/// remaining candidate pattern, or when the singly-occupied slots outnumber
/// what the remaining picks could cover.
StoppingSetEntry enumerate_stopping_sets(const PatternCodebook& codebook, int n,
                                         const EnumerationOptions& options = {});

class StoppingSetCatalog {
public:
    StoppingSetCatalog() = default;
    explicit StoppingSetCatalog(std::string system) : system_(std::move(system)) {}

    /// Enumerates every order from the analytic lower bound up to n_max.
    static StoppingSetCatalog build(const PatternCodebook& codebook, int n_max, const EnumerationOptions& options = {});

    /// Enumerates upward from the lower bound until the lowest nonempty order
    /// n' is found, then also n'+1.
    static StoppingSetCatalog build_for_sic(const PatternCodebook& codebook, const EnumerationOptions& options = {});

    const std::string& system() const { return system_; }
    const std::map<int, StoppingSetEntry>& entries() const { return entries_; }
    void add(StoppingSetEntry entry);
    std::optional<StoppingSetEntry> entry(int n) const;

    /// Smallest order with a nonzero exhaustive count.
    std::optional<int> lowest_order() const;
    /// {n'} plus n'+1 when that order is nonempty.
    std::vector<int> sic_orders() const;

    /// {"system": ..., "entries": [{"n", "count", "exhaustive"}]}
    std::string to_json(int indent = 2) const;
    static StoppingSetCatalog from_json(const std::string& text);

private:
    std::string system_;
    std::map<int, StoppingSetEntry> entries_;
};

}  // namespace gfaccess
