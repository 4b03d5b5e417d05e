#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flexent/network.hpp"
#include "flexent/ratemodel.hpp"

namespace flexent {

enum class ObjectiveKind {
    equalize,          // minimize max/min rate over active links
    max_min,           // maximize the minimum active-link rate
    weighted_targets,  // minimize the largest relative shortfall against per-link targets
    premium,           // maximize one link's rate subject to floors on the others
};

struct Objective {
    ObjectiveKind kind = ObjectiveKind::equalize;
    std::map<Link, double> targets;  // weighted_targets
    std::optional<Link> premium_link;
    std::map<Link, double> floors;  // premium

    void validate() const;
    bool operator==(const Objective&) const = default;
};

enum class GridPolicyKind {
    fixed_grid,             // fixed groups, best group -> link bijection
    fixed_alphabetical,     // fixed groups, centre-out to links in alphabetical order (baseline)
    full_flex,              // any channel to any link
};

struct GridPolicy {
    GridPolicyKind kind = GridPolicyKind::full_flex;
    int group_size = 2;          // fixed_grid: channels per group
    bool allow_drop = false;     // full_flex: may serve a subgraph
    double drop_fraction = 0.5;  // drop links below this fraction of the median achievable rate

    bool operator==(const GridPolicy&) const = default;
};

struct AllocationPlan {
    Allocation allocation;
    std::vector<Link> active_links;
    std::vector<Link> dropped_links;
    RateReport predicted;
    double objective_value = 0.0;
    bool feasible = true;
    std::vector<std::string> diagnostics;
    std::size_t evaluations = 0;
};

// ---------------------------------------------------------------------------
// Index-level search core. Link l earns contribution[l][c] when given channel c;
// a link's rate is the sum over its channels.

using ContributionMatrix = std::vector<std::vector<double>>;

struct IndexedObjective {
    ObjectiveKind kind = ObjectiveKind::equalize;
    std::vector<double> targets;  // weighted_targets, one per link
    int premium = -1;             // premium link index
    std::vector<double> floors;   // premium, one per link (0 = no floor)
};

/// Lexicographic cost; smaller is better. Entries beyond the first break
/// plateaus of the primary objective without changing its optimum.
struct Score {
    std::vector<double> key;

    /// Strictly better than `other` beyond a relative tolerance.
    bool better_than(const Score& other) const;
};

Score score_rates(const IndexedObjective& objective, std::span<const double> rates, std::span<const char> active);

/// The objective's natural value: ratio (equalize), min rate (max_min), max
/// shortfall (weighted_targets), or premium-link rate (premium).
double objective_value(const IndexedObjective& objective, std::span<const double> rates, std::span<const char> active);

/// Whether targets/floors are met; equalize and max_min need every active rate > 0.
bool objective_feasible(const IndexedObjective& objective, std::span<const double> rates, std::span<const char> active);

inline constexpr int kUnassigned = -1;

struct SearchResult {
    std::vector<int> owner;  // per channel: link index or kUnassigned
    std::vector<double> rates;
    Score score;
    std::size_t evaluations = 0;
};

struct SearchOptions {
    std::size_t max_idle_kicks = 300;         // stop after this many kicks without improvement
    std::size_t max_evaluations = 20'000'000;  // hard budget on objective evaluations
    std::uint64_t seed = 0x5eed;               // perturbation stream; fixed for determinism
    std::size_t exact_limit = 20'000'000;      // branch-and-bound polish when (links+1)^channels <= this; 0 disables
};

/// Greedy seeding, then best-improvement local search over single-channel
/// moves (including unassigning) and pairwise swaps. The local optimum is then
/// refined by deterministic kick-and-descend rounds and, when the assignment
/// space is within options.exact_limit, closed by branch and bound.
SearchResult flex_search(const ContributionMatrix& contribution, const IndexedObjective& objective,
                         std::span<const char> active, const SearchOptions& options = {});

/// Exhaustive search over bijections group -> link. Ties go to the
/// lexicographically smallest assignment vector.
SearchResult fixed_search(const ContributionMatrix& group_contribution, const IndexedObjective& objective);

inline constexpr std::size_t kMaxEnumeratedGroups = 8;

// ---------------------------------------------------------------------------
// Network-level planning.

/// Contiguous groups of `group_size` channels counted from the centre out.
std::vector<std::vector<int>> make_fixed_groups(const Network& network, int group_size);

/// Group i goes to the i-th link in alphabetical order.
AllocationPlan alphabetical_fixed(const Network& network, const std::vector<std::vector<int>>& groups,
                                  const Objective& objective = {});

AllocationPlan enumerate_fixed(const Network& network, const std::vector<std::vector<int>>& groups,
                               const Objective& objective);

AllocationPlan optimize_flex(const Network& network, std::span<const int> channels, const Objective& objective,
                             bool allow_drop, double drop_fraction = 0.5);

/// Dispatch on the policy: fixed_grid uses enumerate_fixed, fixed_alphabetical uses
/// alphabetical_fixed, full_flex uses optimize_flex on every channel.
AllocationPlan plan(const Network& network, const GridPolicy& policy, const Objective& objective);

/// Rate the link would reach with the k highest-flux channels (all when k is empty).
double feasibility(const Network& network, const Link& link, std::span<const int> channels,
                   std::optional<std::size_t> k = std::nullopt);

/// max/min coincidence rate over the active links; UndefinedError if any is 0.
double balance_score(const RateReport& report, std::span<const Link> active_links);

IndexedObjective index_objective(const Network& network, const Objective& objective);

}  // namespace flexent
