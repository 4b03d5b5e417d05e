#include "flexent/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "flexent/errors.hpp"

namespace flexent {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelTol = 1e-12;

std::vector<double> active_rates(std::span<const double> rates, std::span<const char> active) {
    std::vector<double> out;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (active[i]) out.push_back(rates[i]);
    }
    return out;
}

double shortfall(double rate, double target) { return target > 0.0 ? std::max(0.0, (target - rate) / target) : 0.0; }

// Greedy priority of a link; the smallest key is served next.
std::pair<int, double> need_key(const IndexedObjective& obj, std::size_t link, double rate) {
    switch (obj.kind) {
        case ObjectiveKind::equalize:
        case ObjectiveKind::max_min:
            return {0, rate};
        case ObjectiveKind::weighted_targets: {
            const double t = link < obj.targets.size() ? obj.targets[link] : 0.0;
            return t > 0.0 ? std::pair{0, rate / t} : std::pair{1, rate};
        }
        case ObjectiveKind::premium: {
            const double f = link < obj.floors.size() ? obj.floors[link] : 0.0;
            if (f > 0.0 && rate < f && static_cast<int>(link) != obj.premium) return {0, rate / f};
            if (static_cast<int>(link) == obj.premium) return {1, 0.0};
            return {2, rate};
        }
    }
    return {0, rate};
}

}  // namespace

void Objective::validate() const {
    for (const auto& [link, t] : targets) {
        if (!(t > 0.0)) throw ConfigError("target for link " + link.label() + " must be positive");
    }
    for (const auto& [link, f] : floors) {
        if (!(f > 0.0)) throw ConfigError("floor for link " + link.label() + " must be positive");
    }
    if (kind == ObjectiveKind::premium && !premium_link) throw ConfigError("premium objective needs a premium link");
    if (kind == ObjectiveKind::weighted_targets && targets.empty()) {
        throw ConfigError("weighted_targets objective needs at least one target");
    }
}

bool Score::better_than(const Score& other) const {
    const std::size_t n = std::min(key.size(), other.key.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double a = key[i];
        const double b = other.key[i];
        if (a == b) continue;
        if (std::isinf(a) || std::isinf(b)) return a < b;
        const double tol = kRelTol * std::max(std::abs(a), std::abs(b));
        if (a < b - tol) return true;
        if (a > b + tol) return false;
    }
    return false;
}

Score score_rates(const IndexedObjective& obj, std::span<const double> rates, std::span<const char> active) {
    Score s;
    std::vector<double> r = active_rates(rates, active);
    if (r.empty()) {
        s.key = {kInf};
        return s;
    }
    std::sort(r.begin(), r.end());
    switch (obj.kind) {
        case ObjectiveKind::equalize: {
            const double lo = r.front();
            const double hi = r.back();
            const auto zeros = static_cast<double>(std::count(r.begin(), r.end(), 0.0));
            s.key = {lo > 0.0 ? hi / lo : kInf, zeros};
            // Leximin on the remaining rates, then a lower maximum.
            for (double x : r) s.key.push_back(-x);
            s.key.push_back(hi);
            break;
        }
        case ObjectiveKind::max_min:
            for (double x : r) s.key.push_back(-x);
            break;
        case ObjectiveKind::weighted_targets: {
            std::vector<double> gaps;
            double worst_ratio = kInf;
            for (std::size_t i = 0; i < rates.size(); ++i) {
                if (!active[i]) continue;
                const double t = i < obj.targets.size() ? obj.targets[i] : 0.0;
                gaps.push_back(shortfall(rates[i], t));
                if (t > 0.0) worst_ratio = std::min(worst_ratio, rates[i] / t);
            }
            std::sort(gaps.rbegin(), gaps.rend());
            s.key = gaps;
            s.key.push_back(std::isinf(worst_ratio) ? 0.0 : -worst_ratio);
            break;
        }
        case ObjectiveKind::premium: {
            double violation = 0.0;
            double worst = kInf;
            for (std::size_t i = 0; i < rates.size(); ++i) {
                if (!active[i] || static_cast<int>(i) == obj.premium) continue;
                const double f = i < obj.floors.size() ? obj.floors[i] : 0.0;
                violation += shortfall(rates[i], f);
                if (f > 0.0) worst = std::min(worst, rates[i] / f);
            }
            const double p = obj.premium >= 0 && active[static_cast<std::size_t>(obj.premium)]
                                 ? rates[static_cast<std::size_t>(obj.premium)]
                                 : 0.0;
            s.key = {violation, -p, std::isinf(worst) ? 0.0 : -worst};
            break;
        }
    }
    return s;
}

double objective_value(const IndexedObjective& obj, std::span<const double> rates, std::span<const char> active) {
    const std::vector<double> r = active_rates(rates, active);
    switch (obj.kind) {
        case ObjectiveKind::equalize: {
            if (r.empty()) return kInf;
            const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
            return *lo > 0.0 ? *hi / *lo : kInf;
        }
        case ObjectiveKind::max_min:
            return r.empty() ? 0.0 : *std::min_element(r.begin(), r.end());
        case ObjectiveKind::weighted_targets: {
            double worst = 0.0;
            for (std::size_t i = 0; i < rates.size(); ++i) {
                if (active[i] && i < obj.targets.size()) worst = std::max(worst, shortfall(rates[i], obj.targets[i]));
            }
            return worst;
        }
        case ObjectiveKind::premium:
            return obj.premium >= 0 && active[static_cast<std::size_t>(obj.premium)]
                       ? rates[static_cast<std::size_t>(obj.premium)]
                       : 0.0;
    }
    return 0.0;
}

bool objective_feasible(const IndexedObjective& obj, std::span<const double> rates, std::span<const char> active) {
    const std::vector<double> r = active_rates(rates, active);
    switch (obj.kind) {
        case ObjectiveKind::equalize:
        case ObjectiveKind::max_min:
            return !r.empty() && *std::min_element(r.begin(), r.end()) > 0.0;
        case ObjectiveKind::weighted_targets:
            return objective_value(obj, rates, active) == 0.0;
        case ObjectiveKind::premium:
            for (std::size_t i = 0; i < rates.size(); ++i) {
                if (active[i] && i < obj.floors.size() && shortfall(rates[i], obj.floors[i]) > 0.0) return false;
            }
            return obj.premium >= 0 && active[static_cast<std::size_t>(obj.premium)];
    }
    return false;
}

namespace {

struct SearchState {
    const ContributionMatrix& m;
    const IndexedObjective& objective;
    std::span<const char> active;
    std::vector<int> targets;  // active links, then kUnassigned
    std::size_t evaluations = 0;

    double gain(int link, std::size_t c) const {
        return link == kUnassigned ? 0.0 : m[static_cast<std::size_t>(link)][c];
    }

    std::vector<double> rates_of(const std::vector<int>& owner) const {
        std::vector<double> r(m.size(), 0.0);
        for (std::size_t c = 0; c < owner.size(); ++c) {
            if (owner[c] != kUnassigned) r[static_cast<std::size_t>(owner[c])] += gain(owner[c], c);
        }
        return r;
    }

    Score evaluate(const std::vector<double>& rates) {
        ++evaluations;
        return score_rates(objective, rates, active);
    }

    // Best-improvement descent over relocations (including unassigning) and swaps.
    void descend(std::vector<int>& owner, std::vector<double>& rates, Score& score) {
        const std::size_t channels = owner.size();
        std::vector<double> trial;
        auto shift = [](std::vector<double>& r, int link, double delta) {
            if (link != kUnassigned) r[static_cast<std::size_t>(link)] += delta;
        };
        while (true) {
            Score best = score;
            enum class Move { none, relocate, swap } move = Move::none;
            std::size_t best_a = 0, best_b = 0;
            int best_to = kUnassigned;

            for (std::size_t c = 0; c < channels; ++c) {
                const int from = owner[c];
                for (int to : targets) {
                    if (to == from) continue;
                    trial = rates;
                    shift(trial, from, -gain(from, c));
                    shift(trial, to, gain(to, c));
                    Score s = evaluate(trial);
                    if (s.better_than(best)) {
                        best = std::move(s);
                        move = Move::relocate;
                        best_a = c;
                        best_to = to;
                    }
                }
            }
            for (std::size_t a = 0; a < channels; ++a) {
                for (std::size_t b = a + 1; b < channels; ++b) {
                    const int la = owner[a];
                    const int lb = owner[b];
                    if (la == lb) continue;
                    trial = rates;
                    shift(trial, la, gain(la, b) - gain(la, a));
                    shift(trial, lb, gain(lb, a) - gain(lb, b));
                    Score s = evaluate(trial);
                    if (s.better_than(best)) {
                        best = std::move(s);
                        move = Move::swap;
                        best_a = a;
                        best_b = b;
                    }
                }
            }
            if (move == Move::none) return;
            if (move == Move::relocate) {
                owner[best_a] = best_to;
            } else {
                std::swap(owner[best_a], owner[best_b]);
            }
            // Recompute from scratch so rounding drift cannot accumulate.
            rates = rates_of(owner);
            score = evaluate(rates);
        }
    }
};

// Optimistic value of the primary score key once the remaining channels are
// placed: every link may still collect everything left.
double primary_bound(const IndexedObjective& obj, const std::vector<double>& rates,
                     const std::vector<double>& remaining, std::span<const char> active) {
    double cur_max = 0.0;
    double best_min = kInf;
    double worst_gap = 0.0;
    double violation = 0.0;
    for (std::size_t l = 0; l < rates.size(); ++l) {
        if (!active[l]) continue;
        const double reach = rates[l] + remaining[l];
        cur_max = std::max(cur_max, rates[l]);
        best_min = std::min(best_min, reach);
        if (l < obj.targets.size()) worst_gap = std::max(worst_gap, shortfall(reach, obj.targets[l]));
        if (static_cast<int>(l) != obj.premium && l < obj.floors.size()) violation += shortfall(reach, obj.floors[l]);
    }
    switch (obj.kind) {
        case ObjectiveKind::equalize:
            if (cur_max == 0.0) return best_min > 0.0 ? 1.0 : kInf;
            return best_min > 0.0 ? cur_max / best_min : kInf;
        case ObjectiveKind::max_min:
            return -best_min;
        case ObjectiveKind::weighted_targets:
            return worst_gap;
        case ObjectiveKind::premium:
            return violation;
    }
    return -kInf;
}

bool bound_excludes(double bound, double incumbent) {
    if (bound == incumbent) return false;
    if (std::isinf(bound) || std::isinf(incumbent)) return bound > incumbent;
    return bound > incumbent + kRelTol * std::max(std::abs(bound), std::abs(incumbent));
}

// Depth-first branch and bound over every owner choice, seeded with the
// incumbent so only strictly better assignments replace it.
void exact_polish(SearchState& st, SearchResult& res) {
    const std::size_t channels = res.owner.size();
    const std::size_t links = st.m.size();
    std::vector<std::size_t> order(channels);
    std::iota(order.begin(), order.end(), 0);
    auto biggest = [&](std::size_t c) {
        double g = 0.0;
        for (std::size_t l = 0; l < links; ++l) g = std::max(g, st.m[l][c]);
        return g;
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return biggest(a) > biggest(b); });

    // suffix[d][l]: what link l could still gain from channels order[d..].
    std::vector<std::vector<double>> suffix(channels + 1, std::vector<double>(links, 0.0));
    for (std::size_t d = channels; d-- > 0;) {
        for (std::size_t l = 0; l < links; ++l) suffix[d][l] = suffix[d + 1][l] + st.m[l][order[d]];
    }

    std::vector<int> owner(channels, kUnassigned);
    std::vector<std::vector<double>> rates(channels + 1, std::vector<double>(links, 0.0));
    auto visit = [&](auto&& self, std::size_t depth) -> void {
        if (depth == channels) {
            Score s = st.evaluate(rates[depth]);
            if (s.better_than(res.score)) {
                res.owner = owner;
                res.rates = rates[depth];
                res.score = std::move(s);
            }
            return;
        }
        ++st.evaluations;
        if (bound_excludes(primary_bound(st.objective, rates[depth], suffix[depth], st.active), res.score.key[0])) {
            return;
        }
        const std::size_t c = order[depth];
        for (int to : st.targets) {
            rates[depth + 1] = rates[depth];
            if (to != kUnassigned) rates[depth + 1][static_cast<std::size_t>(to)] += st.m[static_cast<std::size_t>(to)][c];
            owner[c] = to;
            self(self, depth + 1);
        }
        owner[c] = kUnassigned;
    };
    visit(visit, 0);
    res.rates = st.rates_of(res.owner);
    res.score = score_rates(st.objective, res.rates, st.active);
}

}  // namespace

SearchResult flex_search(const ContributionMatrix& contribution, const IndexedObjective& objective,
                         std::span<const char> active, const SearchOptions& options) {
    const std::size_t links = contribution.size();
    const std::size_t channels = links ? contribution[0].size() : 0;
    SearchResult res;
    res.owner.assign(channels, kUnassigned);
    res.rates.assign(links, 0.0);

    SearchState st{contribution, objective, active, {}, 0};
    for (std::size_t l = 0; l < links; ++l) {
        if (active[l]) st.targets.push_back(static_cast<int>(l));
    }
    if (st.targets.empty() || channels == 0) {
        res.score = score_rates(objective, res.rates, active);
        return res;
    }
    const std::vector<int> served = st.targets;
    st.targets.push_back(kUnassigned);

    // Greedy seeding: the worst-off link takes its best remaining channel.
    std::vector<char> taken(channels, 0);
    for (std::size_t step = 0; step < channels; ++step) {
        auto needy = static_cast<std::size_t>(served.front());
        for (int li : served) {
            const auto l = static_cast<std::size_t>(li);
            if (need_key(objective, l, res.rates[l]) < need_key(objective, needy, res.rates[needy])) needy = l;
        }
        std::size_t pick = channels;
        for (std::size_t c = 0; c < channels; ++c) {
            if (taken[c]) continue;
            if (pick == channels || contribution[needy][c] > contribution[needy][pick]) pick = c;
        }
        taken[pick] = 1;
        res.owner[pick] = static_cast<int>(needy);
        res.rates[needy] += contribution[needy][pick];
    }

    res.rates = st.rates_of(res.owner);
    res.score = st.evaluate(res.rates);
    st.descend(res.owner, res.rates, res.score);

    // Iterated local search: kick a few channels of the incumbent to random
    // owners and descend again. Plateau moves (equal score) are accepted.
    std::mt19937_64 rng(options.seed);
    std::vector<int> cur_owner = res.owner;
    std::vector<double> cur_rates = res.rates;
    Score cur_score = res.score;
    std::size_t idle = 0;
    while (idle < options.max_idle_kicks && st.evaluations < options.max_evaluations) {
        std::vector<int> owner = cur_owner;
        const std::size_t kick = std::min<std::size_t>(channels, 2 + rng() % 2);
        for (std::size_t k = 0; k < kick; ++k) {
            const std::size_t c = rng() % channels;
            owner[c] = st.targets[rng() % st.targets.size()];
        }
        std::vector<double> rates = st.rates_of(owner);
        Score score = st.evaluate(rates);
        st.descend(owner, rates, score);
        ++idle;
        if (!cur_score.better_than(score)) {
            cur_owner = owner;
            cur_rates = rates;
            cur_score = score;
        }
        if (score.better_than(res.score)) {
            res.owner = std::move(owner);
            res.rates = std::move(rates);
            res.score = std::move(score);
            idle = 0;
        }
    }

    double space = 1.0;
    for (std::size_t c = 0; c < channels && space <= static_cast<double>(options.exact_limit); ++c) {
        space *= static_cast<double>(st.targets.size());
    }
    if (space <= static_cast<double>(options.exact_limit)) exact_polish(st, res);

    res.evaluations = st.evaluations;
    return res;
}

SearchResult fixed_search(const ContributionMatrix& group_contribution, const IndexedObjective& objective) {
    const std::size_t links = group_contribution.size();
    const std::size_t groups = links ? group_contribution[0].size() : 0;
    if (groups != links) {
        throw ConstraintError("fixed grid needs one group per link: " + std::to_string(groups) + " groups, " +
                              std::to_string(links) + " links");
    }
    if (groups > kMaxEnumeratedGroups) {
        throw SizeError(std::to_string(groups) + " groups is too many to enumerate (limit " +
                        std::to_string(kMaxEnumeratedGroups) + "); use optimize_flex instead");
    }
    const std::vector<char> active(links, 1);
    std::vector<int> perm(groups);
    std::iota(perm.begin(), perm.end(), 0);

    SearchResult best;
    std::vector<double> rates(links);
    bool first = true;
    do {
        std::fill(rates.begin(), rates.end(), 0.0);
        for (std::size_t g = 0; g < groups; ++g) {
            const auto l = static_cast<std::size_t>(perm[g]);
            rates[l] += group_contribution[l][g];
        }
        Score s = score_rates(objective, rates, active);
        ++best.evaluations;
        if (first || s.better_than(best.score)) {
            best.owner = perm;
            best.rates = rates;
            best.score = std::move(s);
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// ---------------------------------------------------------------------------

IndexedObjective index_objective(const Network& network, const Objective& objective) {
    objective.validate();
    IndexedObjective out;
    out.kind = objective.kind;
    out.targets.assign(network.links.size(), 0.0);
    out.floors.assign(network.links.size(), 0.0);
    auto index_of = [&](const Link& link) {
        const auto i = network.link_index(link);
        if (!i) throw ConfigError("objective references link " + link.label() + " which is not in the network");
        return *i;
    };
    for (const auto& [link, t] : objective.targets) out.targets[index_of(link)] = t;
    for (const auto& [link, f] : objective.floors) out.floors[index_of(link)] = f;
    if (objective.premium_link) out.premium = static_cast<int>(index_of(*objective.premium_link));
    return out;
}

namespace {

std::size_t channel_position(const Network& network, int index) {
    for (std::size_t i = 0; i < network.channels.size(); ++i) {
        if (network.channels[i].index == index) return i;
    }
    throw ConfigError("unknown channel " + std::to_string(index));
}

std::vector<double> link_gains(const Network& network) {
    std::vector<double> g;
    g.reserve(network.links.size());
    for (const auto& l : network.links) g.push_back(link_gain(network, l));
    return g;
}

AllocationPlan finish_plan(const Network& network, const IndexedObjective& objective, Allocation allocation,
                           const std::vector<char>& active, std::size_t evaluations) {
    AllocationPlan plan;
    plan.allocation = std::move(allocation);
    plan.predicted = predict_report(network, plan.allocation);
    plan.evaluations = evaluations;
    std::vector<double> rates;
    for (std::size_t l = 0; l < network.links.size(); ++l) {
        rates.push_back(plan.predicted.links[l].coincidence);
        (active[l] ? plan.active_links : plan.dropped_links).push_back(network.links[l]);
    }
    plan.objective_value = objective_value(objective, rates, active);
    plan.feasible = objective_feasible(objective, rates, active);
    if (!plan.feasible) {
        switch (objective.kind) {
            case ObjectiveKind::equalize:
            case ObjectiveKind::max_min:
                plan.diagnostics.push_back("some active link has zero coincidence rate");
                break;
            case ObjectiveKind::weighted_targets:
                plan.diagnostics.push_back("targets unreachable: largest relative shortfall " +
                                           std::to_string(plan.objective_value));
                break;
            case ObjectiveKind::premium:
                plan.diagnostics.push_back("floors unreachable for at least one link");
                break;
        }
    }
    return plan;
}

}  // namespace

std::vector<std::vector<int>> make_fixed_groups(const Network& network, int group_size) {
    if (group_size < 1) throw ConstraintError("group size must be at least 1");
    std::vector<int> indices;
    for (const auto& c : network.channels) indices.push_back(c.index);
    std::sort(indices.begin(), indices.end());
    if (indices.size() % static_cast<std::size_t>(group_size) != 0) {
        throw ConstraintError(std::to_string(indices.size()) + " channels do not split into groups of " +
                              std::to_string(group_size));
    }
    std::vector<std::vector<int>> groups;
    for (std::size_t i = 0; i < indices.size(); i += static_cast<std::size_t>(group_size)) {
        groups.emplace_back(indices.begin() + static_cast<std::ptrdiff_t>(i),
                            indices.begin() + static_cast<std::ptrdiff_t>(i + static_cast<std::size_t>(group_size)));
    }
    return groups;
}

AllocationPlan alphabetical_fixed(const Network& network, const std::vector<std::vector<int>>& groups,
                                  const Objective& objective) {
    if (groups.size() != network.links.size()) {
        throw ConstraintError("fixed grid needs one group per link: " + std::to_string(groups.size()) + " groups, " +
                              std::to_string(network.links.size()) + " links");
    }
    std::vector<Link> order = network.links;
    std::sort(order.begin(), order.end());
    Allocation a;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (int c : groups[g]) a.assign(c, order[g]);
    }
    return finish_plan(network, index_objective(network, objective), std::move(a),
                       std::vector<char>(network.links.size(), 1), 1);
}

AllocationPlan enumerate_fixed(const Network& network, const std::vector<std::vector<int>>& groups,
                               const Objective& objective) {
    const IndexedObjective obj = index_objective(network, objective);
    const std::vector<double> flux = network.fluxes();
    const std::vector<double> gains = link_gains(network);
    ContributionMatrix m(network.links.size(), std::vector<double>(groups.size(), 0.0));
    for (std::size_t l = 0; l < network.links.size(); ++l) {
        for (std::size_t g = 0; g < groups.size(); ++g) {
            double f = 0.0;
            for (int c : groups[g]) f += flux[channel_position(network, c)];
            m[l][g] = gains[l] * f;
        }
    }
    const SearchResult r = fixed_search(m, obj);
    Allocation a;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (int c : groups[g]) a.assign(c, network.links[static_cast<std::size_t>(r.owner[g])]);
    }
    return finish_plan(network, obj, std::move(a), std::vector<char>(network.links.size(), 1), r.evaluations);
}

AllocationPlan optimize_flex(const Network& network, std::span<const int> channels, const Objective& objective,
                             bool allow_drop, double drop_fraction) {
    if (channels.empty()) throw ConstraintError("optimize_flex needs at least one channel");
    if (network.links.empty()) throw ConstraintError("optimize_flex needs at least one link");
    const IndexedObjective obj = index_objective(network, objective);
    const std::vector<double> flux = network.fluxes();
    const std::vector<double> gains = link_gains(network);

    ContributionMatrix m(network.links.size(), std::vector<double>(channels.size(), 0.0));
    for (std::size_t l = 0; l < network.links.size(); ++l) {
        for (std::size_t c = 0; c < channels.size(); ++c) m[l][c] = gains[l] * flux[channel_position(network, channels[c])];
    }

    std::vector<char> active(network.links.size(), 1);
    std::vector<std::string> notes;
    if (allow_drop) {
        std::vector<double> achievable;
        for (const auto& row : m) achievable.push_back(std::accumulate(row.begin(), row.end(), 0.0));
        std::vector<double> sorted = achievable;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        for (std::size_t l = 0; l < achievable.size(); ++l) {
            if (achievable[l] < drop_fraction * median) {
                active[l] = 0;
                notes.push_back("dropped " + network.links[l].label() + ": best achievable rate " +
                                std::to_string(achievable[l]) + "/s is below " + std::to_string(drop_fraction) +
                                " x median " + std::to_string(median) + "/s");
            }
        }
    }

    const SearchResult r = flex_search(m, obj, active);
    Allocation a;
    for (std::size_t c = 0; c < channels.size(); ++c) {
        if (r.owner[c] != kUnassigned) a.assign(channels[c], network.links[static_cast<std::size_t>(r.owner[c])]);
    }
    AllocationPlan plan = finish_plan(network, obj, std::move(a), active, r.evaluations);
    plan.diagnostics.insert(plan.diagnostics.begin(), notes.begin(), notes.end());
    return plan;
}

AllocationPlan plan(const Network& network, const GridPolicy& policy, const Objective& objective) {
    if (policy.kind == GridPolicyKind::fixed_grid) {
        return enumerate_fixed(network, make_fixed_groups(network, policy.group_size), objective);
    }
    if (policy.kind == GridPolicyKind::fixed_alphabetical) {
        return alphabetical_fixed(network, make_fixed_groups(network, policy.group_size), objective);
    }
    std::vector<int> all;
    for (const auto& c : network.channels) all.push_back(c.index);
    return optimize_flex(network, all, objective, policy.allow_drop, policy.drop_fraction);
}

double feasibility(const Network& network, const Link& link, std::span<const int> channels,
                   std::optional<std::size_t> k) {
    std::vector<double> f;
    for (int c : channels) f.push_back(channel_flux(network.spectrum, network.channel(c)));
    std::sort(f.rbegin(), f.rend());
    const std::size_t take = std::min(f.size(), k.value_or(f.size()));
    const double total = std::accumulate(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(take), 0.0);
    return total > 0.0 ? total * link_gain(network, link) : 0.0;
}

double balance_score(const RateReport& report, std::span<const Link> active_links) {
    if (active_links.empty()) throw UndefinedError("balance score needs at least one active link");
    double lo = kInf;
    double hi = 0.0;
    for (const auto& l : active_links) {
        const double r = report.link(l).coincidence;
        if (!(r > 0.0)) throw UndefinedError("balance score undefined: link " + l.label() + " has zero rate");
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return hi / lo;
}

}  // namespace flexent
