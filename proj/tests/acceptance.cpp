// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 on any failure.

#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "flexent/allocator.hpp"
#include "flexent/hardware.hpp"
#include "flexent/scenario.hpp"
#include "flexent/service.hpp"
#include "flexent/tomography.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace flexent;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::string failed;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            failed += " [failed: " + what + "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool close(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

Outcome scaling() {
    Outcome o;
    const DwdmModel d;
    const WssModel w;
    o.require(dwdm_filter_count(20) == 740, "filter_count(20) == 740");
    o.require(dwdm_filter_count(4) == 20, "filter_count(4) == 20");
    o.require(close(dwdm_worst_loss(d, 16), 60.6), "worst_loss(16) == 60.6");
    o.require(crossover_users(w, d) == 5, "crossover == 5");
    o.require(close(dwdm_worst_loss(d, 4), 3.6) && dwdm_worst_loss(d, 4) <= w.insertion_loss_db,
              "worst_loss(4) == 3.6 <= 4.5");
    o.detail << "filters(20)=" << dwdm_filter_count(20) << " filters(4)=" << dwdm_filter_count(4)
             << " worst(16)=" << dwdm_worst_loss(d, 16) << " dB crossover=" << crossover_users(w, d)
             << " worst(4)=" << dwdm_worst_loss(d, 4) << " dB";
    return o;
}

Outcome capacity() {
    Outcome o;
    WssModel w;
    w.port_count = 20;
    w.total_bandwidth_ghz = 4800.0;
    w.resolution_ghz = 6.25;
    const int n = fully_connected_capacity(w, 12.5);
    o.require(n == 20, "capacity == 20");
    o.detail << "capacity(20 ports, 4800 GHz, 12.5 GHz)=" << n;
    return o;
}

Outcome monte_carlo() {
    Outcome o;
    const auto t0 = Clock::now();
    const Scenario s = paper_default_scenario();
    const Network net = s.network();
    const Allocation alloc = alphabetical_fixed(net, make_fixed_groups(net, 2)).allocation;
    const RateReport predicted = predict_report(net, alloc);
    const int seeds = 30;
    const double duration = 10.0;

    std::vector<double> user_events(net.users.size(), 0.0);
    std::vector<double> link_peaks(net.links.size(), 0.0);
    int single_outside = 0;
    auto single_z = [&](double observed, double rate) {
        const double expected = rate * duration;
        if (std::abs(observed - expected) > 3.0 * std::sqrt(expected)) ++single_outside;
    };
    for (int seed = 1; seed <= seeds; ++seed) {
        const auto sim = simulate_scenario(s, alloc, duration, static_cast<std::uint64_t>(seed));
        for (std::size_t i = 0; i < sim.users.size(); ++i) {
            user_events[i] += static_cast<double>(sim.users[i].events);
            single_z(static_cast<double>(sim.users[i].events), predicted.users[i].singles);
        }
        for (std::size_t i = 0; i < sim.links.size(); ++i) {
            link_peaks[i] += static_cast<double>(sim.links[i].peak_counts);
            single_z(static_cast<double>(sim.links[i].peak_counts),
                     predicted.links[i].coincidence + predicted.links[i].accidental);
        }
    }
    const double exposure = seeds * duration;
    double worst = 0.0;
    std::string worst_name;
    auto z_check = [&](const std::string& name, double observed, double rate) {
        const double expected = rate * exposure;
        const double z = (observed - expected) / std::sqrt(expected);
        if (std::abs(z) > std::abs(worst)) worst = z, worst_name = name;
        o.require(std::abs(z) <= 3.0, name + " within 3 sigma");
    };
    for (std::size_t i = 0; i < net.users.size(); ++i)
        z_check(predicted.users[i].name, user_events[i], predicted.users[i].singles);
    for (std::size_t i = 0; i < net.links.size(); ++i) {
        const auto& l = predicted.links[i];
        z_check(l.link.label(), link_peaks[i], l.coincidence + l.accidental);
    }
    const double wall = seconds_since(t0);
    o.require(wall < 120.0, "wall time < 120 s");
    o.detail << seeds << " seeds x " << duration << " s, 4 users + 6 links, largest |z|=" << std::abs(worst) << " ("
             << worst_name << "); single runs outside 3 sigma: " << single_outside << "/" << seeds * static_cast<int>(net.users.size() + net.links.size()) << ", wall "
             << wall << " s";
    return o;
}

Outcome allocator_oracle() {
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20261018);
    int flex_instances = 0, flex_mismatch = 0;
    for (int i = 0; i < 120; ++i) {
        const Network net = instances::random_network(rng, 10, 4);
        const auto contribution = instances::contributions(net);
        const auto idx = instances::channel_indices(net);
        for (auto goal : {oracle::Goal::equalize, oracle::Goal::max_min}) {
            Objective obj;
            obj.kind = goal == oracle::Goal::equalize ? ObjectiveKind::equalize : ObjectiveKind::max_min;
            const double best = oracle::best_partition(contribution, goal);
            const double got = optimize_flex(net, idx, obj, false).objective_value;
            const bool ok = std::isinf(best) ? std::isinf(got) : std::abs(got - best) <= 1e-9 * std::abs(best);
            ++flex_instances;
            if (!ok) ++flex_mismatch;
        }
    }
    o.require(flex_mismatch == 0, "optimize_flex == partition oracle");

    int fixed_instances = 0, fixed_mismatch = 0;
    std::uniform_int_distribution<int> size(2, 6);
    for (int i = 0; i < 120; ++i) {
        const int n = size(rng);
        Network net;
        net.channels = carve_grid(net.spectrum, 24.0, 2 * n);
        static const char* names[] = {"A", "B", "C", "D"};
        for (const char* name : names) net.users.push_back(instances::random_user(rng, name));
        auto links = Network::all_links(net.users);
        std::shuffle(links.begin(), links.end(), rng);
        links.resize(static_cast<std::size_t>(n));
        std::sort(links.begin(), links.end());
        net.links = links;
        const auto groups = make_fixed_groups(net, 2);
        const auto per_channel = instances::contributions(net);
        std::vector<std::vector<double>> per_group(links.size(), std::vector<double>(groups.size(), 0.0));
        for (std::size_t l = 0; l < links.size(); ++l)
            for (std::size_t g = 0; g < groups.size(); ++g)
                for (int c : groups[g]) per_group[l][g] += per_channel[l][static_cast<std::size_t>(c - 1)];
        for (auto goal : {oracle::Goal::equalize, oracle::Goal::max_min}) {
            Objective obj;
            obj.kind = goal == oracle::Goal::equalize ? ObjectiveKind::equalize : ObjectiveKind::max_min;
            const double best = oracle::best_bijection(per_group, goal);
            const double got = enumerate_fixed(net, groups, obj).objective_value;
            ++fixed_instances;
            if (std::abs(got - best) > 1e-9 * std::abs(best)) ++fixed_mismatch;
        }
    }
    o.require(fixed_mismatch == 0, "enumerate_fixed == bijection oracle");
    const double wall = seconds_since(t0);
    o.require(wall < 300.0, "wall time < 300 s");
    o.detail << "flex " << flex_instances - flex_mismatch << "/" << flex_instances << " (<=10 channels, <=4 links), fixed "
             << fixed_instances - fixed_mismatch << "/" << fixed_instances << " (<=6x6), wall " << wall << " s";
    return o;
}

Outcome narrative() {
    Outcome o;
    const Scenario s = paper_default_scenario();
    const Network net = s.network();
    const auto groups = make_fixed_groups(net, 2);
    const auto alpha = alphabetical_fixed(net, groups);
    const auto fixed = enumerate_fixed(net, groups, Objective{});
    const auto flex = optimize_flex(net, instances::channel_indices(net), Objective{}, true);
    const double a = balance_score(alpha.predicted, alpha.active_links);
    const double f = balance_score(fixed.predicted, fixed.active_links);
    const double x = balance_score(flex.predicted, flex.active_links);

    const Link ab("Alice", "Bob"), cd("Charlie", "Dave");
    bool ab_max = true, cd_min = true;
    for (const auto& l : alpha.predicted.links) {
        if (!(l.link == ab)) ab_max &= l.coincidence < alpha.predicted.link(ab).coincidence;
        if (!(l.link == cd)) cd_min &= l.coincidence > alpha.predicted.link(cd).coincidence;
    }
    o.require(a > 100.0 && ab_max && cd_min, "(a) alphabetical > 100, AB max, CD min");
    o.require(a >= 10.0 * f, "(b) enumerate_fixed at least 10x better");
    o.require(flex.dropped_links == std::vector<Link>{cd} && flex.active_links.size() == 5 && x <= 2.0,
              "(c) drop exactly CD, score <= 2");
    o.detail << "(a) alphabetical " << a << " (b) fixed " << f << " (" << a / f << "x) (c) flex " << x << " dropping "
             << (flex.dropped_links.empty() ? std::string("nothing") : flex.dropped_links.front().label());
    return o;
}

Outcome tomography() {
    Outcome o;
    const auto t0 = Clock::now();
    std::uint64_t seed = 100;
    for (double p : {0.6, 0.8, 0.9, 1.0}) {
        const auto c = synth_counts(TwoQubitState::werner(p), 10000, seed++);
        const double mean = bayes_estimate(c, SamplerConfig{}, seed++).fidelity_mean;
        const double target = oracle::werner_fidelity(p);
        o.require(std::abs(mean - target) <= 0.02, "p=" + std::to_string(p));
        o.detail << "p=" << p << ":" << mean << "/" << target << " ";
    }
    const auto mixed = synth_counts(TwoQubitState::maximally_mixed(), 10000, seed++);
    const double m = bayes_estimate(mixed, SamplerConfig{}, seed++).fidelity_mean;
    o.require(std::abs(m - 0.25) <= 0.02, "mixed");
    o.detail << "mixed:" << m << " ";

    const Scenario s = paper_default_scenario();
    TomographyRequest req;
    req.seed = 7;
    req.channels = std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    NoiseModel noise = s.tomography.noise;
    noise.fallback.werner_p = 0.97;
    noise.per_channel.clear();
    req.noise = noise;
    double lowest = 1.0;
    for (const auto& row : tomography_scenario(s, req)) lowest = std::min(lowest, row.posterior.fidelity_mean);
    o.require(lowest > 0.95, "scan channels 1-11 above 0.95");
    const double wall = seconds_since(t0);
    o.require(wall < 300.0, "wall time < 300 s");
    o.detail << "scan p=0.97 ch1-11 min:" << lowest << ", wall " << wall << " s";
    return o;
}

Outcome invariants() {
    Outcome o;
    const auto t0 = Clock::now();
    doctest::Context ctx;
    ctx.setOption("test-suite", "properties");
    ctx.setOption("minimal", true);
    ctx.setOption("no-path-filenames", true);
    const int rc = ctx.run();
    o.require(rc == 0, "property suite");
    o.detail << "property suite exit " << rc << ", wall " << seconds_since(t0) << " s";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"scaling formulas", scaling},
        {"capacity arithmetic", capacity},
        {"monte carlo vs analytic", monte_carlo},
        {"allocator oracle equivalence", allocator_oracle},
        {"narrative reproduction", narrative},
        {"tomography oracles", tomography},
        {"invariant suites", invariants},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "threw: " << e.what();
        }
        if (!o.pass) ++failures;
        std::printf("%s  %-30s %s\n", o.pass ? "PASS" : "FAIL", c.name, (o.detail.str() + o.failed).c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
    return failures ? 1 : 0;
}
