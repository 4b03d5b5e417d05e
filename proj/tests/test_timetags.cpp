#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "flexent/allocator.hpp"
#include "flexent/errors.hpp"
#include "flexent/ratemodel.hpp"
#include "flexent/scenario.hpp"
#include "flexent/service.hpp"
#include "flexent/timetags.hpp"

using namespace flexent;

namespace {

Network two_users(double total_flux, double eff_a, double eff_b, double dark) {
    Network net;
    net.spectrum.total_pair_flux = total_flux;
    net.channels = carve_grid(net.spectrum, 24.0, 4);
    for (const char* n : {"A", "B"}) {
        User u;
        u.name = n;
        u.detector.efficiency = n[0] == 'A' ? eff_a : eff_b;
        u.detector.dark_rate = dark;
        u.detector.jitter_fwhm_ps = 60.0;
        net.users.push_back(u);
    }
    net.links = Network::all_links(net.users);
    return net;
}

Allocation all_to(const Network& net, const Link& link) {
    Allocation a;
    for (const auto& c : net.channels) a.assign(c.index, link);
    return a;
}

std::vector<std::uint64_t> poisson_times(double rate, double duration_s, std::mt19937_64& rng) {
    std::exponential_distribution<double> gap(rate * 1e-12);
    std::vector<std::uint64_t> out;
    double t = gap(rng);
    while (t < duration_s * 1e12) {
        out.push_back(static_cast<std::uint64_t>(t));
        t += gap(rng);
    }
    return out;
}

}  // namespace

TEST_SUITE("timetags") {

TEST_CASE("identical seeds give identical streams") {
    const auto net = two_users(2e5, 0.5, 0.5, 100.0);
    const auto a = all_to(net, Link("A", "B"));
    const auto s1 = simulate_timetags(net, a, 0.2, 11);
    const auto s2 = simulate_timetags(net, a, 0.2, 11);
    const auto s3 = simulate_timetags(net, a, 0.2, 12);
    CHECK(s1 == s2);
    CHECK_FALSE(s1 == s3);
    for (const auto& t : s1.times) CHECK(std::is_sorted(t.begin(), t.end()));
}

TEST_CASE("zero efficiency leaves only dark counts") {
    auto net = two_users(1e6, 0.0, 0.0, 500.0);
    net.users[1].detector.duty_cycle = 0.2;
    const auto s = simulate_timetags(net, all_to(net, Link("A", "B")), 4.0, 3);
    const double a = static_cast<double>(s.of("A").size());
    const double b = static_cast<double>(s.of("B").size());
    CHECK(std::abs(a - 2000.0) < 5.0 * std::sqrt(2000.0));
    CHECK(std::abs(b - 400.0) < 5.0 * std::sqrt(400.0));
}

TEST_CASE("mean singles over 100 seeds match the analytic rate") {
    const auto net = two_users(2e5, 0.6, 0.3, 200.0);
    const auto alloc = all_to(net, Link("A", "B"));
    const double duration = 0.05;
    for (const char* user : {"A", "B"}) {
        const double expected = singles_rate(net, alloc, user);
        double sum = 0.0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed)
            sum += static_cast<double>(simulate_timetags(net, alloc, duration, seed).of(user).size());
        const double mean_expected = expected * duration * 100.0;
        CHECK(std::abs(sum - mean_expected) < 3.0 * std::sqrt(mean_expected));
    }
}

TEST_CASE("simulation rejects non-positive duration") {
    const auto net = two_users(1e5, 0.5, 0.5, 0.0);
    CHECK_THROWS_AS(simulate_timetags(net, Allocation{}, 0.0, 1), DomainError);
}

TEST_CASE("k simultaneous events make a peak of k") {
    TimetagStream s;
    s.users = {"A", "B"};
    s.times.resize(2);
    s.duration_ps = 10'000'000;
    for (std::uint64_t i = 0; i < 25; ++i) {
        s.times[0].push_back(1000 + i * 200'000);
        s.times[1].push_back(1000 + i * 200'000);
    }
    const auto r = count_coincidences(s, 1024.0, {});
    CHECK(r.link(Link("A", "B")).histogram.peak_count() == 25);
    CHECK(r.link(Link("A", "B")).rate == doctest::Approx(25.0 / s.duration_s()));
}

TEST_CASE("offsets move the peak") {
    TimetagStream s;
    s.users = {"A", "B"};
    s.times = {{5000, 500'000}, {5000, 500'000}};
    s.duration_ps = 1'000'000;
    const auto r = count_coincidences(s, 1024.0, {{"A", 0.0}, {"B", 20000.0}});
    const auto& h = r.link(Link("A", "B")).histogram;
    CHECK(h.center_ps == 20000);
    CHECK(h.peak_count() == 2);
    CHECK(h.bin_center(h.argmax()) == 20000);
}

TEST_CASE("unsorted streams are rejected") {
    TimetagStream s;
    s.users = {"A", "B"};
    s.times = {{10, 5}, {1}};
    s.duration_ps = 100;
    CHECK_THROWS_AS(count_coincidences(s, 1024.0, {}), DataError);
}

TEST_CASE("independent streams give a flat histogram") {
    std::mt19937_64 rng(99);
    const double sa = 1e5, sb = 1e5, duration = 10.0, window = 1024.0;
    TimetagStream s;
    s.users = {"A", "B"};
    s.times = {poisson_times(sa, duration, rng), poisson_times(sb, duration, rng)};
    s.duration_ps = static_cast<std::uint64_t>(duration * 1e12);
    const auto h = count_coincidences(s, window, {}).link(Link("A", "B")).histogram;
    const double expected = sa * sb * window * 1e-12 * duration;
    double total = 0.0;
    for (auto c : h.counts) {
        total += static_cast<double>(c);
        CHECK(std::abs(static_cast<double>(c) - expected) < 5.0 * std::sqrt(expected));
    }
    const double n = static_cast<double>(h.counts.size());
    CHECK(std::abs(total - n * expected) < 3.0 * std::sqrt(n * expected));
}

TEST_CASE("default offsets put the six peaks in distinct bins") {
    const auto s = paper_default_scenario();
    const auto net = s.network();
    const auto plan = alphabetical_fixed(net, make_fixed_groups(net, 2));
    const auto sim = simulate_scenario(s, plan.allocation, 1.0, 5);
    REQUIRE(sim.links.size() == 6);
    std::set<std::int64_t> centres;
    for (const auto& l : sim.links) {
        const double expected_peak = s.offsets_ps.at(l.link.second()) - s.offsets_ps.at(l.link.first());
        CHECK(l.peak_delay_ps == static_cast<std::int64_t>(expected_peak));
        centres.insert(l.peak_delay_ps);
        if (l.predicted_coincidence > 100.0) CHECK(l.histogram.bin_center(l.histogram.argmax()) == l.peak_delay_ps);
    }
    CHECK(centres.size() == 6);
    for (auto a : centres)
        for (auto b : centres)
            if (a != b) CHECK(std::abs(a - b) >= 10000);
}

TEST_CASE("binary and text round trips") {
    const auto net = two_users(1e5, 0.5, 0.5, 50.0);
    const auto s = simulate_timetags(net, all_to(net, Link("A", "B")), 0.05, 4);

    std::stringstream bin;
    write_timetags_binary(s, bin);
    CHECK(bin.str().size() == 9 * s.event_count());
    const auto back = read_timetags_binary(bin, s.users, s.duration_ps);
    CHECK(back.times == s.times);

    std::stringstream text;
    write_timetags_text(s, text);
    const auto back2 = read_timetags_text(text);
    CHECK(back2.users == s.users);
    CHECK(back2.times == s.times);
    CHECK(back2.duration_ps == s.duration_ps);
}

TEST_CASE("binary records are little-endian with a one-byte id") {
    TimetagStream s;
    s.users = {"A", "B"};
    s.times = {{0x0102}, {0x03}};
    s.duration_ps = 1000;
    std::stringstream out;
    write_timetags_binary(s, out);
    const std::string b = out.str();
    REQUIRE(b.size() == 18);
    CHECK(b[0] == 1);  // B at t=3 comes first
    CHECK(b[1] == 3);
    CHECK(b[9] == 0);
    CHECK(b[10] == 2);
    CHECK(b[11] == 1);
}

TEST_CASE("truncated binary input is rejected") {
    std::stringstream in(std::string("\x00\x01\x02", 3));
    CHECK_THROWS_AS(read_timetags_binary(in, {"A"}, 10), DataError);
}

}
