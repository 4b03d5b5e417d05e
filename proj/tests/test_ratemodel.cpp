#include <cmath>

#include "doctest.h"
#include "flexent/allocator.hpp"
#include "flexent/errors.hpp"
#include "flexent/ratemodel.hpp"
#include "flexent/scenario.hpp"
#include "oracles.hpp"

using namespace flexent;

namespace {

User ideal(std::string name, double eff = 1.0, double duty = 1.0, double dark = 0.0) {
    User u;
    u.name = std::move(name);
    u.detector.efficiency = eff;
    u.detector.duty_cycle = duty;
    u.detector.dark_rate = dark;
    return u;
}

// Two users, one channel whose flux is exactly `flux` pairs/s, WSS loss `wss_db`.
Network one_channel(double flux, double wss_db, User a, User b) {
    Network net;
    net.channels = carve_grid(net.spectrum, 24.0, 1);
    net.spectrum.total_pair_flux = 1.0;
    net.spectrum.total_pair_flux = flux / channel_flux(net.spectrum, net.channels[0]);
    net.wss.insertion_loss_db = wss_db;
    net.users = {std::move(a), std::move(b)};
    net.links = Network::all_links(net.users);
    return net;
}

}  // namespace

TEST_SUITE("ratemodel") {

TEST_CASE("singles with an empty allocation are dark counts") {
    auto net = one_channel(1000.0, 0.0, ideal("A", 0.5, 0.2, 300.0), ideal("B"));
    CHECK(singles_rate(net, Allocation{}, "A") == doctest::Approx(60.0));
    CHECK(singles_rate(net, Allocation{}, "B") == 0.0);
}

TEST_CASE("singles through a lossy path") {
    auto net = one_channel(1000.0, 3.01, ideal("A", 0.5), ideal("B"));
    Allocation a;
    a.assign(1, Link("A", "B"));
    CHECK(singles_rate(net, a, "A") == doctest::Approx(1000.0 * 0.5 * std::pow(10.0, -0.301)).epsilon(1e-9));
    CHECK(singles_rate(net, a, "A") == doctest::Approx(250.0).epsilon(1e-3));
}

TEST_CASE("full spectrum to a lossless ideal user") {
    Network net;
    net.spectrum.stopband_halfwidth_ghz = 0.0;
    const double wide = 50.0 * net.spectrum.first_null_detuning_ghz;
    net.channels = {Channel{1, {0.0, wide}, {-wide, 0.0}}};
    net.wss.insertion_loss_db = 0.0;
    net.users = {ideal("A", 1.0, 1.0, 40.0), ideal("B")};
    net.links = Network::all_links(net.users);
    Allocation a;
    a.assign(1, Link("A", "B"));
    CHECK(singles_rate(net, a, "A") == doctest::Approx(net.spectrum.total_pair_flux + 40.0).epsilon(5e-3));
}

TEST_CASE("coincidence rate examples") {
    auto net = one_channel(1000.0, 0.0, ideal("A", 0.85), ideal("B", 0.85));
    Allocation a;
    CHECK(coincidence_rate(net, a, Link("A", "B")) == 0.0);
    a.assign(1, Link("A", "B"));
    CHECK(coincidence_rate(net, a, Link("A", "B")) == doctest::Approx(722.5).epsilon(1e-9));
}

TEST_CASE("gating factor") {
    Detector g;
    g.duty_cycle = 0.1;
    CHECK(gating_factor(g, g, Gating::synchronized) == doctest::Approx(0.1));
    CHECK(gating_factor(g, g, Gating::independent) == doctest::Approx(0.01));
}

TEST_CASE("accidental rate") {
    CHECK(accidental_rate(1e5, 1e5, 1024.0) == doctest::Approx(10.24));
    CHECK(accidental_rate(0.0, 1e5, 1024.0) == 0.0);
    CHECK(accidental_rate(3e4, 2e3, 2048.0) == doctest::Approx(2.0 * accidental_rate(3e4, 2e3, 1024.0)));
}

TEST_CASE("unknown references are config errors") {
    auto net = one_channel(1000.0, 0.0, ideal("A"), ideal("B"));
    Allocation a;
    a.assign(7, Link("A", "B"));
    CHECK_THROWS_AS(predict_report(net, a), ConfigError);
    Allocation b;
    b.assign(1, Link("A", "Zed"));
    CHECK_THROWS_AS(predict_report(net, b), ConfigError);
    CHECK_THROWS_AS(singles_rate(net, Allocation{}, "Zed"), ConfigError);
}

TEST_CASE("empty allocation report") {
    const auto s = paper_default_scenario();
    const auto net = s.network();
    const auto r = predict_report(net, Allocation{});
    for (const auto& l : r.links) CHECK(l.coincidence == 0.0);
    for (const auto& u : r.users) {
        const auto& d = net.user(u.name).detector;
        CHECK(u.singles == doctest::Approx(d.dark_rate * d.duty_cycle));
    }
    CHECK(r.active_link_count == 0);
    CHECK_FALSE(r.balance_score.has_value());
}

TEST_CASE("symmetric two-user network is symmetric under exchange") {
    auto net = one_channel(1000.0, 1.0, ideal("A", 0.7, 1.0, 10.0), ideal("B", 0.7, 1.0, 10.0));
    net.channels = carve_grid(net.spectrum, 24.0, 2);
    Allocation a;
    a.assign(1, Link("A", "B"));
    a.assign(2, Link("B", "A"));
    const auto r = predict_report(net, a);
    CHECK(r.user("A").singles == doctest::Approx(r.user("B").singles));
    REQUIRE(r.links.size() == 1);
    CHECK(r.links[0].channel_count == 2);
}

TEST_CASE("report fields on the default scenario") {
    const auto s = paper_default_scenario();
    const auto net = s.network();
    const auto plan = alphabetical_fixed(net, make_fixed_groups(net, 2));
    const auto& r = plan.predicted;
    for (const auto& l : r.links) {
        const double sa = r.user(l.link.first()).singles;
        const double sb = r.user(l.link.second()).singles;
        CHECK(l.accidental == doctest::Approx(sa * sb * net.coincidence_window_ps * 1e-12));
        REQUIRE(l.car.has_value());
        CHECK(*l.car == doctest::Approx(l.coincidence / l.accidental));
        const auto& a = net.user(l.link.first());
        const auto& b = net.user(l.link.second());
        double flux = 0.0;
        for (int c : plan.allocation.channels_of(l.link)) flux += channel_flux(net.spectrum, net.channel(c));
        CHECK(l.coincidence ==
              doctest::Approx(flux * oracle::pair_gain(a, b, net.wss.insertion_loss_db, true)).epsilon(1e-12));
    }
}

TEST_CASE("alphabetical allocation ranks AB first and CD last") {
    const auto s = paper_default_scenario();
    const auto net = s.network();
    const auto r = alphabetical_fixed(net, make_fixed_groups(net, 2)).predicted;
    const double ab = r.link(Link("Alice", "Bob")).coincidence;
    const double cd = r.link(Link("Charlie", "Dave")).coincidence;
    for (const auto& l : r.links) {
        if (!(l.link == Link("Alice", "Bob"))) CHECK(l.coincidence < ab);
        if (!(l.link == Link("Charlie", "Dave"))) CHECK(l.coincidence > cd);
    }
}

}
