#pragma once

// Random networks for property and oracle tests.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "flexent/network.hpp"
#include "flexent/spectrum.hpp"
#include "oracles.hpp"

namespace instances {

inline flexent::User random_user(std::mt19937_64& rng, std::string name) {
    std::uniform_real_distribution<double> eff(0.05, 1.0);
    std::uniform_real_distribution<double> loss(0.0, 6.0);
    std::bernoulli_distribution gated(0.4);
    std::uniform_real_distribution<double> duty(0.05, 0.5);
    flexent::User u;
    u.name = std::move(name);
    u.detector.efficiency = eff(rng);
    u.detector.duty_cycle = gated(rng) ? duty(rng) : 1.0;
    u.path_loss_db = loss(rng);
    return u;
}

/// Up to `max_links` links over 2..4 users and 1..max_channels channels.
inline flexent::Network random_network(std::mt19937_64& rng, int max_channels, int max_links) {
    static const char* names[] = {"Alice", "Bob", "Charlie", "Dave"};
    std::uniform_int_distribution<int> user_count(2, 4);
    std::uniform_int_distribution<int> channel_count(1, max_channels);
    std::uniform_real_distribution<double> first_null(150.0, 600.0);
    std::uniform_int_distribution<int> width_steps(5, 12);

    flexent::Network net;
    net.spectrum.first_null_detuning_ghz = first_null(rng);
    net.spectrum.stopband_halfwidth_ghz = 12.0;
    net.spectrum.total_pair_flux = 1e6;
    net.channels = flexent::carve_grid(net.spectrum, 4.0 * width_steps(rng), channel_count(rng));
    const int n = user_count(rng);
    for (int i = 0; i < n; ++i) net.users.push_back(random_user(rng, names[i]));
    auto links = flexent::Network::all_links(net.users);
    std::shuffle(links.begin(), links.end(), rng);
    const int most = std::min<int>(max_links, static_cast<int>(links.size()));
    std::uniform_int_distribution<int> link_count(std::min(2, most), most);
    links.resize(static_cast<std::size_t>(link_count(rng)));
    std::sort(links.begin(), links.end());
    net.links = links;
    std::bernoulli_distribution sync(0.5);
    net.gating = sync(rng) ? flexent::Gating::synchronized : flexent::Gating::independent;
    return net;
}

/// contribution[l][c] for the network's links and channels. Gains are written
/// out independently; channel fluxes come from the library (checked against a
/// Simpson oracle in the spectrum tests) so that allocator comparisons are not
/// blurred by quadrature differences.
inline std::vector<std::vector<double>> contributions(const flexent::Network& net) {
    std::vector<std::vector<double>> out;
    for (const auto& link : net.links) {
        std::vector<double> row;
        const auto& a = net.user(link.first());
        const auto& b = net.user(link.second());
        const double gain =
            oracle::pair_gain(a, b, net.wss.insertion_loss_db, net.gating == flexent::Gating::synchronized);
        for (const auto& ch : net.channels) {
            row.push_back(flexent::channel_flux(net.spectrum, ch) * gain);
        }
        out.push_back(std::move(row));
    }
    return out;
}

inline std::vector<int> channel_indices(const flexent::Network& net) {
    std::vector<int> out;
    for (const auto& ch : net.channels) out.push_back(ch.index);
    return out;
}

}  // namespace instances
