#include "flexent/ratemodel.hpp"

#include <algorithm>
#include <limits>

#include "flexent/errors.hpp"

namespace flexent {

const UserRates& RateReport::user(std::string_view name) const {
    for (const auto& u : users) {
        if (u.name == name) return u;
    }
    throw ConfigError("report has no user '" + std::string(name) + "'");
}

const LinkRates& RateReport::link(const Link& l) const {
    for (const auto& r : links) {
        if (r.link == l) return r;
    }
    throw ConfigError("report has no link " + l.label());
}

double user_transmission(const Network& network, const User& user) {
    return db_to_transmission(network.wss.insertion_loss_db + user.path_loss_db);
}

double gating_factor(const Detector& a, const Detector& b, Gating gating) {
    switch (gating) {
        case Gating::synchronized:
            return std::min(a.duty_cycle, b.duty_cycle);
        case Gating::independent:
            return a.duty_cycle * b.duty_cycle;
    }
    return a.duty_cycle * b.duty_cycle;
}

double link_gain(const Network& network, const Link& link) {
    const User& u = network.user(link.first());
    const User& v = network.user(link.second());
    return u.detector.efficiency * v.detector.efficiency * user_transmission(network, u) *
           user_transmission(network, v) * gating_factor(u.detector, v.detector, network.gating);
}

double photon_detection_probability(const Network& network, const User& user) {
    return user.detector.efficiency * user.detector.duty_cycle * user_transmission(network, user);
}

namespace {

// Each assigned channel sends its signal slice to link.first() and the idler to
// link.second(); both slices carry the channel's pair flux, so a user receives
// one photon per pair on every channel of every link it belongs to.
double routed_flux(const Network& network, const Allocation& allocation, std::string_view user) {
    double flux = 0.0;
    for (const auto& [index, link] : allocation.entries()) {
        if (link.involves(user)) flux += channel_flux(network.spectrum, network.channel(index));
    }
    return flux;
}

double singles_from_flux(const Network& network, const User& user, double flux) {
    return user.detector.dark_rate * user.detector.duty_cycle + flux * photon_detection_probability(network, user);
}

}  // namespace

double singles_rate(const Network& network, const Allocation& allocation, std::string_view user) {
    validate_allocation(network, allocation);
    const User& u = network.user(user);
    return singles_from_flux(network, u, routed_flux(network, allocation, user));
}

double coincidence_rate(const Network& network, const Allocation& allocation, const Link& link) {
    validate_allocation(network, allocation);
    double flux = 0.0;
    for (int index : allocation.channels_of(link)) flux += channel_flux(network.spectrum, network.channel(index));
    if (flux == 0.0) return 0.0;
    return flux * link_gain(network, link);
}

double accidental_rate(double singles_u, double singles_v, double window_ps) {
    if (!(window_ps > 0.0)) throw DomainError("coincidence window must be positive");
    return singles_u * singles_v * window_ps * 1e-12;
}

RateReport predict_report(const Network& network, const Allocation& allocation) {
    validate_allocation(network, allocation);
    const std::vector<double> flux = network.fluxes();
    auto flux_of = [&](int index) {
        for (std::size_t i = 0; i < network.channels.size(); ++i) {
            if (network.channels[i].index == index) return flux[i];
        }
        return 0.0;
    };

    RateReport report;
    std::vector<double> user_flux(network.users.size(), 0.0);
    std::vector<double> link_flux(network.links.size(), 0.0);
    std::vector<int> link_channels(network.links.size(), 0);
    for (const auto& [index, link] : allocation.entries()) {
        const double f = flux_of(index);
        user_flux[*network.user_index(link.first())] += f;
        user_flux[*network.user_index(link.second())] += f;
        const auto li = *network.link_index(link);
        link_flux[li] += f;
        link_channels[li] += 1;
    }

    for (std::size_t i = 0; i < network.users.size(); ++i) {
        report.users.push_back({network.users[i].name, singles_from_flux(network, network.users[i], user_flux[i])});
    }

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < network.links.size(); ++i) {
        const Link& link = network.links[i];
        LinkRates r;
        r.link = link;
        r.channel_count = link_channels[i];
        r.coincidence = link_flux[i] > 0.0 ? link_flux[i] * link_gain(network, link) : 0.0;
        r.accidental = accidental_rate(report.users[*network.user_index(link.first())].singles,
                                       report.users[*network.user_index(link.second())].singles,
                                       network.coincidence_window_ps);
        if (r.accidental > 0.0) r.car = r.coincidence / r.accidental;
        if (r.channel_count > 0) {
            ++report.active_link_count;
            lo = std::min(lo, r.coincidence);
            hi = std::max(hi, r.coincidence);
        }
        report.links.push_back(std::move(r));
    }
    if (report.active_link_count > 0) {
        report.min_active_rate = lo;
        report.max_active_rate = hi;
        if (lo > 0.0) report.balance_score = hi / lo;
    }
    return report;
}

}  // namespace flexent
