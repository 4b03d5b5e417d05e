#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flexent/network.hpp"

namespace flexent {

struct UserRates {
    std::string name;
    double singles = 0.0;
};

struct LinkRates {
    Link link;
    int channel_count = 0;
    double coincidence = 0.0;
    double accidental = 0.0;
    std::optional<double> car;  // only when accidental > 0
};

struct RateReport {
    std::vector<UserRates> users;  // network order
    std::vector<LinkRates> links;  // network order

    // Computed over links that carry at least one channel.
    int active_link_count = 0;
    double min_active_rate = 0.0;
    double max_active_rate = 0.0;
    std::optional<double> balance_score;  // max/min, absent when no active link or min is 0

    const UserRates& user(std::string_view name) const;
    const LinkRates& link(const Link& link) const;
};

/// Transmission from source to a user's detector, WSS loss included.
double user_transmission(const Network& network, const User& user);

/// Joint gate-open probability for a pair of detectors.
double gating_factor(const Detector& a, const Detector& b, Gating gating);

/// Coincidences per pair/s of flux routed to the link: eta_u eta_v T_u T_v G.
double link_gain(const Network& network, const Link& link);

/// Detection probability per photon routed to the user: eta * duty * T.
double photon_detection_probability(const Network& network, const User& user);

double singles_rate(const Network& network, const Allocation& allocation, std::string_view user);
double coincidence_rate(const Network& network, const Allocation& allocation, const Link& link);

/// Accidentals in one coincidence window: S_u * S_v * window.
double accidental_rate(double singles_u, double singles_v, double window_ps);

RateReport predict_report(const Network& network, const Allocation& allocation);

}  // namespace flexent
