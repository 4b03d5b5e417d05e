#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flexent/hardware.hpp"
#include "flexent/spectrum.hpp"

namespace flexent {

struct User {
    std::string name;
    Detector detector;
    double path_loss_db = 0.0;  // everything except the shared WSS insertion loss

    bool operator==(const User&) const = default;
};

/// Unordered pair of distinct users, stored with first < second.
class Link {
public:
    Link() = default;
    Link(std::string x, std::string y);

    const std::string& first() const { return first_; }
    const std::string& second() const { return second_; }
    bool involves(std::string_view name) const { return first_ == name || second_ == name; }

    /// "Alice-Bob"
    std::string label() const { return first_ + "-" + second_; }
    static Link parse(std::string_view label);

    auto operator<=>(const Link&) const = default;

private:
    std::string first_;
    std::string second_;
};

enum class Gating {
    synchronized,  // gated detectors share one clock: joint factor min(duty_u, duty_v)
    independent,   // uncorrelated gates: joint factor duty_u * duty_v
};

/// Everything the rate model needs: spectrum, channel grid, switch, receivers.
struct Network {
    BiphotonSpectrum spectrum;
    std::vector<Channel> channels;
    WssModel wss;
    std::vector<User> users;
    std::vector<Link> links;  // candidate links; all pairs when built with all_links()
    Gating gating = Gating::synchronized;
    double coincidence_window_ps = 1024.0;

    const User& user(std::string_view name) const;
    std::optional<std::size_t> user_index(std::string_view name) const;
    std::optional<std::size_t> link_index(const Link& link) const;
    const Channel& channel(int index) const;
    bool has_channel(int index) const;

    /// Pair flux of each channel, in grid order.
    std::vector<double> fluxes() const;

    /// Every unordered pair of users, ordered by (first, second).
    static std::vector<Link> all_links(const std::vector<User>& users);
};

/// Channel index -> link. Unlisted channels are unassigned.
class Allocation {
public:
    Allocation() = default;

    void assign(int channel, Link link) { map_[channel] = std::move(link); }
    void unassign(int channel) { map_.erase(channel); }
    std::optional<Link> link_of(int channel) const;
    std::vector<int> channels_of(const Link& link) const;
    const std::map<int, Link>& entries() const { return map_; }
    bool empty() const { return map_.empty(); }
    std::size_t size() const { return map_.size(); }

    bool operator==(const Allocation&) const = default;

private:
    std::map<int, Link> map_;
};

/// Throws ConfigError naming every unknown channel, link, or user.
void validate_allocation(const Network& network, const Allocation& allocation);

}  // namespace flexent
