#include "flexent/network.hpp"

#include <algorithm>

#include "flexent/errors.hpp"

namespace flexent {

Link::Link(std::string x, std::string y) {
    if (x == y) throw ConfigError("a link needs two distinct users, got '" + x + "' twice");
    if (y < x) std::swap(x, y);
    first_ = std::move(x);
    second_ = std::move(y);
}

Link Link::parse(std::string_view label) {
    const auto dash = label.find('-');
    if (dash == std::string_view::npos || dash == 0 || dash + 1 == label.size()) {
        throw ConfigError("link label '" + std::string(label) + "' is not of the form A-B");
    }
    return Link(std::string(label.substr(0, dash)), std::string(label.substr(dash + 1)));
}

const User& Network::user(std::string_view name) const {
    const auto idx = user_index(name);
    if (!idx) throw ConfigError("unknown user '" + std::string(name) + "'");
    return users[*idx];
}

std::optional<std::size_t> Network::user_index(std::string_view name) const {
    for (std::size_t i = 0; i < users.size(); ++i) {
        if (users[i].name == name) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> Network::link_index(const Link& link) const {
    const auto it = std::find(links.begin(), links.end(), link);
    if (it == links.end()) return std::nullopt;
    return static_cast<std::size_t>(it - links.begin());
}

const Channel& Network::channel(int index) const {
    for (const auto& c : channels) {
        if (c.index == index) return c;
    }
    throw ConfigError("unknown channel " + std::to_string(index));
}

bool Network::has_channel(int index) const {
    return std::any_of(channels.begin(), channels.end(), [&](const Channel& c) { return c.index == index; });
}

std::vector<double> Network::fluxes() const { return channel_fluxes(spectrum, channels); }

std::vector<Link> Network::all_links(const std::vector<User>& users) {
    std::vector<Link> out;
    for (std::size_t i = 0; i < users.size(); ++i) {
        for (std::size_t j = i + 1; j < users.size(); ++j) out.emplace_back(users[i].name, users[j].name);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<Link> Allocation::link_of(int channel) const {
    const auto it = map_.find(channel);
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

std::vector<int> Allocation::channels_of(const Link& link) const {
    std::vector<int> out;
    for (const auto& [channel, l] : map_) {
        if (l == link) out.push_back(channel);
    }
    return out;
}

void validate_allocation(const Network& network, const Allocation& allocation) {
    std::string problems;
    for (const auto& [channel, link] : allocation.entries()) {
        if (!network.has_channel(channel)) problems += "\n  unknown channel " + std::to_string(channel);
        for (const auto* name : {&link.first(), &link.second()}) {
            if (!network.user_index(*name)) problems += "\n  channel " + std::to_string(channel) + ": unknown user '" + *name + "'";
        }
        if (network.user_index(link.first()) && network.user_index(link.second()) && !network.link_index(link)) {
            problems += "\n  channel " + std::to_string(channel) + ": link " + link.label() + " is not in the network";
        }
    }
    if (!problems.empty()) throw ConfigError("invalid allocation:" + problems);
}

}  // namespace flexent
