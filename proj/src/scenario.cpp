#include "flexent/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "wire.hpp"

#ifndef FLEXENT_SCENARIO_DIR
#define FLEXENT_SCENARIO_DIR "scenarios"
#endif

namespace flexent {

namespace {

using wire::child_pointer;

template <class F>
void capture(std::vector<FieldIssue>& issues, const std::string& pointer, F&& check) {
    try {
        check();
    } catch (const Error& e) {
        issues.push_back({pointer, e.what()});
    }
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

bool valid_user_name(std::string_view name) {
    if (name.empty() || name.size() > 32) return false;
    for (char c : name) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

Network Scenario::network() const {
    Network n;
    n.spectrum = spectrum;
    n.channels = carve_grid(spectrum, grid.slice_width_ghz, grid.channel_count);
    n.wss = wss;
    n.users = users;
    n.links = links.empty() ? Network::all_links(users) : links;
    n.gating = gating;
    n.coincidence_window_ps = coincidence_window_ps;
    return n;
}

Link Scenario::probe_link() const {
    if (tomography.probe_link) return *tomography.probe_link;
    if (!links.empty()) return links.front();
    const auto all = Network::all_links(users);
    if (all.empty()) throw ConfigError("no link available to probe");
    return all.front();
}

std::vector<int> Scenario::tomography_channels() const {
    if (!tomography.channels.empty()) return tomography.channels;
    std::vector<int> out;
    for (int i = 1; i <= grid.channel_count; ++i) out.push_back(i);
    return out;
}

std::vector<FieldIssue> scenario_issues(const Scenario& s) {
    std::vector<FieldIssue> issues;
    auto add = [&](std::string pointer, std::string message) { issues.push_back({std::move(pointer), std::move(message)}); };

    capture(issues, "/spectrum", [&] { s.spectrum.validate(); });
    capture(issues, "/wss", [&] { s.wss.validate(); });
    capture(issues, "/dwdm", [&] { s.dwdm.validate(); });

    if (!(s.grid.slice_width_ghz > 0.0)) add("/grid/slice_width_ghz", "must be positive");
    if (s.grid.channel_count < 1) add("/grid/channel_count", "must be at least 1");

    std::set<std::string> names;
    for (std::size_t i = 0; i < s.users.size(); ++i) {
        const User& u = s.users[i];
        const std::string p = child_pointer("/users", i);
        if (!valid_user_name(u.name)) {
            add(p + "/name", "user names are 1-32 characters from [A-Za-z0-9_], got '" + u.name + "'");
        } else if (!names.insert(u.name).second) {
            add(p + "/name", "duplicate user '" + u.name + "'");
        }
        const Detector& d = u.detector;
        if (!(d.efficiency >= 0.0 && d.efficiency <= 1.0)) add(p + "/detector/efficiency", "must lie in [0, 1]");
        if (!(d.duty_cycle > 0.0 && d.duty_cycle <= 1.0)) add(p + "/detector/duty_cycle", "must lie in (0, 1]");
        if (!(d.dark_rate >= 0.0) || !finite(d.dark_rate)) add(p + "/detector/dark_rate", "must be non-negative");
        if (!(d.jitter_fwhm_ps >= 0.0) || !finite(d.jitter_fwhm_ps)) {
            add(p + "/detector/jitter_fwhm_ps", "must be non-negative");
        }
        if (!(u.path_loss_db >= 0.0) || !finite(u.path_loss_db)) add(p + "/path_loss_db", "must be non-negative");
    }
    if (s.users.size() < 2) add("/users", "at least two users are needed");

    auto known_link = [&](const Link& l) { return names.contains(l.first()) && names.contains(l.second()); };
    std::set<Link> link_set;
    for (std::size_t i = 0; i < s.links.size(); ++i) {
        const std::string p = child_pointer("/links", i);
        if (!known_link(s.links[i])) add(p, "link " + s.links[i].label() + " names an unknown user");
        if (!link_set.insert(s.links[i]).second) add(p, "duplicate link " + s.links[i].label());
    }
    if (link_set.empty()) {
        for (const auto& l : Network::all_links(s.users)) link_set.insert(l);
    }
    auto candidate = [&](const Link& l) { return link_set.contains(l); };

    for (const auto& [name, offset] : s.offsets_ps) {
        if (!names.contains(name)) add(child_pointer("/offsets_ps", name), "unknown user '" + name + "'");
        if (!finite(offset)) add(child_pointer("/offsets_ps", name), "must be finite");
    }
    if (!(s.coincidence_window_ps >= 1.0) || !finite(s.coincidence_window_ps)) {
        add("/coincidence_window_ps", "must be at least 1 ps");
    }

    // Grid geometry against the switch.
    std::vector<Channel> channels;
    if (s.grid.slice_width_ghz > 0.0 && s.grid.channel_count >= 1) {
        capture(issues, "/grid", [&] { channels = carve_grid(s.spectrum, s.grid.slice_width_ghz, s.grid.channel_count); });
        for (const auto& v : validate_grid(channels, s.wss, s.spectrum.stopband_halfwidth_ghz)) {
            add("/grid", "channel " + std::to_string(v.channel_index) + " " + v.slice + ": " + v.message);
        }
    }
    auto has_channel = [&](int c) { return c >= 1 && c <= s.grid.channel_count; };

    capture(issues, "/objective", [&] { s.objective.validate(); });
    for (const auto& [l, t] : s.objective.targets) {
        if (!candidate(l)) add(child_pointer("/objective/targets", l.label()), "not a candidate link");
    }
    for (const auto& [l, f] : s.objective.floors) {
        if (!candidate(l)) add(child_pointer("/objective/floors", l.label()), "not a candidate link");
    }
    if (s.objective.premium_link && !candidate(*s.objective.premium_link)) {
        add("/objective/premium_link", "not a candidate link");
    }

    if (s.policy.group_size < 1) add("/policy/group_size", "must be at least 1");
    if (!(s.policy.drop_fraction >= 0.0 && s.policy.drop_fraction <= 1.0)) {
        add("/policy/drop_fraction", "must lie in [0, 1]");
    }

    if (s.allocation) {
        for (const auto& [c, l] : s.allocation->entries()) {
            const std::string p = child_pointer("/allocation", std::to_string(c));
            if (!has_channel(c)) add(p, "unknown channel " + std::to_string(c));
            if (!candidate(l)) add(p, "link " + l.label() + " is not a candidate link");
        }
    }

    if (!(s.simulation.duration_s > 0.0) || !finite(s.simulation.duration_s)) {
        add("/simulation/duration_s", "must be positive");
    }
    if (!(s.simulation.histogram_span_ps >= s.coincidence_window_ps)) {
        add("/simulation/histogram_span_ps", "must be at least the coincidence window");
    }

    const auto& t = s.tomography;
    if (t.probe_link && !candidate(*t.probe_link)) add("/tomography/probe_link", "not a candidate link");
    for (std::size_t i = 0; i < t.channels.size(); ++i) {
        if (!has_channel(t.channels[i])) {
            add(child_pointer("/tomography/channels", i), "unknown channel " + std::to_string(t.channels[i]));
        }
    }
    auto check_noise = [&](const ChannelNoise& n, const std::string& p) {
        if (!(n.werner_p >= 0.0 && n.werner_p <= 1.0)) add(p + "/werner_p", "must lie in [0, 1]");
        if (!finite(n.phase)) add(p + "/phase", "must be finite");
    };
    check_noise(t.noise.fallback, "/tomography/noise");
    for (const auto& [c, n] : t.noise.per_channel) {
        const std::string p = child_pointer("/tomography/noise/per_channel", std::to_string(c));
        if (!has_channel(c)) add(p, "unknown channel " + std::to_string(c));
        check_noise(n, p);
    }
    if (!(t.noise.integration_s > 0.0)) add("/tomography/noise/integration_s", "must be positive");
    const auto& c = t.sampler;
    if (c.samples == 0) add("/tomography/sampler/samples", "must be positive");
    if (c.thin == 0) add("/tomography/sampler/thin", "must be positive");
    if (c.ancilla_dim < 1) add("/tomography/sampler/ancilla_dim", "must be at least 1");
    if (c.leapfrog_steps < 1) add("/tomography/sampler/leapfrog_steps", "must be at least 1");
    if (!(c.initial_step > 0.0)) add("/tomography/sampler/initial_step", "must be positive");
    if (!(c.target_acceptance > 0.0 && c.target_acceptance < 1.0)) {
        add("/tomography/sampler/target_acceptance", "must lie in (0, 1)");
    }
    if (c.adapt_interval == 0) add("/tomography/sampler/adapt_interval", "must be positive");
    return issues;
}

void validate_scenario(const Scenario& scenario) {
    auto issues = scenario_issues(scenario);
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

Scenario paper_default_scenario() {
    Scenario s;
    s.name = "paper-default";
    s.users = {
        {"Alice", Detector{0.85, 1.0, 300.0, 60.0}, 0.0},
        {"Bob", Detector{0.85, 1.0, 300.0, 60.0}, 0.0},
        {"Charlie", Detector{0.2, 0.1, 2000.0, 250.0}, 0.0},
        {"Dave", Detector{0.1, 0.1, 2000.0, 250.0}, 0.0},
    };
    s.links = Network::all_links(s.users);
    // Pairwise differences 10, 20, ..., 60 ns keep the six link peaks apart.
    s.offsets_ps = {{"Alice", 0.0}, {"Bob", 10000.0}, {"Charlie", 40000.0}, {"Dave", 60000.0}};
    s.policy.kind = GridPolicyKind::full_flex;
    s.policy.allow_drop = true;
    s.tomography.probe_link = Link("Alice", "Bob");
    s.tomography.noise.fallback.werner_p = 0.97;
    return s;
}

Scenario parse_scenario(std::string_view text) {
    const wire::json j = wire::parse_text(text);
    std::vector<FieldIssue> issues;
    wire::Reader reader(issues);
    Scenario s = wire::scenario_from_json(j, reader, "");
    if (!issues.empty()) throw ValidationError(std::move(issues));
    validate_scenario(s);
    return s;
}

std::string format_scenario(const Scenario& scenario) { return wire::render(wire::to_json(scenario)); }

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write scenario file " + path.string());
    out << format_scenario(scenario);
    if (!out) throw ConfigError("failed writing scenario file " + path.string());
}

std::filesystem::path bundled_scenario_dir() { return FLEXENT_SCENARIO_DIR; }

}  // namespace flexent
