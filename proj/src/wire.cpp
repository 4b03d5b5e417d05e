#include "wire.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flexent::wire {

namespace {

template <class Enum, std::size_t N>
bool enum_field(Reader& r, const json& obj, const std::string& pointer, std::string_view key, Enum& out,
                const std::pair<Enum, std::string_view> (&names)[N]) {
    std::string text;
    if (!r.field(obj, pointer, key, text)) return false;
    for (const auto& [value, name] : names) {
        if (text == name) {
            out = value;
            return true;
        }
    }
    std::string expected;
    for (const auto& [value, name] : names) expected += (expected.empty() ? "" : ", ") + std::string(name);
    r.issue(child_pointer(pointer, key), "unknown value '" + text + "' (expected one of " + expected + ")");
    return false;
}

constexpr std::pair<Gating, std::string_view> kGatings[] = {{Gating::synchronized, "synchronized"},
                                                           {Gating::independent, "independent"}};
constexpr std::pair<ObjectiveKind, std::string_view> kObjectives[] = {
    {ObjectiveKind::equalize, "equalize"},
    {ObjectiveKind::max_min, "max_min"},
    {ObjectiveKind::weighted_targets, "weighted_targets"},
    {ObjectiveKind::premium, "premium"}};
constexpr std::pair<GridPolicyKind, std::string_view> kPolicies[] = {
    {GridPolicyKind::fixed_grid, "fixed_grid"},
    {GridPolicyKind::fixed_alphabetical, "fixed_alphabetical"},
    {GridPolicyKind::full_flex, "full_flex"}};
constexpr std::pair<SamplerKind, std::string_view> kSamplers[] = {{SamplerKind::hmc, "hmc"},
                                                                 {SamplerKind::pcn_metropolis, "pcn_metropolis"}};
constexpr std::pair<DwdmBestCase, std::string_view> kBestCases[] = {
    {DwdmBestCase::two_transmissions, "two_transmissions"},
    {DwdmBestCase::reflection_and_transmission, "reflection_and_transmission"}};

template <class Enum, std::size_t N>
std::string name_of(Enum value, const std::pair<Enum, std::string_view> (&names)[N]) {
    for (const auto& [v, n] : names) {
        if (v == value) return std::string(n);
    }
    return "unknown";
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::map<Link, double> link_map_from_json(const json& j, Reader& r, const std::string& pointer) {
    std::map<Link, double> out;
    if (!r.expect_object(j, pointer)) return out;
    for (const auto& [key, value] : j.items()) {
        const std::string p = child_pointer(pointer, key);
        Link link;
        if (!r.link(json(key), p, link)) continue;
        if (!value.is_number()) {
            r.issue(p, "expected a number");
            continue;
        }
        out[link] = value.get<double>();
    }
    return out;
}

json link_map_to_json(const std::map<Link, double>& m) {
    json out = json::object();
    for (const auto& [link, v] : m) out[link.label()] = v;
    return out;
}

json histogram_to_json(const DelayHistogram& h) {
    return {{"center_ps", h.center_ps}, {"bin_width_ps", h.bin_width_ps}, {"first_bin", h.first_bin},
            {"counts", h.counts}};
}

}  // namespace

json parse_text(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points just past the offending character.
        const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string what = e.what();
        const auto colon = what.rfind(": ");
        if (colon != std::string::npos) what = what.substr(colon + 2);
        throw ParseError(what, line, column);
    }
}

std::string render(const json& j) { return j.dump(2) + "\n"; }

std::string child_pointer(const std::string& parent, std::string_view key) {
    std::string out = parent + "/";
    for (char c : key) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out += c;
        }
    }
    return out;
}

std::string child_pointer(const std::string& parent, std::size_t index) {
    return parent + "/" + std::to_string(index);
}

bool Reader::expect_object(const json& j, const std::string& pointer) {
    if (j.is_object()) return true;
    issue(pointer.empty() ? "/" : pointer, "expected an object");
    return false;
}

void Reader::reject_unknown(const json& obj, const std::string& pointer,
                            std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) return;
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            issue(child_pointer(pointer, key), "unknown field");
        }
    }
}

const json* Reader::member(const json& obj, const std::string& pointer, std::string_view key, bool required) {
    if (!obj.is_object()) return nullptr;
    const auto it = obj.find(std::string(key));
    if (it == obj.end() || (it->is_null() && !required)) {
        if (required) issue(child_pointer(pointer, key), "required field is missing");
        return nullptr;
    }
    return &*it;
}

bool Reader::field(const json& obj, const std::string& pointer, std::string_view key, double& out, bool required) {
    const json* v = member(obj, pointer, key, required);
    if (!v) return false;
    if (!v->is_number()) {
        issue(child_pointer(pointer, key), "expected a number");
        return false;
    }
    out = v->get<double>();
    return true;
}

bool Reader::field(const json& obj, const std::string& pointer, std::string_view key, int& out, bool required) {
    const json* v = member(obj, pointer, key, required);
    if (!v) return false;
    if (!v->is_number_integer()) {
        issue(child_pointer(pointer, key), "expected an integer");
        return false;
    }
    const auto value = v->get<std::int64_t>();
    if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
        issue(child_pointer(pointer, key), "integer out of range");
        return false;
    }
    out = static_cast<int>(value);
    return true;
}

bool Reader::field(const json& obj, const std::string& pointer, std::string_view key, std::uint64_t& out,
                   bool required) {
    const json* v = member(obj, pointer, key, required);
    if (!v) return false;
    if (!v->is_number_unsigned()) {
        issue(child_pointer(pointer, key), "expected a non-negative integer");
        return false;
    }
    out = v->get<std::uint64_t>();
    return true;
}

bool Reader::field(const json& obj, const std::string& pointer, std::string_view key, bool& out, bool required) {
    const json* v = member(obj, pointer, key, required);
    if (!v) return false;
    if (!v->is_boolean()) {
        issue(child_pointer(pointer, key), "expected true or false");
        return false;
    }
    out = v->get<bool>();
    return true;
}

bool Reader::field(const json& obj, const std::string& pointer, std::string_view key, std::string& out,
                   bool required) {
    const json* v = member(obj, pointer, key, required);
    if (!v) return false;
    if (!v->is_string()) {
        issue(child_pointer(pointer, key), "expected a string");
        return false;
    }
    out = v->get<std::string>();
    return true;
}

bool Reader::link(const json& j, const std::string& pointer, Link& out) {
    if (!j.is_string()) {
        issue(pointer, "expected a link label such as \"Alice-Bob\"");
        return false;
    }
    try {
        out = Link::parse(j.get<std::string>());
        return true;
    } catch (const Error& e) {
        issue(pointer, e.what());
        return false;
    }
}

std::string gating_name(Gating g) { return name_of(g, kGatings); }
std::string objective_name(ObjectiveKind k) { return name_of(k, kObjectives); }
std::string policy_name(GridPolicyKind k) { return name_of(k, kPolicies); }
std::string sampler_name(SamplerKind k) { return name_of(k, kSamplers); }

// ---------------------------------------------------------------------------

json to_json(const Allocation& a) {
    json out = json::object();
    for (const auto& [channel, link] : a.entries()) out[std::to_string(channel)] = link.label();
    return out;
}

Allocation allocation_from_json(const json& j, Reader& r, const std::string& pointer) {
    Allocation out;
    if (!r.expect_object(j, pointer)) return out;
    for (const auto& [key, value] : j.items()) {
        const std::string p = child_pointer(pointer, key);
        int channel = 0;
        const bool digits = !key.empty() && key.size() < 9 && std::all_of(key.begin(), key.end(), ::isdigit);
        if (!digits) {
            r.issue(p, "channel keys must be positive integers");
            continue;
        }
        channel = std::stoi(key);
        Link link;
        if (r.link(value, p, link)) out.assign(channel, link);
    }
    return out;
}

json to_json(const Objective& o) {
    json out = {{"kind", objective_name(o.kind)}};
    if (!o.targets.empty()) out["targets"] = link_map_to_json(o.targets);
    if (o.premium_link) out["premium_link"] = o.premium_link->label();
    if (!o.floors.empty()) out["floors"] = link_map_to_json(o.floors);
    return out;
}

Objective objective_from_json(const json& j, Reader& r, const std::string& pointer) {
    Objective o;
    if (!r.expect_object(j, pointer)) return o;
    r.reject_unknown(j, pointer, {"kind", "targets", "premium_link", "floors"});
    enum_field(r, j, pointer, "kind", o.kind, kObjectives);
    if (const json* t = r.member(j, pointer, "targets")) o.targets = link_map_from_json(*t, r, child_pointer(pointer, "targets"));
    if (const json* f = r.member(j, pointer, "floors")) o.floors = link_map_from_json(*f, r, child_pointer(pointer, "floors"));
    if (const json* p = r.member(j, pointer, "premium_link")) {
        Link link;
        if (r.link(*p, child_pointer(pointer, "premium_link"), link)) o.premium_link = link;
    }
    return o;
}

json to_json(const GridPolicy& p) {
    return {{"kind", policy_name(p.kind)},
            {"group_size", p.group_size},
            {"allow_drop", p.allow_drop},
            {"drop_fraction", p.drop_fraction}};
}

GridPolicy policy_from_json(const json& j, Reader& r, const std::string& pointer) {
    GridPolicy p;
    if (!r.expect_object(j, pointer)) return p;
    r.reject_unknown(j, pointer, {"kind", "group_size", "allow_drop", "drop_fraction"});
    enum_field(r, j, pointer, "kind", p.kind, kPolicies);
    r.field(j, pointer, "group_size", p.group_size);
    r.field(j, pointer, "allow_drop", p.allow_drop);
    r.field(j, pointer, "drop_fraction", p.drop_fraction);
    return p;
}

json to_json(const NoiseModel& n) {
    json per = json::object();
    for (const auto& [ch, noise] : n.per_channel) {
        per[std::to_string(ch)] = {{"werner_p", noise.werner_p}, {"phase", noise.phase}};
    }
    return {{"werner_p", n.fallback.werner_p},
            {"phase", n.fallback.phase},
            {"per_channel", per},
            {"per_basis_total", n.per_basis_total ? json(*n.per_basis_total) : json(nullptr)},
            {"integration_s", n.integration_s}};
}

NoiseModel noise_from_json(const json& j, Reader& r, const std::string& pointer) {
    NoiseModel n;
    if (!r.expect_object(j, pointer)) return n;
    r.reject_unknown(j, pointer, {"werner_p", "phase", "per_channel", "per_basis_total", "integration_s"});
    r.field(j, pointer, "werner_p", n.fallback.werner_p);
    r.field(j, pointer, "phase", n.fallback.phase);
    r.field(j, pointer, "integration_s", n.integration_s);
    std::uint64_t total = 0;
    if (r.field(j, pointer, "per_basis_total", total)) n.per_basis_total = total;
    if (const json* per = r.member(j, pointer, "per_channel")) {
        const std::string pp = child_pointer(pointer, "per_channel");
        if (r.expect_object(*per, pp)) {
            for (const auto& [key, value] : per->items()) {
                const std::string p = child_pointer(pp, key);
                const bool digits = !key.empty() && key.size() < 9 && std::all_of(key.begin(), key.end(), ::isdigit);
                if (!digits) {
                    r.issue(p, "channel keys must be positive integers");
                    continue;
                }
                if (!r.expect_object(value, p)) continue;
                r.reject_unknown(value, p, {"werner_p", "phase"});
                ChannelNoise c = n.fallback;
                r.field(value, p, "werner_p", c.werner_p);
                r.field(value, p, "phase", c.phase);
                n.per_channel[std::stoi(key)] = c;
            }
        }
    }
    return n;
}

json to_json(const SamplerConfig& c) {
    return {{"kind", sampler_name(c.kind)},
            {"burn_in", c.burn_in},
            {"samples", c.samples},
            {"thin", c.thin},
            {"ancilla_dim", c.ancilla_dim},
            {"leapfrog_steps", c.leapfrog_steps},
            {"initial_step", c.initial_step},
            {"target_acceptance", c.target_acceptance},
            {"adapt_interval", c.adapt_interval},
            {"ess_threshold", c.ess_threshold},
            {"keep_states", c.keep_states}};
}

SamplerConfig sampler_from_json(const json& j, Reader& r, const std::string& pointer) {
    SamplerConfig c;
    if (!r.expect_object(j, pointer)) return c;
    r.reject_unknown(j, pointer,
                     {"kind", "burn_in", "samples", "thin", "ancilla_dim", "leapfrog_steps", "initial_step",
                      "target_acceptance", "adapt_interval", "ess_threshold", "keep_states"});
    enum_field(r, j, pointer, "kind", c.kind, kSamplers);
    std::uint64_t v = 0;
    if (r.field(j, pointer, "burn_in", v)) c.burn_in = v;
    if (r.field(j, pointer, "samples", v)) c.samples = v;
    if (r.field(j, pointer, "thin", v)) c.thin = v;
    if (r.field(j, pointer, "adapt_interval", v)) c.adapt_interval = v;
    r.field(j, pointer, "ancilla_dim", c.ancilla_dim);
    r.field(j, pointer, "leapfrog_steps", c.leapfrog_steps);
    r.field(j, pointer, "initial_step", c.initial_step);
    r.field(j, pointer, "target_acceptance", c.target_acceptance);
    r.field(j, pointer, "ess_threshold", c.ess_threshold);
    r.field(j, pointer, "keep_states", c.keep_states);
    return c;
}

json to_json(const Scenario& s) {
    json users = json::array();
    for (const auto& u : s.users) {
        users.push_back({{"name", u.name},
                         {"path_loss_db", u.path_loss_db},
                         {"detector",
                          {{"efficiency", u.detector.efficiency},
                           {"duty_cycle", u.detector.duty_cycle},
                           {"dark_rate", u.detector.dark_rate},
                           {"jitter_fwhm_ps", u.detector.jitter_fwhm_ps}}}});
    }
    json links = json::array();
    for (const auto& l : s.links) links.push_back(l.label());
    json tomo = {{"seed", s.tomography.seed},
                 {"probe_link", s.tomography.probe_link ? json(s.tomography.probe_link->label()) : json(nullptr)},
                 {"channels", s.tomography.channels},
                 {"noise", to_json(s.tomography.noise)},
                 {"sampler", to_json(s.tomography.sampler)}};
    return {
        {"format", kScenarioFormat},
        {"name", s.name},
        {"spectrum",
         {{"first_null_detuning_ghz", s.spectrum.first_null_detuning_ghz},
          {"stopband_halfwidth_ghz", s.spectrum.stopband_halfwidth_ghz},
          {"total_pair_flux", s.spectrum.total_pair_flux}}},
        {"grid", {{"slice_width_ghz", s.grid.slice_width_ghz}, {"channel_count", s.grid.channel_count}}},
        {"wss",
         {{"port_count", s.wss.port_count},
          {"insertion_loss_db", s.wss.insertion_loss_db},
          {"resolution_ghz", s.wss.resolution_ghz},
          {"addressability_ghz", s.wss.addressability_ghz},
          {"total_bandwidth_ghz", s.wss.total_bandwidth_ghz}}},
        {"dwdm",
         {{"reflection_loss_db", s.dwdm.reflection_loss_db},
          {"transmission_loss_db", s.dwdm.transmission_loss_db},
          {"best_case", name_of(s.dwdm.best_case, kBestCases)}}},
        {"users", users},
        {"links", links},
        {"offsets_ps", s.offsets_ps},
        {"gating", gating_name(s.gating)},
        {"coincidence_window_ps", s.coincidence_window_ps},
        {"objective", to_json(s.objective)},
        {"policy", to_json(s.policy)},
        {"allocation", s.allocation ? to_json(*s.allocation) : json(nullptr)},
        {"simulation",
         {{"duration_s", s.simulation.duration_s},
          {"seed", s.simulation.seed},
          {"histogram_span_ps", s.simulation.histogram_span_ps}}},
        {"tomography", tomo},
    };
}

Scenario scenario_from_json(const json& j, Reader& r, const std::string& pointer) {
    Scenario s;
    if (!r.expect_object(j, pointer)) return s;
    r.reject_unknown(j, pointer,
                     {"format", "name", "spectrum", "grid", "wss", "dwdm", "users", "links", "offsets_ps", "gating",
                      "coincidence_window_ps", "objective", "policy", "allocation", "simulation", "tomography"});

    std::string format;
    if (r.field(j, pointer, "format", format, true) && format != kScenarioFormat) {
        r.issue(child_pointer(pointer, "format"),
                "unsupported format '" + format + "' (expected " + std::string(kScenarioFormat) + ")");
    }
    r.field(j, pointer, "name", s.name);

    auto section = [&](std::string_view key, std::initializer_list<std::string_view> allowed) -> const json* {
        const json* m = r.member(j, pointer, key);
        if (!m) return nullptr;
        const std::string p = child_pointer(pointer, key);
        if (!r.expect_object(*m, p)) return nullptr;
        r.reject_unknown(*m, p, allowed);
        return m;
    };

    if (const json* m = section("spectrum", {"first_null_detuning_ghz", "stopband_halfwidth_ghz", "total_pair_flux"})) {
        const std::string p = child_pointer(pointer, "spectrum");
        r.field(*m, p, "first_null_detuning_ghz", s.spectrum.first_null_detuning_ghz);
        r.field(*m, p, "stopband_halfwidth_ghz", s.spectrum.stopband_halfwidth_ghz);
        r.field(*m, p, "total_pair_flux", s.spectrum.total_pair_flux);
    }
    if (const json* m = section("grid", {"slice_width_ghz", "channel_count"})) {
        const std::string p = child_pointer(pointer, "grid");
        r.field(*m, p, "slice_width_ghz", s.grid.slice_width_ghz);
        r.field(*m, p, "channel_count", s.grid.channel_count);
    }
    if (const json* m = section("wss", {"port_count", "insertion_loss_db", "resolution_ghz", "addressability_ghz",
                                        "total_bandwidth_ghz"})) {
        const std::string p = child_pointer(pointer, "wss");
        r.field(*m, p, "port_count", s.wss.port_count);
        r.field(*m, p, "insertion_loss_db", s.wss.insertion_loss_db);
        r.field(*m, p, "resolution_ghz", s.wss.resolution_ghz);
        r.field(*m, p, "addressability_ghz", s.wss.addressability_ghz);
        r.field(*m, p, "total_bandwidth_ghz", s.wss.total_bandwidth_ghz);
    }
    if (const json* m = section("dwdm", {"reflection_loss_db", "transmission_loss_db", "best_case"})) {
        const std::string p = child_pointer(pointer, "dwdm");
        r.field(*m, p, "reflection_loss_db", s.dwdm.reflection_loss_db);
        r.field(*m, p, "transmission_loss_db", s.dwdm.transmission_loss_db);
        enum_field(r, *m, p, "best_case", s.dwdm.best_case, kBestCases);
    }

    if (const json* users = r.member(j, pointer, "users", true)) {
        const std::string up = child_pointer(pointer, "users");
        if (!users->is_array()) {
            r.issue(up, "expected an array");
        } else {
            for (std::size_t i = 0; i < users->size(); ++i) {
                const json& u = (*users)[i];
                const std::string p = child_pointer(up, i);
                User user;
                if (!r.expect_object(u, p)) continue;
                r.reject_unknown(u, p, {"name", "detector", "path_loss_db"});
                r.field(u, p, "name", user.name, true);
                r.field(u, p, "path_loss_db", user.path_loss_db);
                if (const json* d = r.member(u, p, "detector", true)) {
                    const std::string dp = child_pointer(p, "detector");
                    if (r.expect_object(*d, dp)) {
                        r.reject_unknown(*d, dp, {"efficiency", "duty_cycle", "dark_rate", "jitter_fwhm_ps"});
                        r.field(*d, dp, "efficiency", user.detector.efficiency, true);
                        r.field(*d, dp, "duty_cycle", user.detector.duty_cycle, true);
                        r.field(*d, dp, "dark_rate", user.detector.dark_rate, true);
                        r.field(*d, dp, "jitter_fwhm_ps", user.detector.jitter_fwhm_ps, true);
                    }
                }
                s.users.push_back(std::move(user));
            }
        }
    }

    if (const json* links = r.member(j, pointer, "links")) {
        const std::string lp = child_pointer(pointer, "links");
        if (!links->is_array()) {
            r.issue(lp, "expected an array");
        } else {
            for (std::size_t i = 0; i < links->size(); ++i) {
                Link l;
                if (r.link((*links)[i], child_pointer(lp, i), l)) s.links.push_back(l);
            }
        }
    }
    if (const json* off = r.member(j, pointer, "offsets_ps")) {
        const std::string op = child_pointer(pointer, "offsets_ps");
        if (r.expect_object(*off, op)) {
            for (const auto& [key, value] : off->items()) {
                if (!value.is_number()) {
                    r.issue(child_pointer(op, key), "expected a number");
                    continue;
                }
                s.offsets_ps[key] = value.get<double>();
            }
        }
    }
    enum_field(r, j, pointer, "gating", s.gating, kGatings);
    r.field(j, pointer, "coincidence_window_ps", s.coincidence_window_ps);
    if (const json* m = r.member(j, pointer, "objective")) {
        s.objective = objective_from_json(*m, r, child_pointer(pointer, "objective"));
    }
    if (const json* m = r.member(j, pointer, "policy")) s.policy = policy_from_json(*m, r, child_pointer(pointer, "policy"));
    if (const json* m = r.member(j, pointer, "allocation")) {
        s.allocation = allocation_from_json(*m, r, child_pointer(pointer, "allocation"));
    }
    if (const json* m = section("simulation", {"duration_s", "seed", "histogram_span_ps"})) {
        const std::string p = child_pointer(pointer, "simulation");
        r.field(*m, p, "duration_s", s.simulation.duration_s);
        r.field(*m, p, "seed", s.simulation.seed);
        r.field(*m, p, "histogram_span_ps", s.simulation.histogram_span_ps);
    }
    if (const json* m = section("tomography", {"seed", "probe_link", "channels", "noise", "sampler"})) {
        const std::string p = child_pointer(pointer, "tomography");
        r.field(*m, p, "seed", s.tomography.seed);
        if (const json* pl = r.member(*m, p, "probe_link")) {
            Link l;
            if (r.link(*pl, child_pointer(p, "probe_link"), l)) s.tomography.probe_link = l;
        }
        if (const json* ch = r.member(*m, p, "channels")) {
            const std::string cp = child_pointer(p, "channels");
            if (!ch->is_array()) {
                r.issue(cp, "expected an array of channel indices");
            } else {
                for (std::size_t i = 0; i < ch->size(); ++i) {
                    if (!(*ch)[i].is_number_integer()) {
                        r.issue(child_pointer(cp, i), "expected an integer");
                        continue;
                    }
                    s.tomography.channels.push_back((*ch)[i].get<int>());
                }
            }
        }
        if (const json* n = r.member(*m, p, "noise")) s.tomography.noise = noise_from_json(*n, r, child_pointer(p, "noise"));
        if (const json* c = r.member(*m, p, "sampler")) {
            s.tomography.sampler = sampler_from_json(*c, r, child_pointer(p, "sampler"));
        }
    }
    return s;
}

// ---------------------------------------------------------------------------

json to_json(const RateReport& report) {
    json users = json::array();
    for (const auto& u : report.users) users.push_back({{"name", u.name}, {"singles", u.singles}});
    json links = json::array();
    for (const auto& l : report.links) {
        links.push_back({{"link", l.link.label()},
                         {"channel_count", l.channel_count},
                         {"coincidence", l.coincidence},
                         {"accidental", l.accidental},
                         {"car", optional_number(l.car)}});
    }
    return {{"users", users},
            {"links", links},
            {"active_link_count", report.active_link_count},
            {"min_active_rate", report.min_active_rate},
            {"max_active_rate", report.max_active_rate},
            {"balance_score", optional_number(report.balance_score)}};
}

json to_json(const AllocationPlan& plan) {
    json active = json::array();
    for (const auto& l : plan.active_links) active.push_back(l.label());
    json dropped = json::array();
    for (const auto& l : plan.dropped_links) dropped.push_back(l.label());
    return {{"allocation", to_json(plan.allocation)},
            {"active_links", active},
            {"dropped_links", dropped},
            {"objective_value", std::isfinite(plan.objective_value) ? json(plan.objective_value) : json(nullptr)},
            {"feasible", plan.feasible},
            {"diagnostics", plan.diagnostics},
            {"evaluations", plan.evaluations},
            {"predicted", to_json(plan.predicted)}};
}

json to_json(const std::vector<LossRow>& rows) {
    json out = json::array();
    for (const auto& row : rows) {
        out.push_back({{"users", row.n_users},
                       {"wss_db", row.wss_loss_db},
                       {"dwdm_best_db", row.dwdm_best_db},
                       {"dwdm_worst_db", row.dwdm_worst_db},
                       {"dwdm_filters", dwdm_filter_count(row.n_users)}});
    }
    return out;
}

json to_json(const SimulationSummary& summary) {
    json users = json::array();
    for (const auto& u : summary.users) {
        users.push_back({{"name", u.name},
                         {"events", u.events},
                         {"measured_singles", u.measured_singles},
                         {"predicted_singles", u.predicted_singles}});
    }
    json links = json::array();
    for (const auto& l : summary.links) {
        links.push_back({{"link", l.link.label()},
                         {"predicted_coincidence", l.predicted_coincidence},
                         {"predicted_accidental", l.predicted_accidental},
                         {"peak_counts", l.peak_counts},
                         {"measured_rate", l.measured_rate},
                         {"peak_delay_ps", l.peak_delay_ps},
                         {"histogram", histogram_to_json(l.histogram)}});
    }
    return {{"seed", summary.seed}, {"duration_s", summary.duration_s}, {"users", users}, {"links", links}};
}

json to_json(const std::vector<ChannelFidelity>& rows) {
    json out = json::array();
    for (const auto& row : rows) {
        out.push_back({{"channel", row.channel},
                       {"werner_p", row.noise.werner_p},
                       {"phase", row.noise.phase},
                       {"per_basis_total", row.per_basis_total},
                       {"true_fidelity", row.true_fidelity},
                       {"fidelity_mean", row.posterior.fidelity_mean},
                       {"fidelity_std", row.posterior.fidelity_std},
                       {"effective_sample_size", row.posterior.effective_sample_size},
                       {"acceptance_rate", row.posterior.acceptance_rate},
                       {"converged", row.posterior.converged},
                       {"diagnostics", row.posterior.diagnostics}});
    }
    return out;
}

json to_json(const std::vector<FieldIssue>& issues) {
    json out = json::array();
    for (const auto& i : issues) out.push_back({{"pointer", i.pointer}, {"message", i.message}});
    return out;
}

}  // namespace flexent::wire
