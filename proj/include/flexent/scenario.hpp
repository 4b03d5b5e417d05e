#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flexent/allocator.hpp"
#include "flexent/errors.hpp"
#include "flexent/hardware.hpp"
#include "flexent/network.hpp"
#include "flexent/spectrum.hpp"
#include "flexent/tomography.hpp"

namespace flexent {

inline constexpr std::string_view kScenarioFormat = "flexent-scenario/1";

struct GridSpec {
    double slice_width_ghz = 24.0;
    int channel_count = 12;

    bool operator==(const GridSpec&) const = default;
};

struct SimulationSettings {
    double duration_s = 10.0;
    std::uint64_t seed = 1;
    double histogram_span_ps = 60000.0;

    bool operator==(const SimulationSettings&) const = default;
};

struct TomographySettings {
    std::uint64_t seed = 1;
    std::optional<Link> probe_link;  // first candidate link when empty
    std::vector<int> channels;       // every channel when empty
    NoiseModel noise;
    SamplerConfig sampler;

    bool operator==(const TomographySettings&) const = default;
};

/// A complete, self-describing planning problem.
struct Scenario {
    std::string name = "untitled";
    BiphotonSpectrum spectrum;
    GridSpec grid;
    WssModel wss;
    DwdmModel dwdm;
    std::vector<User> users;
    std::vector<Link> links;  // empty means every pair of users
    std::map<std::string, double> offsets_ps;  // electronic delay per user; missing users get 0
    Gating gating = Gating::synchronized;
    double coincidence_window_ps = 1024.0;
    Objective objective;
    GridPolicy policy;
    std::optional<Allocation> allocation;
    SimulationSettings simulation;
    TomographySettings tomography;

    /// Network with the grid carved and candidate links resolved.
    Network network() const;
    Link probe_link() const;
    std::vector<int> tomography_channels() const;

    bool operator==(const Scenario&) const = default;
};

/// Every semantic problem, each tagged with the JSON pointer of its field.
std::vector<FieldIssue> scenario_issues(const Scenario& scenario);

/// Throws ValidationError listing all issues.
void validate_scenario(const Scenario& scenario);

/// Four-user testbed: two free-running SNSPD receivers (Alice, Bob) and two
/// gated InGaAs receivers (Charlie, Dave), twelve 24 GHz channels.
Scenario paper_default_scenario();

/// Throws ParseError for malformed text and ValidationError for bad fields.
Scenario parse_scenario(std::string_view text);
std::string format_scenario(const Scenario& scenario);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Directory holding the bundled scenario files of the source tree.
std::filesystem::path bundled_scenario_dir();

/// User names are 1-32 characters from [A-Za-z0-9_].
bool valid_user_name(std::string_view name);

}  // namespace flexent
