#pragma once

// Operations shared by the command-line driver, the HTTP API and the Python
// module, so every surface reports identical numbers.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flexent/allocator.hpp"
#include "flexent/hardware.hpp"
#include "flexent/ratemodel.hpp"
#include "flexent/scenario.hpp"
#include "flexent/timetags.hpp"
#include "flexent/tomography.hpp"

namespace flexent {

/// The scenario's stored allocation, or an empty one.
Allocation scenario_allocation(const Scenario& scenario);

AllocationPlan plan_scenario(const Scenario& scenario, const GridPolicy& policy, const Objective& objective);

/// Throws ConfigError when the allocation references unknown channels or links.
RateReport predict_scenario(const Scenario& scenario, const Allocation& allocation);

struct SimulatedUser {
    std::string name;
    std::size_t events = 0;
    double measured_singles = 0.0;
    double predicted_singles = 0.0;
};

struct SimulatedLink {
    Link link;
    double predicted_coincidence = 0.0;
    double predicted_accidental = 0.0;  // per second in the peak bin
    std::uint64_t peak_counts = 0;
    double measured_rate = 0.0;
    std::int64_t peak_delay_ps = 0;  // where the peak bin is centred
    DelayHistogram histogram;
};

struct SimulationSummary {
    std::uint64_t seed = 0;
    double duration_s = 0.0;
    std::vector<SimulatedUser> users;
    std::vector<SimulatedLink> links;
};

/// Monte Carlo time tags for the allocation, then coincidence counting with
/// the scenario's offsets and window. `tags`, when given, receives the raw stream.
SimulationSummary simulate_scenario(const Scenario& scenario, const Allocation& allocation, double duration_s,
                                    std::uint64_t seed, TimetagStream* tags = nullptr);

std::vector<LossRow> scenario_loss_table(const Scenario& scenario, int n_from, int n_to);

struct TomographyRequest {
    std::uint64_t seed = 0;
    std::optional<std::vector<int>> channels;
    std::optional<Link> probe_link;
    std::optional<NoiseModel> noise;
};

std::vector<ChannelFidelity> tomography_scenario(const Scenario& scenario, const TomographyRequest& request);

}  // namespace flexent
