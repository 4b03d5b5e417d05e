#pragma once

// JSON codec shared by the scenario loader, session store, CLI and HTTP API.

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "flexent/allocator.hpp"
#include "flexent/errors.hpp"
#include "flexent/scenario.hpp"
#include "flexent/service.hpp"

namespace flexent::wire {

using json = nlohmann::json;

/// Parse text, converting syntax errors to ParseError with line and column.
json parse_text(std::string_view text);

/// Deterministic rendering: sorted keys, two-space indent, trailing newline.
std::string render(const json& j);

std::string child_pointer(const std::string& parent, std::string_view key);
std::string child_pointer(const std::string& parent, std::size_t index);

/// Collects every problem found while reading a document instead of stopping at the first.
class Reader {
public:
    explicit Reader(std::vector<FieldIssue>& issues) : issues_(issues) {}

    void issue(std::string pointer, std::string message) { issues_.push_back({std::move(pointer), std::move(message)}); }

    bool expect_object(const json& j, const std::string& pointer);
    void reject_unknown(const json& obj, const std::string& pointer, std::initializer_list<std::string_view> allowed);

    // Each returns true when the key was present and well-typed; `out` is untouched otherwise.
    bool field(const json& obj, const std::string& pointer, std::string_view key, double& out, bool required = false);
    bool field(const json& obj, const std::string& pointer, std::string_view key, int& out, bool required = false);
    bool field(const json& obj, const std::string& pointer, std::string_view key, std::uint64_t& out,
               bool required = false);
    bool field(const json& obj, const std::string& pointer, std::string_view key, bool& out, bool required = false);
    bool field(const json& obj, const std::string& pointer, std::string_view key, std::string& out,
               bool required = false);

    /// Pointer to the member when present, recording an issue when it is missing and required.
    const json* member(const json& obj, const std::string& pointer, std::string_view key, bool required = false);

    bool link(const json& j, const std::string& pointer, Link& out);

private:
    std::vector<FieldIssue>& issues_;
};

// Domain values. Readers record issues and leave defaults in place on error.
json to_json(const Scenario& s);
Scenario scenario_from_json(const json& j, Reader& r, const std::string& pointer);

json to_json(const Allocation& a);
Allocation allocation_from_json(const json& j, Reader& r, const std::string& pointer);

json to_json(const Objective& o);
Objective objective_from_json(const json& j, Reader& r, const std::string& pointer);

json to_json(const GridPolicy& p);
GridPolicy policy_from_json(const json& j, Reader& r, const std::string& pointer);

json to_json(const NoiseModel& n);
NoiseModel noise_from_json(const json& j, Reader& r, const std::string& pointer);

json to_json(const SamplerConfig& c);
SamplerConfig sampler_from_json(const json& j, Reader& r, const std::string& pointer);

// Results.
json to_json(const RateReport& report);
json to_json(const AllocationPlan& plan);
json to_json(const std::vector<LossRow>& rows);
json to_json(const SimulationSummary& summary);
json to_json(const std::vector<ChannelFidelity>& rows);
json to_json(const std::vector<FieldIssue>& issues);

std::string gating_name(Gating g);
std::string objective_name(ObjectiveKind k);
std::string policy_name(GridPolicyKind k);
std::string sampler_name(SamplerKind k);

}  // namespace flexent::wire
