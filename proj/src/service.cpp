#include "flexent/service.hpp"

#include "flexent/errors.hpp"

namespace flexent {

Allocation scenario_allocation(const Scenario& scenario) { return scenario.allocation.value_or(Allocation{}); }

AllocationPlan plan_scenario(const Scenario& scenario, const GridPolicy& policy, const Objective& objective) {
    return plan(scenario.network(), policy, objective);
}

RateReport predict_scenario(const Scenario& scenario, const Allocation& allocation) {
    const Network network = scenario.network();
    validate_allocation(network, allocation);
    return predict_report(network, allocation);
}

SimulationSummary simulate_scenario(const Scenario& scenario, const Allocation& allocation, double duration_s,
                                    std::uint64_t seed, TimetagStream* tags) {
    if (!(duration_s > 0.0)) throw DomainError("simulation duration must be positive");
    const Network network = scenario.network();
    validate_allocation(network, allocation);
    const RateReport predicted = predict_report(network, allocation);
    TimetagStream stream = simulate_timetags(network, allocation, duration_s, seed);
    const CoincidenceResult counted = count_coincidences(stream, network.coincidence_window_ps, scenario.offsets_ps,
                                                         scenario.simulation.histogram_span_ps);

    SimulationSummary out;
    out.seed = seed;
    out.duration_s = stream.duration_s();
    for (std::size_t i = 0; i < stream.users.size(); ++i) {
        SimulatedUser u;
        u.name = stream.users[i];
        u.events = stream.times[i].size();
        u.measured_singles = static_cast<double>(u.events) / out.duration_s;
        u.predicted_singles = predicted.user(u.name).singles;
        out.users.push_back(std::move(u));
    }
    for (const auto& lc : counted.links) {
        SimulatedLink l;
        l.link = lc.link;
        const LinkRates& p = predicted.link(lc.link);
        l.predicted_coincidence = p.coincidence;
        l.predicted_accidental = p.accidental;
        l.peak_counts = lc.histogram.peak_count();
        l.measured_rate = lc.rate;
        l.peak_delay_ps = lc.histogram.center_ps;
        l.histogram = lc.histogram;
        out.links.push_back(std::move(l));
    }
    if (tags) *tags = std::move(stream);
    return out;
}

std::vector<LossRow> scenario_loss_table(const Scenario& scenario, int n_from, int n_to) {
    return loss_table(scenario.wss, scenario.dwdm, n_from, n_to);
}

std::vector<ChannelFidelity> tomography_scenario(const Scenario& scenario, const TomographyRequest& request) {
    const Network network = scenario.network();
    const std::vector<int> channels = request.channels.value_or(scenario.tomography_channels());
    for (int c : channels) {
        if (!network.has_channel(c)) throw ConfigError("unknown channel " + std::to_string(c));
    }
    const Link probe = request.probe_link.value_or(scenario.probe_link());
    if (!network.link_index(probe)) throw ConfigError("probe link " + probe.label() + " is not a candidate link");
    const NoiseModel noise = request.noise.value_or(scenario.tomography.noise);
    return link_fidelity_scan(network, channels, probe, noise, scenario.tomography.sampler, request.seed);
}

}  // namespace flexent
