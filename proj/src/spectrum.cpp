#include "flexent/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "flexent/errors.hpp"
#include "flexent/hardware.hpp"

namespace flexent {

namespace {

bool on_grid(double boundary, double addressability) {
    const double steps = boundary / addressability;
    return std::abs(steps - std::round(steps)) <= 1e-9 * std::max(1.0, std::abs(steps));
}

}  // namespace

void BiphotonSpectrum::validate() const {
    if (!(first_null_detuning_ghz > 0.0)) throw ConstraintError("first null detuning must be positive");
    if (!(stopband_halfwidth_ghz >= 0.0)) throw ConstraintError("stopband half-width must be non-negative");
    if (!(total_pair_flux >= 0.0)) throw ConstraintError("total pair flux must be non-negative");
}

bool Channel::energy_matched() const {
    return idler.lower_ghz == -signal.upper_ghz && idler.upper_ghz == -signal.lower_ghz &&
           signal.lower_ghz < signal.upper_ghz && signal.lower_ghz >= 0.0;
}

double spectral_density(const BiphotonSpectrum& spectrum, double detuning_ghz) {
    const double x = std::numbers::pi * detuning_ghz / spectrum.first_null_detuning_ghz;
    if (x == 0.0) return 1.0;
    const double sinc = std::sin(x) / x;
    return sinc * sinc;
}

std::vector<Channel> carve_grid(const BiphotonSpectrum& spectrum, double slice_width_ghz, int channel_count) {
    if (!(slice_width_ghz > 0.0)) throw ConstraintError("slice width must be positive");
    if (channel_count < 1) throw ConstraintError("channel count must be at least 1");
    std::vector<Channel> channels;
    channels.reserve(static_cast<std::size_t>(channel_count));
    for (int i = 1; i <= channel_count; ++i) {
        const double lower = spectrum.stopband_halfwidth_ghz + (i - 1) * slice_width_ghz;
        const double upper = spectrum.stopband_halfwidth_ghz + i * slice_width_ghz;
        channels.push_back({i, {lower, upper}, {-upper, -lower}});
    }
    return channels;
}

double integrate_density(const BiphotonSpectrum& spectrum, double lower_ghz, double upper_ghz) {
    const double width = upper_ghz - lower_ghz;
    if (!(width > 0.0)) return 0.0;
    const auto panels = static_cast<long long>(std::ceil(width / kQuadratureStepGhz - 1e-9));
    const double h = width / static_cast<double>(panels);
    double sum = 0.0;
    for (long long k = 0; k < panels; ++k) {
        sum += spectral_density(spectrum, lower_ghz + (static_cast<double>(k) + 0.5) * h);
    }
    return sum * h;
}

double channel_flux(const BiphotonSpectrum& spectrum, const Channel& channel) {
    // Integral of sinc^2(pi x / a) over x >= 0 is a / 2.
    const double normalization = spectrum.first_null_detuning_ghz / 2.0;
    return spectrum.total_pair_flux *
           integrate_density(spectrum, channel.signal.lower_ghz, channel.signal.upper_ghz) / normalization;
}

std::vector<double> channel_fluxes(const BiphotonSpectrum& spectrum, std::span<const Channel> channels) {
    std::vector<double> out;
    out.reserve(channels.size());
    for (const auto& c : channels) out.push_back(channel_flux(spectrum, c));
    return out;
}

std::vector<GridViolation> validate_grid(std::span<const Channel> channels, const WssModel& wss,
                                         double stopband_halfwidth_ghz) {
    std::vector<GridViolation> out;
    auto check_slice = [&](int index, const char* name, const SpectralSlice& s) {
        if (!(s.width() >= wss.resolution_ghz)) {
            out.push_back({index, name,
                           "width " + std::to_string(s.width()) + " GHz below WSS resolution " +
                               std::to_string(wss.resolution_ghz) + " GHz"});
        }
        for (double edge : {s.lower_ghz, s.upper_ghz}) {
            if (!on_grid(edge, wss.addressability_ghz)) {
                out.push_back({index, name,
                               "boundary " + std::to_string(edge) + " GHz is not a multiple of the " +
                                   std::to_string(wss.addressability_ghz) + " GHz addressability"});
            }
        }
        if (s.lower_ghz < stopband_halfwidth_ghz && s.upper_ghz > -stopband_halfwidth_ghz) {
            out.push_back({index, name, "slice overlaps the stopband"});
        }
    };
    for (const auto& c : channels) {
        if (!c.energy_matched()) out.push_back({c.index, "idler", "idler is not the mirror image of the signal"});
        check_slice(c.index, "signal", c.signal);
        check_slice(c.index, "idler", c.idler);
    }
    return out;
}

}  // namespace flexent
