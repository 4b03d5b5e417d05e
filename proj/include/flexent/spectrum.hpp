#pragma once

#include <span>
#include <string>
#include <vector>

namespace flexent {

struct WssModel;

/// Biphoton spectral density modelled as sinc^2 in detuning from degeneracy.
///
/// Detuning 0 corresponds to half the pump frequency; a signal photon at
/// +d is energy-matched with an idler at -d.
struct BiphotonSpectrum {
    double first_null_detuning_ghz = 320.0;
    double stopband_halfwidth_ghz = 12.0;
    double total_pair_flux = 1.7e6;  // pairs/s into the whole spectrum

    void validate() const;
    bool operator==(const BiphotonSpectrum&) const = default;
};

struct SpectralSlice {
    double lower_ghz = 0.0;
    double upper_ghz = 0.0;

    double width() const { return upper_ghz - lower_ghz; }
    bool operator==(const SpectralSlice&) const = default;
};

/// Energy-matched pair of slices. Index 1 is the innermost channel.
struct Channel {
    int index = 1;
    SpectralSlice signal;  // positive detunings
    SpectralSlice idler;   // mirror image of signal about zero

    bool energy_matched() const;
    bool operator==(const Channel&) const = default;
};

/// Midpoint-rule step used by channel_flux.
inline constexpr double kQuadratureStepGhz = 0.1;

/// Relative density sinc^2(pi d / first_null), 1 at degeneracy.
double spectral_density(const BiphotonSpectrum& spectrum, double detuning_ghz);

/// Contiguous channels outward from the stopband edge.
std::vector<Channel> carve_grid(const BiphotonSpectrum& spectrum, double slice_width_ghz, int channel_count);

/// Integral of the density over [lower, upper], composite midpoint rule with
/// ceil(width / kQuadratureStepGhz) equal panels.
double integrate_density(const BiphotonSpectrum& spectrum, double lower_ghz, double upper_ghz);

/// Pair flux (pairs/s) carried by a channel: the fraction of the positive-detuning
/// density falling in its signal slice, times the total flux.
double channel_flux(const BiphotonSpectrum& spectrum, const Channel& channel);

std::vector<double> channel_fluxes(const BiphotonSpectrum& spectrum, std::span<const Channel> channels);

struct GridViolation {
    int channel_index;
    std::string slice;  // "signal" or "idler"
    std::string message;
};

/// Every resolution/addressability/stopband violation in the grid; empty when ok.
std::vector<GridViolation> validate_grid(std::span<const Channel> channels, const WssModel& wss,
                                         double stopband_halfwidth_ghz = 0.0);

}  // namespace flexent
