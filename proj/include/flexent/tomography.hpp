#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "flexent/network.hpp"

namespace flexent {

/// Rectilinear (H/V) or diagonal (D/A) analyzer setting, applied to both users.
enum class Basis { HV, DA };

/// Coincidence counts per basis in outcome order (uu, uv, vu, vv), where u is
/// H or D and v is V or A; the first letter is the first user's outcome.
struct CountsRecord {
    std::array<std::uint64_t, 4> hv{};
    std::array<std::uint64_t, 4> da{};
    double integration_s = 1.0;

    const std::array<std::uint64_t, 4>& of(Basis b) const { return b == Basis::HV ? hv : da; }
    std::array<std::uint64_t, 4>& of(Basis b) { return b == Basis::HV ? hv : da; }
    std::uint64_t total(Basis b) const;
    bool operator==(const CountsRecord&) const = default;
};

using Matrix4c = Eigen::Matrix<std::complex<double>, 4, 4>;

/// Two-qubit density matrix in the |HH>, |HV>, |VH>, |VV> basis.
class TwoQubitState {
public:
    static constexpr double kTolerance = 1e-10;

    /// Throws DomainError unless the matrix is Hermitian, PSD and unit-trace within kTolerance.
    explicit TwoQubitState(const Matrix4c& rho);

    static TwoQubitState singlet();
    static TwoQubitState maximally_mixed();
    /// p |psi_phi><psi_phi| + (1 - p) I / 4 with |psi_phi> = (|HV> + e^{i phi} |VH>) / sqrt 2.
    /// phi = pi gives the Werner state around the singlet.
    static TwoQubitState werner(double p, double phase = std::numbers::pi);

    static bool is_valid(const Matrix4c& rho, double tol = kTolerance);

    const Matrix4c& matrix() const { return rho_; }
    /// <Psi-| rho |Psi->
    double singlet_fidelity() const;

private:
    Matrix4c rho_;
};

double singlet_fidelity(const Matrix4c& rho);

std::array<double, 4> outcome_probabilities(const TwoQubitState& state, Basis basis);

/// (N_uv + N_vu - N_uu - N_vv) / total; UndefinedError when the basis has no counts.
double visibility(const CountsRecord& counts, Basis basis);

inline constexpr double kProbabilityFloor = 1e-12;

/// Multinomial log-likelihood over both bases, constants dropped.
double log_likelihood(const TwoQubitState& state, const CountsRecord& counts);

enum class SamplerKind {
    hmc,             // Hamiltonian Monte Carlo on the real and imaginary parts of G
    pcn_metropolis,  // prior-preserving random-walk Metropolis
};

struct SamplerConfig {
    SamplerKind kind = SamplerKind::hmc;
    std::size_t burn_in = 1'000;  // iterations; the step adapts only here
    std::size_t samples = 10'000;  // kept draws
    std::size_t thin = 1;         // iterations per kept draw
    int ancilla_dim = 2;          // columns of G
    int leapfrog_steps = 120;     // hmc: maximum trajectory length; each iteration draws 1..leapfrog_steps
    double initial_step = 0.05;
    double target_acceptance = 0.8;  // 0.8 suits hmc, ~0.25 suits pcn_metropolis
    std::size_t adapt_interval = 50;
    double ess_threshold = 200.0;
    bool keep_states = false;  // copy every kept draw into PosteriorSummary::states

    bool operator==(const SamplerConfig&) const = default;
};

struct PosteriorSummary {
    double fidelity_mean = 0.0;
    double fidelity_std = 0.0;
    std::size_t sample_count = 0;
    double effective_sample_size = 0.0;
    double acceptance_rate = 0.0;
    double final_step = 0.0;
    bool converged = false;
    std::vector<std::string> diagnostics;
    std::vector<Matrix4c> states;  // only with SamplerConfig::keep_states
};

/// Posterior mean fidelity to the singlet.
///
/// Prior: rho = G G^dagger / tr(G G^dagger) with G a 4 x ancilla_dim matrix of
/// i.i.d. standard complex Gaussians. Both samplers move in G. The pCN variant
/// proposes G' = sqrt(1 - s^2) G + s Z, which leaves the prior invariant, so
/// acceptance depends on the likelihood ratio alone. The HMC variant follows
/// leapfrog trajectories of the full log-posterior. In both the step adapts
/// toward target_acceptance during burn-in and is frozen afterwards.
PosteriorSummary bayes_estimate(const CountsRecord& counts, const SamplerConfig& config, std::uint64_t seed);

/// Multinomial draws of per_basis_total events per basis.
CountsRecord synth_counts(const TwoQubitState& state, std::uint64_t per_basis_total, std::uint64_t seed);

struct ChannelNoise {
    double werner_p = 1.0;
    double phase = std::numbers::pi;
    bool operator==(const ChannelNoise&) const = default;
};

struct NoiseModel {
    ChannelNoise fallback;
    std::map<int, ChannelNoise> per_channel;
    /// Fixed counts per basis; when empty, counts follow the predicted
    /// coincidence rate of the channel on the probe link times integration_s.
    std::optional<std::uint64_t> per_basis_total;
    double integration_s = 10.0;

    const ChannelNoise& for_channel(int index) const;
    bool operator==(const NoiseModel&) const = default;
};

struct ChannelFidelity {
    int channel = 0;
    ChannelNoise noise;
    std::uint64_t per_basis_total = 0;
    double true_fidelity = 0.0;
    PosteriorSummary posterior;
};

/// Synthesize and estimate every listed channel as measured on the probe link.
/// Channels run concurrently; each has its own seed derived from `seed`.
std::vector<ChannelFidelity> link_fidelity_scan(const Network& network, std::span<const int> channels,
                                                const Link& probe, const NoiseModel& noise,
                                                const SamplerConfig& config, std::uint64_t seed);

/// Lines of "basis,outcome,count", e.g. "HV,uv,512"; '#' comments and a header are allowed.
CountsRecord read_counts_text(std::istream& in);
void write_counts_text(const CountsRecord& counts, std::ostream& out);

void write_fidelity_table(std::span<const ChannelFidelity> rows, std::ostream& out, char delimiter = ',');

}  // namespace flexent
