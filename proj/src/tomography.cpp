#include "flexent/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "flexent/errors.hpp"
#include "flexent/ratemodel.hpp"

namespace flexent {

namespace {

using cd = std::complex<double>;
using Vec4c = Eigen::Matrix<cd, 4, 1>;
using MatG = Eigen::Matrix<cd, 4, Eigen::Dynamic>;

constexpr std::array<const char*, 4> kOutcomeNames{"uu", "uv", "vu", "vv"};

// Product states |a b> for the four outcomes of a basis.
std::array<Vec4c, 4> outcome_vectors(Basis basis) {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Vector2cd u;
    Eigen::Vector2cd v;
    if (basis == Basis::HV) {
        u << 1.0, 0.0;
        v << 0.0, 1.0;
    } else {
        u << r, r;
        v << r, -r;
    }
    auto kron = [](const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
        Vec4c out;
        out << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
        return out;
    };
    return {kron(u, u), kron(u, v), kron(v, u), kron(v, v)};
}

const std::array<std::array<Vec4c, 4>, 2>& all_outcome_vectors() {
    static const std::array<std::array<Vec4c, 4>, 2> vecs{outcome_vectors(Basis::HV), outcome_vectors(Basis::DA)};
    return vecs;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Log-likelihood of the state G G^dagger / tr without forming rho.
double log_likelihood_g(const MatG& g, const CountsRecord& counts) {
    const double trace = g.squaredNorm();
    double ll = 0.0;
    const auto& vecs = all_outcome_vectors();
    for (int b = 0; b < 2; ++b) {
        const auto& n = b == 0 ? counts.hv : counts.da;
        for (std::size_t k = 0; k < 4; ++k) {
            if (n[k] == 0) continue;
            const double p = (g.adjoint() * vecs[static_cast<std::size_t>(b)][k]).squaredNorm() / trace;
            ll += static_cast<double>(n[k]) * std::log(std::max(p, kProbabilityFloor));
        }
    }
    return ll;
}

double fidelity_g(const MatG& g) {
    Vec4c singlet = Vec4c::Zero();
    singlet(1) = 1.0 / std::sqrt(2.0);
    singlet(2) = -1.0 / std::sqrt(2.0);
    return (g.adjoint() * singlet).squaredNorm() / g.squaredNorm();
}

MatG gaussian_matrix(std::mt19937_64& rng, int cols) {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    MatG g(4, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < 4; ++i) g(i, j) = cd(n(rng), n(rng));
    }
    return g;
}

// Initial positive sequence estimate of the effective sample size.
double effective_sample_size(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 4) return static_cast<double>(n);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    auto autocov = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - mean) * (x[i + lag] - mean);
        return s / static_cast<double>(n);
    };
    const double c0 = autocov(0);
    if (c0 <= 0.0) return static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
        const double pair = (autocov(2 * k) + autocov(2 * k + 1)) / c0;
        if (pair <= 0.0) break;
        sum += pair;
    }
    const double tau = std::max(1.0, 2.0 * sum - 1.0);
    return static_cast<double>(n) / tau;
}

Basis parse_basis(const std::string& s, std::size_t line) {
    if (s == "HV") return Basis::HV;
    if (s == "DA") return Basis::DA;
    throw ParseError("unknown basis '" + s + "' (expected HV or DA)", line, 1);
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

std::uint64_t CountsRecord::total(Basis b) const {
    const auto& n = of(b);
    return n[0] + n[1] + n[2] + n[3];
}

bool TwoQubitState::is_valid(const Matrix4c& rho, double tol) {
    if (!rho.allFinite()) return false;
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    if (std::abs(rho.trace() - cd(1.0, 0.0)) > tol) return false;
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

TwoQubitState::TwoQubitState(const Matrix4c& rho) : rho_(rho) {
    if (!is_valid(rho)) throw DomainError("matrix is not a density matrix (Hermitian, PSD, unit trace)");
}

TwoQubitState TwoQubitState::singlet() { return werner(1.0); }

TwoQubitState TwoQubitState::maximally_mixed() { return TwoQubitState(Matrix4c::Identity() / 4.0); }

TwoQubitState TwoQubitState::werner(double p, double phase) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("Werner mixing parameter must lie in [0, 1]");
    Vec4c psi = Vec4c::Zero();
    psi(1) = 1.0 / std::sqrt(2.0);
    psi(2) = std::polar(1.0 / std::sqrt(2.0), phase);
    Matrix4c rho = p * (psi * psi.adjoint()) + (1.0 - p) / 4.0 * Matrix4c::Identity();
    return TwoQubitState(rho);
}

double singlet_fidelity(const Matrix4c& rho) {
    return 0.5 * (rho(1, 1).real() + rho(2, 2).real() - rho(1, 2).real() - rho(2, 1).real());
}

double TwoQubitState::singlet_fidelity() const { return flexent::singlet_fidelity(rho_); }

std::array<double, 4> outcome_probabilities(const TwoQubitState& state, Basis basis) {
    const auto& vecs = all_outcome_vectors()[basis == Basis::HV ? 0 : 1];
    std::array<double, 4> p{};
    for (std::size_t k = 0; k < 4; ++k) {
        p[k] = std::max(0.0, (vecs[k].adjoint() * state.matrix() * vecs[k])(0, 0).real());
    }
    return p;
}

double visibility(const CountsRecord& counts, Basis basis) {
    const auto& n = counts.of(basis);
    const std::uint64_t total = counts.total(basis);
    if (total == 0) throw UndefinedError("visibility undefined: no counts in basis");
    const double anti = static_cast<double>(n[1] + n[2]);
    const double corr = static_cast<double>(n[0] + n[3]);
    return (anti - corr) / static_cast<double>(total);
}

double log_likelihood(const TwoQubitState& state, const CountsRecord& counts) {
    double ll = 0.0;
    for (Basis b : {Basis::HV, Basis::DA}) {
        const auto p = outcome_probabilities(state, b);
        const auto& n = counts.of(b);
        for (std::size_t k = 0; k < 4; ++k) {
            if (n[k] > 0) ll += static_cast<double>(n[k]) * std::log(std::max(p[k], kProbabilityFloor));
        }
    }
    return ll;
}

namespace {

// Negative log-posterior in G (prior exp(-|G|^2)) and its gradient, returned
// as dU/dRe G + i dU/dIm G.
struct Posterior {
    const CountsRecord& counts;

    double energy(const MatG& g) const { return g.squaredNorm() - log_likelihood_g(g, counts); }

    MatG gradient(const MatG& g) const {
        const double trace = g.squaredNorm();
        const auto& vecs = all_outcome_vectors();
        MatG d = g;  // prior term
        double total = 0.0;
        for (int b = 0; b < 2; ++b) {
            const auto& n = b == 0 ? counts.hv : counts.da;
            for (std::size_t k = 0; k < 4; ++k) {
                if (n[k] == 0) continue;
                const Vec4c& v = vecs[static_cast<std::size_t>(b)][k];
                const Eigen::Matrix<cd, 1, Eigen::Dynamic> w = v.adjoint() * g;  // (G^dagger v)^dagger
                const double norm = std::max(w.squaredNorm(), kProbabilityFloor * trace);
                d -= (static_cast<double>(n[k]) / norm) * (v * w);
                total += static_cast<double>(n[k]);
            }
        }
        d += (total / trace) * g;
        return 2.0 * d;
    }
};

void adapt(double& step, std::size_t& accepts, std::size_t& steps, const SamplerConfig& config, double max_step) {
    if (steps < config.adapt_interval) return;
    const double rate = static_cast<double>(accepts) / static_cast<double>(steps);
    step *= std::exp(std::clamp(rate - config.target_acceptance, -0.5, 0.5) * 2.0);
    step = std::clamp(step, 1e-6, max_step);
    accepts = 0;
    steps = 0;
}

}  // namespace

PosteriorSummary bayes_estimate(const CountsRecord& counts, const SamplerConfig& config, std::uint64_t seed) {
    if (config.ancilla_dim < 1) throw DomainError("ancilla dimension must be at least 1");
    if (config.samples == 0 || config.thin == 0) throw DomainError("sampler needs samples > 0 and thin > 0");
    if (config.kind == SamplerKind::hmc && config.leapfrog_steps < 1) throw DomainError("hmc needs leapfrog_steps >= 1");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Posterior post{counts};
    const int cols = config.ancilla_dim;
    MatG g = gaussian_matrix(rng, cols);
    const double max_step = config.kind == SamplerKind::pcn_metropolis ? 1.0 : 10.0;
    double step = std::clamp(config.initial_step, 1e-6, max_step);

    double ll = log_likelihood_g(g, counts);
    double energy = post.energy(g);
    MatG grad = post.gradient(g);

    auto pcn_step = [&]() -> bool {
        const MatG z = gaussian_matrix(rng, cols);
        const MatG proposal = std::sqrt(1.0 - step * step) * g + step * z;
        const double ll_new = log_likelihood_g(proposal, counts);
        if (std::log(unif(rng)) < ll_new - ll) {
            g = proposal;
            ll = ll_new;
            return true;
        }
        return false;
    };

    // Momentum components are standard normal in each real coordinate.
    std::normal_distribution<double> normal(0.0, 1.0);
    auto hmc_step = [&]() -> bool {
        MatG p(4, cols);
        for (int j = 0; j < cols; ++j) {
            for (int i = 0; i < 4; ++i) p(i, j) = cd(normal(rng), normal(rng));
        }
        const int length = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(config.leapfrog_steps));
        const double h0 = energy + 0.5 * p.squaredNorm();
        MatG q = g;
        MatG dq = grad;
        for (int s = 0; s < length; ++s) {
            p -= 0.5 * step * dq;
            q += step * p;
            dq = post.gradient(q);
            p -= 0.5 * step * dq;
        }
        const double e1 = post.energy(q);
        const double h1 = e1 + 0.5 * p.squaredNorm();
        if (std::isfinite(h1) && std::log(unif(rng)) < h0 - h1) {
            g = q;
            energy = e1;
            grad = dq;
            return true;
        }
        return false;
    };

    auto advance = [&]() { return config.kind == SamplerKind::hmc ? hmc_step() : pcn_step(); };

    std::size_t window_accepts = 0;
    std::size_t window_steps = 0;
    for (std::size_t i = 0; i < config.burn_in; ++i) {
        window_accepts += advance() ? 1 : 0;
        ++window_steps;
        adapt(step, window_accepts, window_steps, config, max_step);
    }

    PosteriorSummary out;
    std::vector<double> draws;
    draws.reserve(config.samples);
    std::size_t accepts = 0;
    const std::size_t total_steps = config.samples * config.thin;
    for (std::size_t i = 1; i <= total_steps; ++i) {
        accepts += advance() ? 1 : 0;
        if (i % config.thin != 0) continue;
        draws.push_back(fidelity_g(g));
        if (config.keep_states) out.states.push_back(g * g.adjoint() / g.squaredNorm());
    }

    out.sample_count = draws.size();
    double mean = 0.0;
    for (double f : draws) mean += f;
    mean /= static_cast<double>(draws.size());
    double var = 0.0;
    for (double f : draws) var += (f - mean) * (f - mean);
    var /= static_cast<double>(std::max<std::size_t>(1, draws.size() - 1));
    out.fidelity_mean = std::clamp(mean, 0.0, 1.0);
    out.fidelity_std = std::sqrt(var);
    out.effective_sample_size = effective_sample_size(draws);
    out.acceptance_rate = static_cast<double>(accepts) / static_cast<double>(total_steps);
    out.final_step = step;
    out.converged = out.effective_sample_size >= config.ess_threshold;
    if (!out.converged) {
        out.diagnostics.push_back("effective sample size " + std::to_string(out.effective_sample_size) +
                                  " below threshold " + std::to_string(config.ess_threshold));
    }
    if (out.acceptance_rate < 0.02) out.diagnostics.push_back("acceptance rate below 2%");
    return out;
}

CountsRecord synth_counts(const TwoQubitState& state, std::uint64_t per_basis_total, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    CountsRecord rec;
    for (Basis b : {Basis::HV, Basis::DA}) {
        const auto p = outcome_probabilities(state, b);
        auto& n = rec.of(b);
        std::uint64_t left = per_basis_total;
        double mass = 1.0;
        for (std::size_t k = 0; k < 3; ++k) {
            const double q = mass > 0.0 ? std::clamp(p[k] / mass, 0.0, 1.0) : 0.0;
            std::binomial_distribution<std::uint64_t> bin(left, q);
            n[k] = left > 0 ? bin(rng) : 0;
            left -= n[k];
            mass -= p[k];
        }
        n[3] = left;
    }
    return rec;
}

const ChannelNoise& NoiseModel::for_channel(int index) const {
    const auto it = per_channel.find(index);
    return it == per_channel.end() ? fallback : it->second;
}

std::vector<ChannelFidelity> link_fidelity_scan(const Network& network, std::span<const int> channels,
                                                const Link& probe, const NoiseModel& noise,
                                                const SamplerConfig& config, std::uint64_t seed) {
    const double gain = link_gain(network, probe);
    std::vector<std::future<ChannelFidelity>> jobs;
    for (int index : channels) {
        ChannelFidelity row;
        row.channel = index;
        row.noise = noise.for_channel(index);
        if (noise.per_basis_total) {
            row.per_basis_total = *noise.per_basis_total;
        } else {
            const double rate = channel_flux(network.spectrum, network.channel(index)) * gain;
            row.per_basis_total = static_cast<std::uint64_t>(std::llround(rate * noise.integration_s));
        }
        const std::uint64_t channel_seed = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index)));
        jobs.push_back(std::async(std::launch::async, [row, channel_seed, &config]() mutable {
            const TwoQubitState state = TwoQubitState::werner(row.noise.werner_p, row.noise.phase);
            row.true_fidelity = state.singlet_fidelity();
            const CountsRecord counts = synth_counts(state, row.per_basis_total, channel_seed);
            row.posterior = bayes_estimate(counts, config, splitmix64(channel_seed));
            return row;
        }));
    }
    std::vector<ChannelFidelity> out;
    out.reserve(jobs.size());
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

CountsRecord read_counts_text(std::istream& in) {
    CountsRecord rec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line == "basis,outcome,count") continue;
        std::stringstream ss(line);
        std::string basis, outcome, count;
        if (!std::getline(ss, basis, ',') || !std::getline(ss, outcome, ',') || !std::getline(ss, count)) {
            throw ParseError("expected 'basis,outcome,count'", line_no, 1);
        }
        const Basis b = parse_basis(trim(basis), line_no);
        outcome = trim(outcome);
        const auto it = std::find(kOutcomeNames.begin(), kOutcomeNames.end(), outcome);
        if (it == kOutcomeNames.end()) throw ParseError("unknown outcome '" + outcome + "'", line_no, basis.size() + 2);
        count = trim(count);
        if (count.empty() || count.find_first_not_of("0123456789") != std::string::npos) {
            throw ParseError("count must be a non-negative integer", line_no, basis.size() + outcome.size() + 3);
        }
        rec.of(b)[static_cast<std::size_t>(it - kOutcomeNames.begin())] = std::stoull(count);
    }
    return rec;
}

void write_counts_text(const CountsRecord& counts, std::ostream& out) {
    out << "basis,outcome,count\n";
    for (Basis b : {Basis::HV, Basis::DA}) {
        for (std::size_t k = 0; k < 4; ++k) {
            out << (b == Basis::HV ? "HV" : "DA") << ',' << kOutcomeNames[k] << ',' << counts.of(b)[k] << '\n';
        }
    }
}

void write_fidelity_table(std::span<const ChannelFidelity> rows, std::ostream& out, char delimiter) {
    const char d = delimiter;
    out << "channel" << d << "werner_p" << d << "counts_per_basis" << d << "true_fidelity" << d << "fidelity_mean" << d
        << "fidelity_std" << d << "ess" << d << "converged\n";
    for (const auto& r : rows) {
        out << r.channel << d << r.noise.werner_p << d << r.per_basis_total << d << r.true_fidelity << d
            << r.posterior.fidelity_mean << d << r.posterior.fidelity_std << d << r.posterior.effective_sample_size << d
            << (r.posterior.converged ? "yes" : "no") << '\n';
    }
}

}  // namespace flexent
