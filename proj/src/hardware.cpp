#include "flexent/hardware.hpp"

#include <cmath>
#include <string>

#include "flexent/errors.hpp"

namespace flexent {

namespace {

void require_users(int n_users) {
    if (n_users < 2) {
        throw DomainError("at least two users are needed for a two-party link, got " + std::to_string(n_users));
    }
}

}  // namespace

void Detector::validate() const {
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw ConstraintError("detector efficiency must lie in [0, 1]");
    if (!(duty_cycle > 0.0 && duty_cycle <= 1.0)) throw ConstraintError("detector duty cycle must lie in (0, 1]");
    if (!(dark_rate >= 0.0)) throw ConstraintError("detector dark rate must be non-negative");
    if (!(jitter_fwhm_ps >= 0.0)) throw ConstraintError("detector jitter must be non-negative");
}

void WssModel::validate() const {
    if (port_count < 1) throw ConstraintError("WSS needs at least one port");
    if (!(insertion_loss_db >= 0.0)) throw ConstraintError("WSS insertion loss must be non-negative");
    if (!(addressability_ghz > 0.0)) throw ConstraintError("WSS addressability must be positive");
    if (!(resolution_ghz >= addressability_ghz)) throw ConstraintError("WSS resolution must be >= addressability");
    if (!(total_bandwidth_ghz > 0.0)) throw ConstraintError("WSS bandwidth must be positive");
}

void DwdmModel::validate() const {
    if (!(reflection_loss_db >= 0.0) || !(transmission_loss_db >= 0.0)) {
        throw ConstraintError("DWDM filter losses must be non-negative");
    }
}

long long dwdm_filter_count(int n_users) {
    require_users(n_users);
    const long long n = n_users;
    return 2 * n * n - 3 * n;
}

double dwdm_worst_loss(const DwdmModel& model, int n_users) {
    require_users(n_users);
    const double n = n_users;
    return (n * n - n) * model.reflection_loss_db + model.transmission_loss_db;
}

double dwdm_best_loss(const DwdmModel& model, int n_users) {
    require_users(n_users);
    switch (model.best_case) {
        case DwdmBestCase::two_transmissions:
            return 2.0 * model.transmission_loss_db;
        case DwdmBestCase::reflection_and_transmission:
            return model.reflection_loss_db + model.transmission_loss_db;
    }
    return 2.0 * model.transmission_loss_db;
}

int crossover_users(const WssModel& wss, const DwdmModel& dwdm) {
    if (!(dwdm.reflection_loss_db > 0.0)) {
        throw DomainError("crossover undefined: DWDM worst-case loss does not grow when reflection loss is 0");
    }
    // Worst-case loss grows without bound, so the scan terminates.
    int n = 2;
    while (dwdm_worst_loss(dwdm, n) <= wss.insertion_loss_db) ++n;
    return n;
}

int fully_connected_capacity(const WssModel& wss, double slice_width_ghz) {
    if (!(slice_width_ghz >= wss.resolution_ghz)) {
        throw ConstraintError("slice width " + std::to_string(slice_width_ghz) + " GHz is below the WSS resolution of " +
                              std::to_string(wss.resolution_ghz) + " GHz");
    }
    int best = 0;
    for (int n = 1; n <= wss.port_count; ++n) {
        const double needed = static_cast<double>(n) * (n - 1) * slice_width_ghz;
        if (needed > wss.total_bandwidth_ghz) break;
        best = n;
    }
    return best;
}

std::vector<LossRow> loss_table(const WssModel& wss, const DwdmModel& dwdm, int n_from, int n_to) {
    if (n_from > n_to) throw DomainError("empty user range");
    require_users(n_from);
    std::vector<LossRow> rows;
    rows.reserve(static_cast<std::size_t>(n_to - n_from + 1));
    for (int n = n_from; n <= n_to; ++n) {
        rows.push_back({n, wss.insertion_loss_db, dwdm_best_loss(dwdm, n), dwdm_worst_loss(dwdm, n)});
    }
    return rows;
}

double db_to_transmission(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }

}  // namespace flexent
