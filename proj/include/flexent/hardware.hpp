#pragma once

#include <vector>

namespace flexent {

struct Detector {
    double efficiency = 1.0;     // [0, 1]
    double duty_cycle = 1.0;     // (0, 1]; 1 for free-running detectors
    double dark_rate = 0.0;      // counts/s while armed
    double jitter_fwhm_ps = 0.0;

    void validate() const;
    bool operator==(const Detector&) const = default;
};

struct WssModel {
    int port_count = 4;
    double insertion_loss_db = 4.5;
    double resolution_ghz = 20.0;
    double addressability_ghz = 4.0;
    double total_bandwidth_ghz = 9600.0;

    void validate() const;
    bool operator==(const WssModel&) const = default;
};

enum class DwdmBestCase {
    two_transmissions,
    reflection_and_transmission,
};

struct DwdmModel {
    double reflection_loss_db = 0.25;
    double transmission_loss_db = 0.6;
    DwdmBestCase best_case = DwdmBestCase::two_transmissions;

    void validate() const;
    bool operator==(const DwdmModel&) const = default;
};

/// Filters in a fully connected nested DWDM tree: 2n^2 - 3n.
long long dwdm_filter_count(int n_users);

/// (n^2 - n) reflections followed by one transmission.
double dwdm_worst_loss(const DwdmModel& model, int n_users);

/// Shortest path through the tree: two filters, counted per DwdmModel::best_case.
double dwdm_best_loss(const DwdmModel& model, int n_users);

/// Smallest n >= 2 whose worst DWDM path is lossier than the WSS.
int crossover_users(const WssModel& wss, const DwdmModel& dwdm);

/// Largest n with n(n-1) slices fitting the WSS bandwidth and n <= port count.
int fully_connected_capacity(const WssModel& wss, double slice_width_ghz);

struct LossRow {
    int n_users;
    double wss_loss_db;
    double dwdm_best_db;
    double dwdm_worst_db;
};

std::vector<LossRow> loss_table(const WssModel& wss, const DwdmModel& dwdm, int n_from, int n_to);

/// Power transmission for a loss in dB.
double db_to_transmission(double loss_db);

}  // namespace flexent
