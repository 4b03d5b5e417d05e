#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "flexent/network.hpp"

namespace flexent {

/// Detection times per user, in integer picoseconds, each list sorted.
struct TimetagStream {
    std::vector<std::string> users;
    std::vector<std::vector<std::uint64_t>> times;  // parallel to users
    std::uint64_t duration_ps = 0;
    std::uint64_t seed = 0;

    double duration_s() const { return static_cast<double>(duration_ps) * 1e-12; }
    std::size_t event_count() const;
    const std::vector<std::uint64_t>& of(std::string_view user) const;
    bool operator==(const TimetagStream&) const = default;
};

/// Monte Carlo detection record for an allocation.
///
/// Pair emission on every assigned channel is a homogeneous Poisson process.
/// Each photon is detected with probability eta * T while its detector is
/// gated; with synchronized gating both partners see the same gate phase.
/// Detections get Gaussian timing jitter; dark counts are independent Poisson
/// processes at dark_rate * duty. Output depends only on the inputs and seed.
TimetagStream simulate_timetags(const Network& network, const Allocation& allocation, double duration_s,
                                std::uint64_t seed);

/// Difference histogram between two sorted streams.
///
/// Delay of a pair is (t_second - t_first + shift). Bin k is centred on
/// center + k * width and collects delays that round (half away from zero) to
/// it; only bins whose centre lies within [-span, span] are kept.
struct DelayHistogram {
    std::int64_t center_ps = 0;
    std::int64_t bin_width_ps = 0;
    std::int64_t first_bin = 0;  // k of counts[0]
    std::vector<std::uint64_t> counts;

    std::int64_t bin_center(std::size_t i) const {
        return center_ps + (first_bin + static_cast<std::int64_t>(i)) * bin_width_ps;
    }
    /// Count in bin k = 0 (the bin centred on `center`), or 0 if it is outside the span.
    std::uint64_t peak_count() const;
    std::size_t argmax() const;
};

DelayHistogram delay_histogram(std::span<const std::uint64_t> first, std::span<const std::uint64_t> second,
                               std::int64_t shift_ps, std::int64_t center_ps, std::int64_t window_ps,
                               std::int64_t span_ps);

struct LinkCoincidences {
    Link link;
    DelayHistogram histogram;
    double rate = 0.0;  // peak-bin counts per second
};

struct CoincidenceResult {
    std::vector<LinkCoincidences> links;
    double duration_s = 0.0;

    const LinkCoincidences& link(const Link& l) const;
};

inline constexpr double kDefaultHistogramSpanPs = 60000.0;

/// Per-link histograms with electronic offsets added to each user's tags.
/// For link (u, v) the peak sits at offset_v - offset_u. Throws DataError when
/// a stream is not time-sorted.
CoincidenceResult count_coincidences(const TimetagStream& streams, double window_ps,
                                     const std::map<std::string, double>& offsets_ps,
                                     double span_ps = kDefaultHistogramSpanPs);

// Binary records: 1-byte user id then 8-byte little-endian picoseconds, in time order.
void write_timetags_binary(const TimetagStream& stream, std::ostream& out);
TimetagStream read_timetags_binary(std::istream& in, std::vector<std::string> users, std::uint64_t duration_ps);

void write_timetags_text(const TimetagStream& stream, std::ostream& out);
TimetagStream read_timetags_text(std::istream& in);

void write_histograms_text(const CoincidenceResult& result, std::ostream& out, char delimiter = ',');

}  // namespace flexent
