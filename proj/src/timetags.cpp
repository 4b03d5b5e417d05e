#include "flexent/timetags.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

#include "flexent/errors.hpp"
#include "flexent/ratemodel.hpp"

namespace flexent {

namespace {

constexpr double kFwhmToSigma = 0.42466090014400953;  // 1 / (2 sqrt(2 ln 2))

struct Emitter {
    std::mt19937_64 rng;
    std::int64_t duration_ps;

    std::int64_t uniform_time() {
        std::uniform_real_distribution<double> u(0.0, static_cast<double>(duration_ps));
        return static_cast<std::int64_t>(u(rng));
    }

    long long poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        std::poisson_distribution<long long> d(mean);
        return d(rng);
    }

    void detect(std::vector<std::uint64_t>& sink, std::int64_t t, double sigma_ps) {
        if (sigma_ps > 0.0) {
            std::normal_distribution<double> jitter(0.0, sigma_ps);
            t += static_cast<std::int64_t>(std::llround(jitter(rng)));
        }
        if (t >= 0 && t <= duration_ps) sink.push_back(static_cast<std::uint64_t>(t));
    }
};

void require_sorted(const std::vector<std::uint64_t>& times, const std::string& user) {
    if (!std::is_sorted(times.begin(), times.end())) {
        throw DataError("time tags of user '" + user + "' are not sorted");
    }
}

// Index of the bin that x rounds to, half away from zero.
std::int64_t bin_index(std::int64_t x, std::int64_t w) {
    return x >= 0 ? (2 * x + w) / (2 * w) : -((-2 * x + w) / (2 * w));
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

void put_u64_le(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> bytes{};
    for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xffU);
    out.write(bytes.data(), 8);
}

}  // namespace

std::size_t TimetagStream::event_count() const {
    std::size_t n = 0;
    for (const auto& t : times) n += t.size();
    return n;
}

const std::vector<std::uint64_t>& TimetagStream::of(std::string_view user) const {
    for (std::size_t i = 0; i < users.size(); ++i) {
        if (users[i] == user) return times[i];
    }
    throw ConfigError("stream has no user '" + std::string(user) + "'");
}

TimetagStream simulate_timetags(const Network& network, const Allocation& allocation, double duration_s,
                                std::uint64_t seed) {
    if (!(duration_s > 0.0)) throw DomainError("simulation duration must be positive");
    validate_allocation(network, allocation);

    TimetagStream out;
    out.seed = seed;
    out.duration_ps = static_cast<std::uint64_t>(std::llround(duration_s * 1e12));
    for (const auto& u : network.users) out.users.push_back(u.name);
    out.times.resize(network.users.size());

    Emitter em{std::mt19937_64(seed), static_cast<std::int64_t>(out.duration_ps)};

    for (const auto& [index, link] : allocation.entries()) {
        const double flux = channel_flux(network.spectrum, network.channel(index));
        const auto iu = *network.user_index(link.first());
        const auto iv = *network.user_index(link.second());
        const User& u = network.users[iu];
        const User& v = network.users[iv];
        const double pu = u.detector.efficiency * user_transmission(network, u);
        const double pv = v.detector.efficiency * user_transmission(network, v);
        const double both_gated = gating_factor(u.detector, v.detector, network.gating);

        // Joint outcome of one pair, thinned into three independent Poisson processes.
        const double p_both = pu * pv * both_gated;
        const double p_u_only = pu * u.detector.duty_cycle - p_both;
        const double p_v_only = pv * v.detector.duty_cycle - p_both;
        const double sigma_u = u.detector.jitter_fwhm_ps * kFwhmToSigma;
        const double sigma_v = v.detector.jitter_fwhm_ps * kFwhmToSigma;

        for (long long n = em.poisson(flux * p_both * duration_s); n > 0; --n) {
            const std::int64_t t = em.uniform_time();
            em.detect(out.times[iu], t, sigma_u);
            em.detect(out.times[iv], t, sigma_v);
        }
        for (long long n = em.poisson(flux * p_u_only * duration_s); n > 0; --n) {
            em.detect(out.times[iu], em.uniform_time(), sigma_u);
        }
        for (long long n = em.poisson(flux * p_v_only * duration_s); n > 0; --n) {
            em.detect(out.times[iv], em.uniform_time(), sigma_v);
        }
    }

    for (std::size_t i = 0; i < network.users.size(); ++i) {
        const Detector& d = network.users[i].detector;
        for (long long n = em.poisson(d.dark_rate * d.duty_cycle * duration_s); n > 0; --n) {
            out.times[i].push_back(static_cast<std::uint64_t>(em.uniform_time()));
        }
        std::sort(out.times[i].begin(), out.times[i].end());
    }
    return out;
}

std::uint64_t DelayHistogram::peak_count() const {
    const std::int64_t i = -first_bin;
    if (i < 0 || i >= static_cast<std::int64_t>(counts.size())) return 0;
    return counts[static_cast<std::size_t>(i)];
}

std::size_t DelayHistogram::argmax() const {
    return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

DelayHistogram delay_histogram(std::span<const std::uint64_t> first, std::span<const std::uint64_t> second,
                               std::int64_t shift_ps, std::int64_t center_ps, std::int64_t window_ps,
                               std::int64_t span_ps) {
    if (window_ps <= 0) throw DomainError("coincidence window must be positive");
    if (span_ps < 0) throw DomainError("histogram span must be non-negative");
    if (!std::is_sorted(first.begin(), first.end()) || !std::is_sorted(second.begin(), second.end())) {
        throw DataError("time tags are not sorted");
    }

    DelayHistogram h;
    h.center_ps = center_ps;
    h.bin_width_ps = window_ps;
    h.first_bin = ceil_div(-span_ps - center_ps, window_ps);
    const std::int64_t last_bin = floor_div(span_ps - center_ps, window_ps);
    if (last_bin < h.first_bin) return h;
    h.counts.assign(static_cast<std::size_t>(last_bin - h.first_bin + 1), 0);

    // Second-stream tags within [t1 + lo, t1 + hi] can land in a kept bin.
    const std::int64_t lo = center_ps + h.first_bin * window_ps - window_ps - shift_ps;
    const std::int64_t hi = center_ps + last_bin * window_ps + window_ps - shift_ps;

    std::size_t j = 0;
    for (const std::uint64_t raw1 : first) {
        const auto t1 = static_cast<std::int64_t>(raw1);
        while (j < second.size() && static_cast<std::int64_t>(second[j]) < t1 + lo) ++j;
        for (std::size_t m = j; m < second.size(); ++m) {
            const auto t2 = static_cast<std::int64_t>(second[m]);
            if (t2 > t1 + hi) break;
            const std::int64_t k = bin_index(t2 - t1 + shift_ps - center_ps, window_ps);
            if (k >= h.first_bin && k <= last_bin) ++h.counts[static_cast<std::size_t>(k - h.first_bin)];
        }
    }
    return h;
}

const LinkCoincidences& CoincidenceResult::link(const Link& l) const {
    for (const auto& r : links) {
        if (r.link == l) return r;
    }
    throw ConfigError("no coincidence data for link " + l.label());
}

CoincidenceResult count_coincidences(const TimetagStream& streams, double window_ps,
                                     const std::map<std::string, double>& offsets_ps, double span_ps) {
    if (!(window_ps > 0.0)) throw DomainError("coincidence window must be positive");
    for (std::size_t i = 0; i < streams.users.size(); ++i) require_sorted(streams.times[i], streams.users[i]);

    auto offset_of = [&](const std::string& user) -> std::int64_t {
        const auto it = offsets_ps.find(user);
        return it == offsets_ps.end() ? 0 : static_cast<std::int64_t>(std::llround(it->second));
    };

    CoincidenceResult result;
    result.duration_s = streams.duration_s();

    std::vector<std::pair<Link, std::pair<std::size_t, std::size_t>>> pairs;
    for (std::size_t a = 0; a < streams.users.size(); ++a) {
        for (std::size_t b = a + 1; b < streams.users.size(); ++b) {
            Link link(streams.users[a], streams.users[b]);
            const bool a_first = link.first() == streams.users[a];
            pairs.push_back({std::move(link), a_first ? std::pair{a, b} : std::pair{b, a}});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

    for (const auto& [link, idx] : pairs) {
        const std::int64_t shift = offset_of(link.second()) - offset_of(link.first());
        LinkCoincidences lc;
        lc.link = link;
        lc.histogram = delay_histogram(streams.times[idx.first], streams.times[idx.second], shift, shift,
                                       static_cast<std::int64_t>(std::llround(window_ps)),
                                       static_cast<std::int64_t>(std::llround(span_ps)));
        lc.rate = result.duration_s > 0.0 ? static_cast<double>(lc.histogram.peak_count()) / result.duration_s : 0.0;
        result.links.push_back(std::move(lc));
    }
    return result;
}

void write_timetags_binary(const TimetagStream& stream, std::ostream& out) {
    if (stream.users.size() > 256) throw DataError("binary time-tag format supports at most 256 users");
    using Head = std::pair<std::uint64_t, std::size_t>;  // (time, user), min-heap gives user order on ties
    std::priority_queue<Head, std::vector<Head>, std::greater<>> heap;
    std::vector<std::size_t> pos(stream.times.size(), 0);
    for (std::size_t u = 0; u < stream.times.size(); ++u) {
        if (!stream.times[u].empty()) heap.emplace(stream.times[u][0], u);
    }
    while (!heap.empty()) {
        const auto [t, u] = heap.top();
        heap.pop();
        out.put(static_cast<char>(u));
        put_u64_le(out, t);
        if (++pos[u] < stream.times[u].size()) heap.emplace(stream.times[u][pos[u]], u);
    }
}

TimetagStream read_timetags_binary(std::istream& in, std::vector<std::string> users, std::uint64_t duration_ps) {
    TimetagStream s;
    s.users = std::move(users);
    s.times.resize(s.users.size());
    s.duration_ps = duration_ps;
    std::array<unsigned char, 9> rec{};
    std::size_t record = 0;
    while (in.read(reinterpret_cast<char*>(rec.data()), 9)) {
        const std::size_t id = rec[0];
        if (id >= s.users.size()) {
            throw DataError("record " + std::to_string(record) + " names user id " + std::to_string(id) +
                            " but only " + std::to_string(s.users.size()) + " users are known");
        }
        std::uint64_t t = 0;
        for (int i = 7; i >= 0; --i) t = (t << 8) | rec[static_cast<std::size_t>(i + 1)];
        s.times[id].push_back(t);
        ++record;
    }
    if (in.gcount() != 0) throw DataError("truncated time-tag record at the end of the stream");
    for (std::size_t i = 0; i < s.users.size(); ++i) require_sorted(s.times[i], s.users[i]);
    return s;
}

void write_timetags_text(const TimetagStream& stream, std::ostream& out) {
    out << "# flexent timetags v1\n# users=";
    for (std::size_t i = 0; i < stream.users.size(); ++i) out << (i ? "," : "") << stream.users[i];
    out << "\n# duration_ps=" << stream.duration_ps << "\n# seed=" << stream.seed << "\nuser,time_ps\n";
    for (std::size_t u = 0; u < stream.times.size(); ++u) {
        for (const auto t : stream.times[u]) out << u << ',' << t << '\n';
    }
}

TimetagStream read_timetags_text(std::istream& in) {
    TimetagStream s;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "user,time_ps") continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(2, eq - 2);
            const std::string value = line.substr(eq + 1);
            if (key == "users") {
                std::stringstream ss(value);
                std::string name;
                while (std::getline(ss, name, ',')) s.users.push_back(name);
                s.times.resize(s.users.size());
            } else if (key == "duration_ps") {
                s.duration_ps = std::stoull(value);
            } else if (key == "seed") {
                s.seed = std::stoull(value);
            }
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("expected 'user,time_ps'", line_no, 1);
        std::size_t id = 0;
        std::uint64_t t = 0;
        try {
            id = std::stoul(line.substr(0, comma));
            t = std::stoull(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw ParseError("malformed time-tag record", line_no, 1);
        }
        if (id >= s.times.size()) throw ParseError("user id out of range", line_no, 1);
        s.times[id].push_back(t);
    }
    for (std::size_t i = 0; i < s.users.size(); ++i) require_sorted(s.times[i], s.users[i]);
    return s;
}

void write_histograms_text(const CoincidenceResult& result, std::ostream& out, char delimiter) {
    out << "link" << delimiter << "delay_ps" << delimiter << "count\n";
    for (const auto& lc : result.links) {
        for (std::size_t i = 0; i < lc.histogram.counts.size(); ++i) {
            out << lc.link.label() << delimiter << lc.histogram.bin_center(i) << delimiter << lc.histogram.counts[i]
                << '\n';
        }
    }
}

}  // namespace flexent
