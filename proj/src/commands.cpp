#include "flexent/commands.hpp"

#include <charconv>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "flexent/api.hpp"
#include "flexent/service.hpp"
#include "flexent/session.hpp"
#include "wire.hpp"

namespace flexent {

namespace {

using wire::json;

struct UsageError : Error {
    using Error::Error;
};

int parse_int(const std::string& s, const std::string& what) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw UsageError("bad " + what + " '" + s + "'");
    return v;
}

// "2..16" -> {2, 16}
std::pair<int, int> parse_range(const std::string& s) {
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        const int v = parse_int(s, "range");
        return {v, v};
    }
    return {parse_int(s.substr(0, dots), "range"), parse_int(s.substr(dots + 2), "range")};
}

// "1..4,7,9" -> {1, 2, 3, 4, 7, 9}
std::vector<int> parse_channel_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto [a, b] = parse_range(part);
        if (b < a) throw UsageError("empty channel range '" + part + "'");
        for (int c = a; c <= b; ++c) out.push_back(c);
    }
    return out;
}

// "Alice-Bob=150" -> (link, 150)
std::pair<Link, double> parse_link_value(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("expected LINK=VALUE, got '" + s + "'");
    try {
        return {Link::parse(s.substr(0, eq)), std::stod(s.substr(eq + 1))};
    } catch (const std::invalid_argument&) {
        throw UsageError("bad value in '" + s + "'");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw ConfigError("cannot write " + path);
}

std::string hyphen_to_underscore(std::string s) {
    for (char& c : s) {
        if (c == '-') c = '_';
    }
    return s;
}

struct Context {
    std::string scenario_path;
    std::string session_dir;
    std::string name;
    Scenario scenario;
    std::unique_ptr<SessionStore> store;
    std::uint64_t version = 0;

    void resolve() {
        std::optional<Scenario> file;
        if (!scenario_path.empty()) file = load_scenario(scenario_path);
        if (session_dir.empty()) {
            scenario = file.value_or(paper_default_scenario());
            return;
        }
        store = std::make_unique<SessionStore>(session_dir);
        const std::string key = !name.empty() ? name : file ? file->name : paper_default_scenario().name;
        auto snap = store->find(key);
        if (file && (!snap || !(snap->scenario == *file))) {
            snap = store->commit(key, *file, snap ? snap->version : 0);
        } else if (!snap) {
            snap = store->ensure(key, paper_default_scenario());
        }
        name = snap->name;
        scenario = snap->scenario;
        version = snap->version;
    }

    void artifact(const std::string& artifact_name, const std::string& content, std::ostream& err) const {
        if (!store) return;
        const auto path = store->write_artifact(name, version, artifact_name, content);
        err << "wrote " << path.string() << "\n";
    }
};

void print_report_text(const RateReport& r, std::ostream& out) {
    out << "user,singles\n";
    for (const auto& u : r.users) out << u.name << "," << u.singles << "\n";
    out << "link,channels,coincidence,accidental,car\n";
    for (const auto& l : r.links) {
        out << l.link.label() << "," << l.channel_count << "," << l.coincidence << "," << l.accidental << ",";
        if (l.car) out << *l.car;
        out << "\n";
    }
    if (r.balance_score) out << "# balance_score=" << *r.balance_score << "\n";
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Flex-grid entanglement distribution planner", "flexent"};
    app.require_subcommand(1);
    Context ctx;
    app.add_option("--scenario", ctx.scenario_path, "Scenario file (default: built-in paper-default)");
    app.add_option("--session", ctx.session_dir, "Session directory for versioned scenarios and artifacts");
    app.add_option("--name", ctx.name, "Scenario name within the session");

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "Choose a channel allocation");
    std::string policy_arg;
    std::string objective_arg;
    bool allow_drop = false;
    int group_size = 0;
    double drop_fraction = -1.0;
    std::string premium_arg;
    std::vector<std::string> target_args;
    std::vector<std::string> floor_args;
    bool commit = false;
    std::string plan_format = "json";
    plan_cmd->add_option("--policy", policy_arg, "fixed-grid, fixed-alphabetical or full-flex")
        ->check(CLI::IsMember({"fixed-grid", "fixed-alphabetical", "full-flex"}));
    plan_cmd->add_option("--objective", objective_arg, "equalize, max-min, weighted-targets or premium")
        ->check(CLI::IsMember({"equalize", "max-min", "weighted-targets", "premium"}));
    plan_cmd->add_flag("--allow-drop", allow_drop, "Let full-flex leave weak links unserved");
    plan_cmd->add_option("--group-size", group_size, "Channels per fixed-grid group")->check(CLI::PositiveNumber);
    plan_cmd->add_option("--drop-fraction", drop_fraction, "Drop links below this fraction of the median")
        ->check(CLI::Range(0.0, 1.0));
    plan_cmd->add_option("--premium", premium_arg, "Premium link, e.g. Alice-Bob");
    plan_cmd->add_option("--target", target_args, "LINK=RATE target (repeatable)");
    plan_cmd->add_option("--floor", floor_args, "LINK=RATE floor (repeatable)");
    plan_cmd->add_flag("--commit", commit, "Store the allocation as a new scenario version (needs --session)");
    plan_cmd->add_option("--format", plan_format)->check(CLI::IsMember({"json", "text"}));

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "Analytic rate report for an allocation");
    std::string allocation_path;
    std::string predict_format = "json";
    predict_cmd->add_option("--allocation", allocation_path, "File holding a JSON object channel -> link (default: scenario's)");
    predict_cmd->add_option("--format", predict_format)->check(CLI::IsMember({"json", "text"}));

    // simulate
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo time tags and coincidence counting");
    std::optional<std::uint64_t> sim_seed;
    std::optional<double> sim_duration;
    std::string sim_allocation_path;
    std::string timetags_path;
    std::string timetags_text_path;
    std::string histograms_path;
    simulate_cmd->add_option("--seed", sim_seed, "RNG seed (default: scenario's)");
    simulate_cmd->add_option("--duration", sim_duration, "Simulated seconds")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--allocation", sim_allocation_path, "File holding a JSON object channel -> link");
    simulate_cmd->add_option("--timetags", timetags_path, "Write binary time tags here");
    simulate_cmd->add_option("--timetags-text", timetags_text_path, "Write text time tags here");
    simulate_cmd->add_option("--histograms", histograms_path, "Write delay histograms (CSV) here");

    // compare-loss
    auto* loss_cmd = app.add_subcommand("compare-loss", "WSS vs DWDM loss table");
    std::string users_range = "2..16";
    std::string delimiter = ",";
    loss_cmd->add_option("--users", users_range, "User range, e.g. 2..16");
    loss_cmd->add_option("--delimiter", delimiter, "Field separator");

    // tomo
    auto* tomo_cmd = app.add_subcommand("tomo", "Bayesian fidelity scan over channels");
    std::optional<std::uint64_t> tomo_seed;
    std::string tomo_channels;
    std::string probe_arg;
    std::optional<double> werner_p;
    std::optional<std::uint64_t> per_basis_total;
    std::string tomo_format = "json";
    tomo_cmd->add_option("--seed", tomo_seed, "RNG seed (default: scenario's)");
    tomo_cmd->add_option("--channels", tomo_channels, "Channel list, e.g. 1..11");
    tomo_cmd->add_option("--probe", probe_arg, "Link whose receivers measure, e.g. Alice-Bob");
    tomo_cmd->add_option("--werner-p", werner_p, "Werner mixing for every channel")->check(CLI::Range(0.0, 1.0));
    tomo_cmd->add_option("--per-basis-total", per_basis_total, "Fixed counts per basis");
    tomo_cmd->add_option("--format", tomo_format)->check(CLI::IsMember({"json", "csv"}));

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
    std::string host = "127.0.0.1";
    int port = 8080;
    serve_cmd->add_option("--host", host, "Listen address")->capture_default_str();
    serve_cmd->add_option("--port", port, "Listen port (0 picks a free one)")->capture_default_str()->check(CLI::Range(0, 65535));

    // show
    auto* show_cmd = app.add_subcommand("show", "Print the resolved scenario");

    std::vector<std::string> argv_store{"flexent"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (serve_cmd->parsed() && ctx.session_dir.empty()) ctx.session_dir = "flexent-session";
        ctx.resolve();
        const Scenario& s = ctx.scenario;

        if (show_cmd->parsed()) {
            out << format_scenario(s);
            return kExitOk;
        }

        if (plan_cmd->parsed()) {
            GridPolicy policy = s.policy;
            Objective objective = s.objective;
            if (!policy_arg.empty()) {
                const std::string k = hyphen_to_underscore(policy_arg);
                policy.kind = k == "fixed_grid"           ? GridPolicyKind::fixed_grid
                              : k == "fixed_alphabetical" ? GridPolicyKind::fixed_alphabetical
                                                          : GridPolicyKind::full_flex;
            }
            if (allow_drop) policy.allow_drop = true;
            if (group_size > 0) policy.group_size = group_size;
            if (drop_fraction >= 0.0) policy.drop_fraction = drop_fraction;
            if (!objective_arg.empty()) {
                const std::string k = hyphen_to_underscore(objective_arg);
                objective.kind = k == "equalize"           ? ObjectiveKind::equalize
                                 : k == "max_min"          ? ObjectiveKind::max_min
                                 : k == "weighted_targets" ? ObjectiveKind::weighted_targets
                                                           : ObjectiveKind::premium;
            }
            if (!premium_arg.empty()) objective.premium_link = Link::parse(premium_arg);
            for (const auto& t : target_args) {
                const auto [link, rate] = parse_link_value(t);
                objective.targets.insert_or_assign(link, rate);
            }
            for (const auto& f : floor_args) {
                const auto [link, rate] = parse_link_value(f);
                objective.floors.insert_or_assign(link, rate);
            }
            objective.validate();
            if (commit && !ctx.store) throw UsageError("--commit needs --session");

            const AllocationPlan plan = plan_scenario(s, policy, objective);
            const json doc = {{"version", ctx.version}, {"plan", wire::to_json(plan)}};
            const std::string text = wire::render(doc);
            if (plan_format == "json") {
                out << text;
            } else {
                out << "# objective_value=" << plan.objective_value << " feasible=" << (plan.feasible ? "true" : "false")
                    << "\n";
                for (const auto& l : plan.dropped_links) out << "# dropped " << l.label() << "\n";
                print_report_text(plan.predicted, out);
            }
            ctx.artifact("plan.json", text, err);
            if (commit) {
                Scenario next = s;
                next.policy = policy;
                next.objective = objective;
                next.allocation = plan.allocation;
                const auto snap = ctx.store->commit(ctx.name, next, ctx.version);
                err << "committed " << ctx.name << " version " << snap->version << "\n";
            }
            for (const auto& d : plan.diagnostics) err << "diagnostic: " << d << "\n";
            if (!plan.feasible) {
                err << "plan is infeasible for the requested objective\n";
                return kExitInfeasible;
            }
            return kExitOk;
        }

        auto allocation_from = [&](const std::string& path) {
            if (path.empty()) return scenario_allocation(s);
            std::vector<FieldIssue> issues;
            wire::Reader r(issues);
            Allocation a = wire::allocation_from_json(wire::parse_text(read_file(path)), r, "");
            if (!issues.empty()) throw ValidationError(issues);
            return a;
        };

        if (predict_cmd->parsed()) {
            const Allocation a = allocation_from(allocation_path);
            const RateReport report = predict_scenario(s, a);
            const std::string text =
                wire::render({{"version", ctx.version}, {"allocation", wire::to_json(a)}, {"report", wire::to_json(report)}});
            if (predict_format == "json") {
                out << text;
            } else {
                print_report_text(report, out);
            }
            ctx.artifact("predict.json", text, err);
            return kExitOk;
        }

        if (simulate_cmd->parsed()) {
            const Allocation a = allocation_from(sim_allocation_path);
            const std::uint64_t seed = sim_seed.value_or(s.simulation.seed);
            const double duration = sim_duration.value_or(s.simulation.duration_s);
            TimetagStream tags;
            const SimulationSummary sim = simulate_scenario(s, a, duration, seed, &tags);
            const std::string text = wire::render({{"version", ctx.version}, {"simulation", wire::to_json(sim)}});
            out << text;
            ctx.artifact("simulate-seed" + std::to_string(seed) + ".json", text, err);
            if (!timetags_path.empty()) {
                std::ofstream f(timetags_path, std::ios::binary | std::ios::trunc);
                write_timetags_binary(tags, f);
                if (!f) throw ConfigError("cannot write " + timetags_path);
            }
            if (!timetags_text_path.empty()) {
                std::ofstream f(timetags_text_path, std::ios::trunc);
                write_timetags_text(tags, f);
                if (!f) throw ConfigError("cannot write " + timetags_text_path);
            }
            if (!histograms_path.empty()) {
                CoincidenceResult hist;
                hist.duration_s = sim.duration_s;
                for (const auto& l : sim.links) hist.links.push_back({l.link, l.histogram, l.measured_rate});
                std::ostringstream csv;
                write_histograms_text(hist, csv);
                write_text_file(histograms_path, csv.str());
            }
            return kExitOk;
        }

        if (loss_cmd->parsed()) {
            const auto [from, to] = parse_range(users_range);
            if (from < 2 || to < from) throw UsageError("--users needs 2 <= from <= to");
            if (delimiter.size() != 1) throw UsageError("delimiter must be one character");
            const char d = delimiter[0];
            std::ostringstream table;
            table << "users" << d << "wss_db" << d << "dwdm_best_db" << d << "dwdm_worst_db" << d << "dwdm_filters\n";
            for (const auto& row : scenario_loss_table(s, from, to)) {
                table << row.n_users << d << row.wss_loss_db << d << row.dwdm_best_db << d << row.dwdm_worst_db << d
                      << dwdm_filter_count(row.n_users) << "\n";
            }
            out << table.str();
            ctx.artifact("loss-table.csv", table.str(), err);
            return kExitOk;
        }

        if (tomo_cmd->parsed()) {
            TomographyRequest req;
            req.seed = tomo_seed.value_or(s.tomography.seed);
            if (!tomo_channels.empty()) req.channels = parse_channel_list(tomo_channels);
            if (!probe_arg.empty()) req.probe_link = Link::parse(probe_arg);
            if (werner_p || per_basis_total) {
                NoiseModel noise = s.tomography.noise;
                if (werner_p) {
                    noise.fallback.werner_p = *werner_p;
                    noise.per_channel.clear();
                }
                if (per_basis_total) noise.per_basis_total = *per_basis_total;
                req.noise = noise;
            }
            const auto rows = tomography_scenario(s, req);
            const std::string text = wire::render({{"version", ctx.version}, {"rows", wire::to_json(rows)}});
            if (tomo_format == "json") {
                out << text;
            } else {
                write_fidelity_table(rows, out);
            }
            ctx.artifact("tomo-seed" + std::to_string(req.seed) + ".json", text, err);
            return kExitOk;
        }

        if (serve_cmd->parsed()) {
            ApiServer server(*ctx.store, ctx.name);
            const int bound = server.bind(host, port);
            err << "serving scenario '" << ctx.name << "' from " << ctx.store->root().string() << " on http://" << host
                << ":" << bound << "\n";
            err.flush();
            server.listen();
            return kExitOk;
        }
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const ValidationError& e) {
        err << e.what() << "\n";
        return kExitInvalid;
    } catch (const VersionConflict& e) {
        err << "conflict: " << e.what() << "\n";
        return kExitConflict;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace flexent
