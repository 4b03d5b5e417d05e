#include "flexent/api.hpp"

#include <charconv>
#include <thread>

#include <httplib.h>

#include "flexent/service.hpp"
#include "wire.hpp"

namespace flexent {

namespace {

using wire::json;

struct HttpError {
    int status;
    std::string code;
    std::string message;
    std::vector<FieldIssue> issues;
    std::optional<std::uint64_t> current_version;
};

ApiResponse reply(int status, const json& body) { return {status, wire::render(body)}; }

ApiResponse error_reply(const HttpError& e) {
    json body = {{"error", e.code}, {"message", e.message}, {"issues", wire::to_json(e.issues)}};
    if (e.current_version) body["current_version"] = *e.current_version;
    return reply(e.status, body);
}

json parse_body(const std::string& body, bool required) {
    if (body.empty()) {
        if (required) throw HttpError{400, "bad_request", "request body is required", {{"", "missing body"}}, {}};
        return json::object();
    }
    try {
        json j = wire::parse_text(body);
        if (!j.is_object()) throw HttpError{400, "bad_request", "body must be a JSON object", {{"", "expected an object"}}, {}};
        return j;
    } catch (const ParseError& e) {
        throw HttpError{400, "bad_request", e.what(), {{"", e.what()}}, {}};
    }
}

void fail_on_issues(const std::vector<FieldIssue>& issues) {
    if (!issues.empty()) throw HttpError{400, "bad_request", "request body failed validation", issues, {}};
}

std::shared_ptr<const ScenarioSnapshot> pinned(const SessionStore& store, const std::string& name, const json& body,
                                               wire::Reader& r) {
    auto snap = store.get(name);
    std::uint64_t version = 0;
    if (r.field(body, "", "version", version) && version != snap->version) {
        throw HttpError{409, "version_conflict",
                        "request names version " + std::to_string(version) + ", current is " +
                            std::to_string(snap->version),
                        {{"/version", "stale version"}},
                        snap->version};
    }
    return snap;
}

int query_int(const ApiRequest& req, const std::string& key, int fallback) {
    const auto it = req.query.find(key);
    if (it == req.query.end()) return fallback;
    int value = 0;
    const auto* begin = it->second.data();
    const auto* end = begin + it->second.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw HttpError{400, "bad_request", "query parameter '" + key + "' must be an integer", {{"?" + key, "expected an integer"}}, {}};
    }
    return value;
}

}  // namespace

Api::Api(SessionStore& store, std::string scenario_name) : store_(store), name_(std::move(scenario_name)) {
    store_.get(name_);
}

ApiResponse Api::handle(const ApiRequest& req) const {
    try {
        std::vector<FieldIssue> issues;
        wire::Reader r(issues);
        const std::string& p = req.path;
        const std::string& m = req.method;
        auto route = [&](const char* method, const char* path) {
            if (p != path) return false;
            if (m != method) throw HttpError{405, "method_not_allowed", m + " not allowed on " + p, {}, {}};
            return true;
        };

        if (route("GET", "/v1/health")) {
            return reply(200, {{"status", "ok"}, {"schema", kApiSchema}, {"version", store_.get(name_)->version}});
        }

        if (p == "/v1/scenario" && m == "GET") {
            auto snap = store_.get(name_);
            return reply(200, {{"name", snap->name}, {"version", snap->version}, {"scenario", wire::to_json(snap->scenario)}});
        }
        if (route("PUT", "/v1/scenario")) {
            const json body = parse_body(req.body, true);
            r.reject_unknown(body, "", {"expected_version", "scenario"});
            std::uint64_t expected = 0;
            r.field(body, "", "expected_version", expected, true);
            Scenario s;
            if (const json* sj = r.member(body, "", "scenario", true)) s = wire::scenario_from_json(*sj, r, "/scenario");
            fail_on_issues(issues);
            auto semantic = scenario_issues(s);
            for (auto& i : semantic) i.pointer = "/scenario" + i.pointer;
            fail_on_issues(semantic);
            auto snap = store_.commit(name_, s, expected);
            return reply(200, {{"name", snap->name}, {"version", snap->version}});
        }

        if (route("POST", "/v1/plan")) {
            const json body = parse_body(req.body, false);
            r.reject_unknown(body, "", {"version", "policy", "objective", "commit"});
            auto snap = pinned(store_, name_, body, r);
            GridPolicy policy = snap->scenario.policy;
            Objective objective = snap->scenario.objective;
            bool commit = false;
            if (const json* j = r.member(body, "", "policy")) policy = wire::policy_from_json(*j, r, "/policy");
            if (const json* j = r.member(body, "", "objective")) objective = wire::objective_from_json(*j, r, "/objective");
            r.field(body, "", "commit", commit);
            if (commit && !body.contains("version")) r.issue("/version", "commit requires the version the plan is based on");
            fail_on_issues(issues);
            const AllocationPlan plan = plan_scenario(snap->scenario, policy, objective);
            json out = {{"version", snap->version}, {"plan", wire::to_json(plan)}};
            if (commit) {
                Scenario next = snap->scenario;
                next.policy = policy;
                next.objective = objective;
                next.allocation = plan.allocation;
                auto committed = store_.commit(name_, next, snap->version);
                out["based_on_version"] = snap->version;
                out["version"] = committed->version;
            }
            return reply(200, out);
        }

        if (route("POST", "/v1/predict")) {
            const json body = parse_body(req.body, false);
            r.reject_unknown(body, "", {"version", "allocation"});
            auto snap = pinned(store_, name_, body, r);
            Allocation alloc = scenario_allocation(snap->scenario);
            if (const json* j = r.member(body, "", "allocation")) alloc = wire::allocation_from_json(*j, r, "/allocation");
            fail_on_issues(issues);
            const RateReport report = predict_scenario(snap->scenario, alloc);
            return reply(200, {{"version", snap->version}, {"allocation", wire::to_json(alloc)}, {"report", wire::to_json(report)}});
        }

        if (route("POST", "/v1/simulate")) {
            const json body = parse_body(req.body, true);
            r.reject_unknown(body, "", {"version", "seed", "duration_s", "allocation"});
            auto snap = pinned(store_, name_, body, r);
            std::uint64_t seed = 0;
            r.field(body, "", "seed", seed, true);
            double duration = snap->scenario.simulation.duration_s;
            if (r.field(body, "", "duration_s", duration) && !(duration > 0.0 && duration <= 3600.0)) {
                r.issue("/duration_s", "must lie in (0, 3600]");
            }
            Allocation alloc = scenario_allocation(snap->scenario);
            if (const json* j = r.member(body, "", "allocation")) alloc = wire::allocation_from_json(*j, r, "/allocation");
            fail_on_issues(issues);
            const SimulationSummary sim = simulate_scenario(snap->scenario, alloc, duration, seed);
            return reply(200, {{"version", snap->version}, {"simulation", wire::to_json(sim)}});
        }

        if (route("GET", "/v1/loss-table")) {
            auto snap = store_.get(name_);
            const int from = query_int(req, "from", 2);
            const int to = query_int(req, "to", 16);
            if (from < 2 || to < from || to > 1000) {
                throw HttpError{400, "bad_request", "need 2 <= from <= to <= 1000", {{"?from", "out of range"}}, {}};
            }
            return reply(200, {{"version", snap->version},
                               {"rows", wire::to_json(scenario_loss_table(snap->scenario, from, to))}});
        }

        if (route("POST", "/v1/tomo")) {
            const json body = parse_body(req.body, true);
            r.reject_unknown(body, "", {"version", "seed", "channels", "probe_link", "noise"});
            auto snap = pinned(store_, name_, body, r);
            TomographyRequest t;
            r.field(body, "", "seed", t.seed, true);
            if (const json* j = r.member(body, "", "channels")) {
                if (!j->is_array()) {
                    r.issue("/channels", "expected an array of channel indices");
                } else {
                    std::vector<int> channels;
                    for (std::size_t i = 0; i < j->size(); ++i) {
                        if ((*j)[i].is_number_integer()) {
                            channels.push_back((*j)[i].get<int>());
                        } else {
                            r.issue(wire::child_pointer("/channels", i), "expected an integer");
                        }
                    }
                    t.channels = channels;
                }
            }
            if (const json* j = r.member(body, "", "probe_link")) {
                Link l;
                if (r.link(*j, "/probe_link", l)) t.probe_link = l;
            }
            if (const json* j = r.member(body, "", "noise")) t.noise = wire::noise_from_json(*j, r, "/noise");
            fail_on_issues(issues);
            return reply(200, {{"version", snap->version}, {"rows", wire::to_json(tomography_scenario(snap->scenario, t))}});
        }

        if (p == "/v1/scenario") throw HttpError{405, "method_not_allowed", m + " not allowed on " + p, {}, {}};
        throw HttpError{404, "not_found", "no route " + m + " " + p, {}, {}};
    } catch (const HttpError& e) {
        return error_reply(e);
    } catch (const VersionConflict& e) {
        return error_reply({409, "version_conflict", e.what(), {}, e.current_version()});
    } catch (const ValidationError& e) {
        return error_reply({400, "bad_request", e.what(), e.issues(), {}});
    } catch (const Error& e) {
        return error_reply({422, "unprocessable", e.what(), {}, {}});
    } catch (const std::exception& e) {
        return error_reply({500, "internal", e.what(), {}, {}});
    }
}

struct ApiServer::Impl {
    Api api;
    httplib::Server server;
    std::thread thread;
    bool bound = false;

    Impl(SessionStore& store, std::string name) : api(store, std::move(name)) {}
};

ApiServer::ApiServer(SessionStore& store, std::string scenario_name)
    : impl_(std::make_unique<Impl>(store, std::move(scenario_name))) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        ApiRequest r;
        r.method = req.method;
        r.path = req.path;
        for (const auto& [k, v] : req.params) r.query[k] = v;
        r.body = req.body;
        const ApiResponse out = impl_->api.handle(r);
        res.status = out.status;
        res.set_content(out.body, "application/json");
    };
    impl_->server.Get(R"(/.*)", handler);
    impl_->server.Put(R"(/.*)", handler);
    impl_->server.Post(R"(/.*)", handler);
    impl_->server.Delete(R"(/.*)", handler);
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
    int bound_port = port;
    if (port == 0) {
        bound_port = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound_port = -1;
    }
    if (bound_port < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
    impl_->bound = true;
    return bound_port;
}

void ApiServer::listen() {
    if (!impl_->bound) throw Error("server is not bound");
    impl_->server.listen_after_bind();
}

void ApiServer::start() {
    if (!impl_->bound) throw Error("server is not bound");
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void ApiServer::stop() {
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace flexent
