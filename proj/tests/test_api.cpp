#include <atomic>
#include <thread>

#include "doctest.h"
#include "flexent/api.hpp"
#include "flexent/scenario.hpp"

// After Eigen: <resolv.h> defines a _res macro that collides with Eigen internals.
#include <httplib.h>

#include "json.hpp"
#include "scratch.hpp"

using namespace flexent;
using nlohmann::json;

namespace {

struct Fixture {
    scratch::Dir dir{"api"};
    SessionStore store{dir.path()};
    Api api;

    Fixture() : api((store.commit("lab", paper_default_scenario(), 0), store), "lab") {}

    ApiResponse call(const std::string& method, const std::string& path, const json& body = nullptr,
                     std::map<std::string, std::string> query = {}) const {
        return api.handle({method, path, std::move(query), body.is_null() ? std::string() : body.dump()});
    }
};

json alphabetical_allocation() {
    const char* links[] = {"Alice-Bob", "Alice-Charlie", "Alice-Dave", "Bob-Charlie", "Bob-Dave", "Charlie-Dave"};
    json a = json::object();
    for (int i = 0; i < 12; ++i) a[std::to_string(i + 1)] = links[i / 2];
    return a;
}

bool has_pointer(const json& body, const std::string& pointer) {
    for (const auto& i : body["issues"])
        if (i["pointer"] == pointer) return true;
    return false;
}

}  // namespace

TEST_SUITE("api") {

TEST_CASE("health and scenario read") {
    Fixture f;
    auto r = f.call("GET", "/v1/health");
    CHECK(r.status == 200);
    CHECK(json::parse(r.body)["schema"] == kApiSchema);
    r = f.call("GET", "/v1/scenario");
    CHECK(r.status == 200);
    const auto j = json::parse(r.body);
    CHECK(j["version"] == 1);
    CHECK(j["scenario"]["users"].size() == 4);
}

TEST_CASE("what-if prediction with the alphabetical layout") {
    Fixture f;
    const auto r = f.call("POST", "/v1/predict", {{"allocation", alphabetical_allocation()}});
    REQUIRE(r.status == 200);
    const auto links = json::parse(r.body)["report"]["links"];
    double ab = 0.0, best_other = 0.0;
    for (const auto& l : links) {
        if (l["link"] == "Alice-Bob") {
            ab = l["coincidence"];
        } else {
            best_other = std::max(best_other, l["coincidence"].get<double>());
        }
    }
    CHECK(ab > best_other);
}

TEST_CASE("plan requests are idempotent and may commit") {
    Fixture f;
    const json req = {{"policy", {{"kind", "full_flex"}, {"allow_drop", true}}}};
    const auto a = f.call("POST", "/v1/plan", req);
    const auto b = f.call("POST", "/v1/plan", req);
    REQUIRE(a.status == 200);
    CHECK(a.body == b.body);
    CHECK(json::parse(a.body)["plan"]["dropped_links"] == json::array({"Charlie-Dave"}));

    auto c = f.call("POST", "/v1/plan", {{"commit", true}});
    CHECK(c.status == 400);
    CHECK(has_pointer(json::parse(c.body), "/version"));

    c = f.call("POST", "/v1/plan", {{"commit", true}, {"version", 1}});
    REQUIRE(c.status == 200);
    const auto cj = json::parse(c.body);
    CHECK(cj["version"] == 2);
    CHECK(cj["based_on_version"] == 1);
    CHECK(f.store.get("lab")->scenario.allocation.has_value());

    const auto stale = f.call("POST", "/v1/plan", {{"version", 1}});
    CHECK(stale.status == 409);
    CHECK(json::parse(stale.body)["current_version"] == 2);
}

TEST_CASE("scenario edits bump the version and stale edits conflict") {
    Fixture f;
    auto scenario = json::parse(f.call("GET", "/v1/scenario").body)["scenario"];
    scenario["coincidence_window_ps"] = 2048.0;
    auto r = f.call("PUT", "/v1/scenario", {{"expected_version", 1}, {"scenario", scenario}});
    REQUIRE(r.status == 200);
    CHECK(json::parse(r.body)["version"] == 2);
    r = f.call("PUT", "/v1/scenario", {{"expected_version", 1}, {"scenario", scenario}});
    CHECK(r.status == 409);

    scenario["users"][0]["detector"].erase("efficiency");
    r = f.call("PUT", "/v1/scenario", {{"expected_version", 2}, {"scenario", scenario}});
    CHECK(r.status == 400);
    CHECK(has_pointer(json::parse(r.body), "/scenario/users/0/detector/efficiency"));
}

TEST_CASE("seeded endpoints are byte-identical and require a seed") {
    Fixture f;
    const json sim = {{"seed", 9}, {"duration_s", 0.2}, {"allocation", alphabetical_allocation()}};
    const auto a = f.call("POST", "/v1/simulate", sim);
    const auto b = f.call("POST", "/v1/simulate", sim);
    REQUIRE(a.status == 200);
    CHECK(a.body == b.body);
    auto other = sim;
    other["seed"] = 10;
    CHECK(f.call("POST", "/v1/simulate", other).body != a.body);

    auto missing = f.call("POST", "/v1/simulate", {{"duration_s", 0.2}});
    CHECK(missing.status == 400);
    CHECK(has_pointer(json::parse(missing.body), "/seed"));
    missing = f.call("POST", "/v1/tomo", {{"channels", {1}}});
    CHECK(missing.status == 400);
    CHECK(has_pointer(json::parse(missing.body), "/seed"));

    const json tomo = {{"seed", 4}, {"channels", {1, 12}}, {"noise", {{"werner_p", 0.9}, {"per_basis_total", 500}}}};
    const auto t1 = f.call("POST", "/v1/tomo", tomo);
    REQUIRE(t1.status == 200);
    CHECK(t1.body == f.call("POST", "/v1/tomo", tomo).body);
    CHECK(json::parse(t1.body)["rows"].size() == 2);
}

TEST_CASE("malformed and invalid bodies") {
    Fixture f;
    auto r = f.api.handle({"POST", "/v1/predict", {}, "{\"allocation\": [1,"});
    CHECK(r.status == 400);
    CHECK(json::parse(r.body)["message"].get<std::string>().find("line 1") != std::string::npos);

    r = f.call("POST", "/v1/predict", {{"alloc", 1}});
    CHECK(r.status == 400);
    CHECK(has_pointer(json::parse(r.body), "/alloc"));

    r = f.call("POST", "/v1/simulate", {{"seed", 1}, {"duration_s", -1.0}});
    CHECK(r.status == 400);
    CHECK(has_pointer(json::parse(r.body), "/duration_s"));

    r = f.call("POST", "/v1/predict", {{"allocation", {{"40", "Alice-Bob"}}}});
    CHECK(r.status == 422);
}

TEST_CASE("routing errors") {
    Fixture f;
    CHECK(f.call("GET", "/v1/nowhere").status == 404);
    CHECK(f.call("DELETE", "/v1/scenario").status == 405);
    CHECK(f.call("GET", "/v1/plan").status == 405);
}

TEST_CASE("loss table endpoint") {
    Fixture f;
    auto r = f.call("GET", "/v1/loss-table", nullptr, {{"from", "2"}, {"to", "16"}});
    REQUIRE(r.status == 200);
    const auto rows = json::parse(r.body)["rows"];
    CHECK(rows.size() == 15);
    CHECK(rows.back()["dwdm_worst_db"].get<double>() == doctest::Approx(60.6));
    CHECK(f.call("GET", "/v1/loss-table", nullptr, {{"from", "x"}}).status == 400);
}

TEST_CASE("HTTP front end with concurrent edits") {
    Fixture f;
    ApiServer server(f.store, "lab");
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    server.start();

    httplib::Client client("127.0.0.1", port);
    auto health = client.Get("/v1/health");
    REQUIRE(health);
    CHECK(health->status == 200);

    auto loss = client.Get("/v1/loss-table?from=2&to=4");
    REQUIRE(loss);
    CHECK(json::parse(loss->body)["rows"].size() == 3);

    const auto scenario = json::parse(f.call("GET", "/v1/scenario").body)["scenario"];
    std::atomic<int> ok{0}, conflict{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < 6; ++i) {
        threads.emplace_back([&, i] {
            httplib::Client c("127.0.0.1", port);
            auto s = scenario;
            s["coincidence_window_ps"] = 1000.0 + i;
            const json body = {{"expected_version", 1}, {"scenario", s}};
            auto res = c.Put("/v1/scenario", body.dump(), "application/json");
            if (res && res->status == 200) ++ok;
            if (res && res->status == 409) ++conflict;
        });
    }
    for (auto& t : threads) t.join();
    CHECK(ok == 1);
    CHECK(conflict == 5);

    auto bad = client.Post("/v1/simulate", "{", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    server.stop();
}

}
