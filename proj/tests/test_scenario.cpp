#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "flexent/errors.hpp"
#include "flexent/scenario.hpp"
#include "json.hpp"
#include "scratch.hpp"

using namespace flexent;
using nlohmann::json;

namespace {

std::vector<FieldIssue> issues_of(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ValidationError& e) {
        return e.issues();
    }
    return {};
}

bool has_pointer(const std::vector<FieldIssue>& issues, const std::string& pointer) {
    for (const auto& i : issues)
        if (i.pointer == pointer) return true;
    return false;
}

json default_json() { return json::parse(format_scenario(paper_default_scenario())); }

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("bundled default scenario loads and equals the built-in one") {
    const auto s = load_scenario(bundled_scenario_dir() / "paper-default.json");
    CHECK(s == paper_default_scenario());
    CHECK(s.users.size() == 4);
    CHECK(s.network().channels.size() == 12);
    CHECK(s.network().links.size() == 6);
    CHECK(scenario_issues(s).empty());
}

TEST_CASE("default receivers") {
    const auto s = paper_default_scenario();
    const auto net = s.network();
    CHECK(net.user("Alice").detector.efficiency == doctest::Approx(0.85));
    CHECK(net.user("Alice").detector.duty_cycle == 1.0);
    CHECK(net.user("Charlie").detector.efficiency == doctest::Approx(0.2));
    CHECK(net.user("Charlie").detector.duty_cycle == doctest::Approx(0.1));
    CHECK(net.user("Dave").detector.efficiency == doctest::Approx(0.1));
    CHECK(s.coincidence_window_ps == 1024.0);
    CHECK(s.probe_link() == Link("Alice", "Bob"));
    CHECK(s.tomography_channels().size() == 12);
}

TEST_CASE("save then load is the identity") {
    scratch::Dir dir("scenario-roundtrip");
    auto s = paper_default_scenario();
    s.name = "edited";
    s.users[2].path_loss_db = 3.25;
    Allocation a;
    a.assign(1, Link("Alice", "Bob"));
    a.assign(12, Link("Charlie", "Dave"));
    s.allocation = a;
    s.tomography.noise.per_channel[12] = ChannelNoise{0.8, 3.0};
    s.tomography.noise.per_basis_total = 5000;
    s.objective.kind = ObjectiveKind::premium;
    s.objective.premium_link = Link("Alice", "Bob");
    s.objective.floors[Link("Bob", "Dave")] = 10.0;
    const auto path = dir.path() / "s.json";
    save_scenario(s, path);
    CHECK(load_scenario(path) == s);
    CHECK(format_scenario(load_scenario(path)) == format_scenario(s));
}

TEST_CASE("missing detector efficiency names the field") {
    auto j = default_json();
    j["users"][1]["detector"].erase("efficiency");
    const auto issues = issues_of(j.dump());
    REQUIRE_FALSE(issues.empty());
    CHECK(has_pointer(issues, "/users/1/detector/efficiency"));
}

TEST_CASE("all validation failures are reported together") {
    auto j = default_json();
    j["users"][0]["detector"]["efficiency"] = 1.5;
    j["users"][3]["detector"]["duty_cycle"] = 0.0;
    j["grid"]["slice_width_ghz"] = 10.0;
    j["coincidence_window_ps"] = 0.0;
    const auto issues = issues_of(j.dump());
    CHECK(has_pointer(issues, "/users/0/detector/efficiency"));
    CHECK(has_pointer(issues, "/users/3/detector/duty_cycle"));
    CHECK(has_pointer(issues, "/coincidence_window_ps"));
    bool grid = false;
    for (const auto& i : issues) grid |= i.pointer.rfind("/grid", 0) == 0;
    CHECK(grid);
}

TEST_CASE("unknown keys and wrong types are rejected") {
    auto j = default_json();
    j["spectrum"]["colour"] = "blue";
    CHECK(has_pointer(issues_of(j.dump()), "/spectrum/colour"));
    j = default_json();
    j["grid"]["channel_count"] = "twelve";
    CHECK(has_pointer(issues_of(j.dump()), "/grid/channel_count"));
    j = default_json();
    j["format"] = "something-else/9";
    CHECK(has_pointer(issues_of(j.dump()), "/format"));
}

TEST_CASE("references to unknown users and links") {
    auto j = default_json();
    j["links"].push_back("Alice-Eve");
    CHECK(has_pointer(issues_of(j.dump()), "/links/6"));
    j = default_json();
    j["users"][1]["name"] = "Alice";
    CHECK_FALSE(issues_of(j.dump()).empty());
    j = default_json();
    j["users"][1]["name"] = "bad name!";
    CHECK(has_pointer(issues_of(j.dump()), "/users/1/name"));
    j = default_json();
    j["allocation"] = {{"13", "Alice-Bob"}};
    CHECK_FALSE(issues_of(j.dump()).empty());
}

TEST_CASE("malformed text carries a position") {
    const std::string text = "{\n  \"format\": \"flexent-scenario/1\",\n  \"name\": oops\n}\n";
    try {
        parse_scenario(text);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() >= 11);
    }
}

TEST_CASE("user names") {
    CHECK(valid_user_name("Alice"));
    CHECK(valid_user_name("node_7"));
    CHECK_FALSE(valid_user_name(""));
    CHECK_FALSE(valid_user_name("has-dash"));
    CHECK_FALSE(valid_user_name(std::string(33, 'a')));
}

}
