#pragma once

#include <map>
#include <memory>
#include <string>

#include "flexent/session.hpp"

namespace flexent {

inline constexpr const char* kApiSchema = "flexent-api/1";

struct ApiRequest {
    std::string method;  // "GET", "PUT", "POST"
    std::string path;    // e.g. "/v1/plan"
    std::map<std::string, std::string> query;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::string body;  // JSON, keys sorted
};

/// Transport-independent request handling over one scenario of a session.
///
///   GET  /v1/health
///   GET  /v1/scenario
///   PUT  /v1/scenario     {"expected_version", "scenario"}
///   POST /v1/plan         {"version"?, "policy"?, "objective"?, "commit"?}
///   POST /v1/predict      {"version"?, "allocation"?}
///   POST /v1/simulate     {"seed", "version"?, "duration_s"?, "allocation"?}
///   GET  /v1/loss-table   ?from=2&to=16
///   POST /v1/tomo         {"seed", "version"?, "channels"?, "probe_link"?, "noise"?}
///
/// Every response carries the scenario version it was computed from. A
/// request naming a version other than the current one gets 409.
class Api {
public:
    Api(SessionStore& store, std::string scenario_name);

    /// Safe to call from several threads at once.
    ApiResponse handle(const ApiRequest& request) const;

private:
    SessionStore& store_;
    std::string name_;
};

/// HTTP front end for Api.
class ApiServer {
public:
    ApiServer(SessionStore& store, std::string scenario_name);
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Port 0 picks a free port. Returns the bound port; throws Error on failure.
    int bind(const std::string& host, int port);
    /// Serve until stop(); requires bind().
    void listen();
    /// listen() on a background thread.
    void start();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace flexent
