#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flexent/errors.hpp"
#include "flexent/scenario.hpp"

namespace flexent {

/// A commit was attempted against a version that is no longer current.
class VersionConflict : public Error {
public:
    VersionConflict(const std::string& name, std::uint64_t expected, std::uint64_t current)
        : Error("scenario '" + name + "' is at version " + std::to_string(current) + ", edit was based on " +
                std::to_string(expected)),
          expected_(expected), current_(current) {}

    std::uint64_t expected_version() const noexcept { return expected_; }
    std::uint64_t current_version() const noexcept { return current_; }

private:
    std::uint64_t expected_;
    std::uint64_t current_;
};

/// Immutable view of one stored scenario version.
struct ScenarioSnapshot {
    std::string name;
    std::uint64_t version = 0;
    Scenario scenario;
};

/// Named scenarios persisted under a directory, one file per version:
///
///   <root>/<name>/scenario.v<N>.json
///   <root>/<name>/v<N>/<artifact>
///
/// Every accepted commit creates version current + 1. Readers get shared
/// immutable snapshots; commits are checked against the caller's expected
/// version instead of holding locks.
class SessionStore {
public:
    /// Creates the directory if needed and loads the newest version of each scenario.
    explicit SessionStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    std::vector<std::string> names() const;

    std::shared_ptr<const ScenarioSnapshot> find(std::string_view name) const;
    /// Throws ConfigError for an unknown name.
    std::shared_ptr<const ScenarioSnapshot> get(std::string_view name) const;

    /// Validates and stores a new version. With an expected version, the
    /// commit succeeds only if it matches the current one (0 = must not exist
    /// yet); otherwise it throws VersionConflict.
    std::shared_ptr<const ScenarioSnapshot> commit(std::string_view name, const Scenario& scenario,
                                                   std::optional<std::uint64_t> expected_version);

    /// Creates the scenario at version 1 if absent; returns the current snapshot either way.
    std::shared_ptr<const ScenarioSnapshot> ensure(std::string_view name, const Scenario& initial);

    std::filesystem::path write_artifact(std::string_view name, std::uint64_t version, std::string_view artifact,
                                         std::string_view content);
    std::optional<std::string> read_artifact(std::string_view name, std::uint64_t version,
                                             std::string_view artifact) const;

    /// Letters, digits, '_', '-' and '.', not starting with '.'; at most 64 characters.
    static bool valid_name(std::string_view name);

private:
    std::filesystem::path scenario_file(std::string_view name, std::uint64_t version) const;

    std::filesystem::path root_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const ScenarioSnapshot>, std::less<>> current_;
};

}  // namespace flexent
