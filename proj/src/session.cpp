#include "flexent/session.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

namespace flexent {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw DataError("cannot write " + path.string());
}

// "scenario.v12.json" -> 12
std::optional<std::uint64_t> version_of(const fs::path& file) {
    const std::string name = file.filename().string();
    const std::string prefix = "scenario.v";
    const std::string suffix = ".json";
    if (name.size() <= prefix.size() + suffix.size()) return std::nullopt;
    if (name.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    if (name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) return std::nullopt;
    const std::string digits = name.substr(prefix.size(), name.size() - prefix.size() - suffix.size());
    if (digits.empty() || digits.size() > 18) return std::nullopt;
    for (char c : digits) {
        if (c < '0' || c > '9') return std::nullopt;
    }
    return std::stoull(digits);
}

}  // namespace

bool SessionStore::valid_name(std::string_view name) {
    if (name.empty() || name.size() > 64 || name.front() == '.') return false;
    for (char c : name) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-' || c == '.';
        if (!ok) return false;
    }
    return true;
}

SessionStore::SessionStore(fs::path root) : root_(std::move(root)) {
    fs::create_directories(root_);
    for (const auto& entry : fs::directory_iterator(root_)) {
        if (!entry.is_directory()) continue;
        const std::string name = entry.path().filename().string();
        if (!valid_name(name)) continue;
        std::optional<std::uint64_t> newest;
        for (const auto& file : fs::directory_iterator(entry.path())) {
            if (const auto v = version_of(file.path()); v && (!newest || *v > *newest)) newest = v;
        }
        if (!newest) continue;
        auto snap = std::make_shared<ScenarioSnapshot>();
        snap->name = name;
        snap->version = *newest;
        snap->scenario = parse_scenario(read_file(scenario_file(name, *newest)));
        current_.emplace(name, std::move(snap));
    }
}

fs::path SessionStore::scenario_file(std::string_view name, std::uint64_t version) const {
    return root_ / std::string(name) / ("scenario.v" + std::to_string(version) + ".json");
}

std::vector<std::string> SessionStore::names() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [name, snap] : current_) out.push_back(name);
    return out;
}

std::shared_ptr<const ScenarioSnapshot> SessionStore::find(std::string_view name) const {
    std::lock_guard lock(mutex_);
    const auto it = current_.find(name);
    return it == current_.end() ? nullptr : it->second;
}

std::shared_ptr<const ScenarioSnapshot> SessionStore::get(std::string_view name) const {
    auto snap = find(name);
    if (!snap) throw ConfigError("no scenario named '" + std::string(name) + "' in session " + root_.string());
    return snap;
}

std::shared_ptr<const ScenarioSnapshot> SessionStore::commit(std::string_view name, const Scenario& scenario,
                                                             std::optional<std::uint64_t> expected_version) {
    if (!valid_name(name)) throw ConfigError("invalid scenario name '" + std::string(name) + "'");
    validate_scenario(scenario);
    const std::string text = format_scenario(scenario);

    std::lock_guard lock(mutex_);
    const auto it = current_.find(name);
    const std::uint64_t current = it == current_.end() ? 0 : it->second->version;
    if (expected_version && *expected_version != current) {
        throw VersionConflict(std::string(name), *expected_version, current);
    }
    const std::uint64_t next = current + 1;
    const fs::path dir = root_ / std::string(name);
    fs::create_directories(dir);
    const fs::path target = scenario_file(name, next);
    const fs::path staging = dir / (".staging.v" + std::to_string(next));
    write_file(staging, text);
    // A hard link publishes the file atomically and fails if another process got there first.
    std::error_code ec;
    fs::create_hard_link(staging, target, ec);
    fs::remove(staging);
    if (ec) {
        if (fs::exists(target)) throw VersionConflict(std::string(name), current, next);
        throw DataError("cannot publish " + target.string() + ": " + ec.message());
    }

    auto snap = std::make_shared<ScenarioSnapshot>();
    snap->name = std::string(name);
    snap->version = next;
    snap->scenario = scenario;
    current_[std::string(name)] = snap;
    return snap;
}

std::shared_ptr<const ScenarioSnapshot> SessionStore::ensure(std::string_view name, const Scenario& initial) {
    if (auto snap = find(name)) return snap;
    try {
        return commit(name, initial, 0);
    } catch (const VersionConflict&) {
        return get(name);
    }
}

fs::path SessionStore::write_artifact(std::string_view name, std::uint64_t version, std::string_view artifact,
                                      std::string_view content) {
    if (!valid_name(name) || !valid_name(artifact)) throw ConfigError("invalid artifact path");
    const fs::path dir = root_ / std::string(name) / ("v" + std::to_string(version));
    fs::create_directories(dir);
    const fs::path target = dir / std::string(artifact);
    const fs::path staging = dir / ("." + std::string(artifact) + ".tmp");
    write_file(staging, content);
    fs::rename(staging, target);
    return target;
}

std::optional<std::string> SessionStore::read_artifact(std::string_view name, std::uint64_t version,
                                                       std::string_view artifact) const {
    if (!valid_name(name) || !valid_name(artifact)) return std::nullopt;
    const fs::path path = root_ / std::string(name) / ("v" + std::to_string(version)) / std::string(artifact);
    if (!fs::exists(path)) return std::nullopt;
    return read_file(path);
}

}  // namespace flexent
