#pragma once

#include "ecoscapes/image.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace ecoscapes::pipeline {

using Payload = std::variant<std::string, Image>;

struct ArtifactVersion {
    Payload payload;
    std::string producer;
    std::uint64_t sequence = 0;  // write order within the run; stands in for a timestamp
};

// Run-scoped named outputs. An artifact is written once; only a module that
// declares the artifact in its `revises` set may add a further version.
class ArtifactStore {
public:
    void put(const std::string& name, Payload payload, const std::string& producer,
             bool revision = false);

    bool contains(const std::string& name) const { return items_.count(name) != 0; }
    const ArtifactVersion* latest(const std::string& name) const;
    const std::string* text(const std::string& name) const;
    const Image* image(const std::string& name) const;
    // Oldest first; empty when absent.
    std::vector<ArtifactVersion> versions(const std::string& name) const;
    std::vector<std::string> names() const;

    // Writes every artifact under `dir`: text verbatim, images as PNG. The
    // latest version keeps the plain name; artifacts with several versions
    // are also written as `<stem>.v<N><ext>`.
    void mirror_to(const std::filesystem::path& dir) const;

private:
    std::map<std::string, std::vector<ArtifactVersion>> items_;
    std::uint64_t next_sequence_ = 1;
};

struct Output {
    std::string name;
    Payload payload;
};

struct ModuleResult {
    std::vector<Output> outputs;
    std::string note;  // e.g. why a module finished without producing anything
};

class ModuleContext {
public:
    ModuleContext(const ArtifactStore& store, std::string module_id,
                  std::set<std::string> missing_soft)
        : store_(store), module_id_(std::move(module_id)), missing_soft_(std::move(missing_soft)) {}

    const ArtifactStore& store() const { return store_; }
    const std::string& module_id() const { return module_id_; }
    // Soft dependencies that did not succeed (or are not part of the plan).
    const std::set<std::string>& missing_soft() const { return missing_soft_; }
    bool soft_available(const std::string& id) const { return missing_soft_.count(id) == 0; }

private:
    const ArtifactStore& store_;
    std::string module_id_;
    std::set<std::string> missing_soft_;
};

struct ModuleSpec {
    std::string id;
    std::set<std::string> deps;       // must succeed
    std::set<std::string> soft_deps;  // ordering only
    std::set<std::string> revises;    // artifacts this module may overwrite
    std::function<ModuleResult(const ModuleContext&)> run;
};

struct Plan {
    std::vector<ModuleSpec> modules;  // execution order
    std::vector<std::string> ids() const;
};

/// Topological order over hard edges and soft edges whose target exists.
/// Ready modules are taken in lexicographic id order. Throws
/// MissingHardDependency, CycleDetected (message lists one cycle) or
/// InvalidModule.
Plan resolve_order(std::vector<ModuleSpec> modules);

enum class Status { Succeeded, Failed, Skipped, NotRun };

std::string_view status_name(Status s);

struct ModuleStatus {
    Status status = Status::NotRun;
    // Failed: the reason. Skipped: the id of the hard dependency that did
    // not succeed. Succeeded: an optional note.
    std::string detail;
    std::vector<std::string> outputs;
};

struct ManifestEntry {
    std::string producer;
    std::uint64_t sequence = 0;
};

struct RunReport {
    std::map<std::string, ModuleStatus> statuses;
    std::vector<std::string> order;  // modules whose run procedure was invoked
    std::map<std::string, std::vector<ManifestEntry>> manifest;

    Status status_of(const std::string& id) const;
    std::string to_json() const;
};

/// Runs `plan` in order against `store`. Never throws for module failures:
/// they are recorded as statuses. A module whose hard dependency did not
/// succeed is Skipped.
RunReport execute(const Plan& plan, ArtifactStore& store);

}  // namespace ecoscapes::pipeline
