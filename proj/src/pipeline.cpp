#include "ecoscapes/pipeline.hpp"

#include "ecoscapes/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <queue>

namespace ecoscapes::pipeline {

void ArtifactStore::put(const std::string& name, Payload payload, const std::string& producer,
                        bool revision) {
    auto& versions = items_[name];
    if (!versions.empty() && !revision) {
        throw Error(Errc::ArtifactConflict,
                    name + " was already written by " + versions.back().producer);
    }
    versions.push_back({std::move(payload), producer, next_sequence_++});
}

const ArtifactVersion* ArtifactStore::latest(const std::string& name) const {
    auto it = items_.find(name);
    return it == items_.end() ? nullptr : &it->second.back();
}

const std::string* ArtifactStore::text(const std::string& name) const {
    const auto* v = latest(name);
    return v == nullptr ? nullptr : std::get_if<std::string>(&v->payload);
}

const Image* ArtifactStore::image(const std::string& name) const {
    const auto* v = latest(name);
    return v == nullptr ? nullptr : std::get_if<Image>(&v->payload);
}

std::vector<ArtifactVersion> ArtifactStore::versions(const std::string& name) const {
    auto it = items_.find(name);
    return it == items_.end() ? std::vector<ArtifactVersion>{} : it->second;
}

std::vector<std::string> ArtifactStore::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : items_) out.push_back(name);
    return out;
}

namespace {

void write_payload(const std::filesystem::path& path, const Payload& payload) {
    if (const auto* text = std::get_if<std::string>(&payload)) {
        write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text->data()),
                                         text->size()));
    } else {
        write_png(path, std::get<Image>(payload));
    }
}

}  // namespace

void ArtifactStore::mirror_to(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& [name, versions] : items_) {
        write_payload(dir / name, versions.back().payload);
        if (versions.size() > 1) {
            const std::filesystem::path p(name);
            for (std::size_t i = 0; i < versions.size(); ++i) {
                const auto versioned = p.stem().string() + ".v" + std::to_string(i + 1) +
                                       p.extension().string();
                write_payload(dir / versioned, versions[i].payload);
            }
        }
    }
}

std::vector<std::string> Plan::ids() const {
    std::vector<std::string> out;
    out.reserve(modules.size());
    for (const auto& m : modules) out.push_back(m.id);
    return out;
}

namespace {

void validate_specs(const std::vector<ModuleSpec>& modules) {
    std::set<std::string> seen;
    for (const auto& m : modules) {
        if (m.id.empty()) {
            throw Error(Errc::InvalidModule, "module with an empty id");
        }
        if (!seen.insert(m.id).second) {
            throw Error(Errc::InvalidModule, "duplicate module id " + m.id);
        }
        if (m.deps.count(m.id) != 0 || m.soft_deps.count(m.id) != 0) {
            throw Error(Errc::InvalidModule, m.id + " depends on itself");
        }
        for (const auto& d : m.deps) {
            if (m.soft_deps.count(d) != 0) {
                throw Error(Errc::InvalidModule, m.id + " lists " + d + " as both hard and soft");
            }
        }
        if (!m.run) {
            throw Error(Errc::InvalidModule, m.id + " has no run procedure");
        }
    }
    for (const auto& m : modules) {
        for (const auto& d : m.deps) {
            if (seen.count(d) == 0) {
                throw Error(Errc::MissingHardDependency, m.id + " requires unknown module " + d);
            }
        }
    }
}

// Some cycle among `remaining` (nodes Kahn's algorithm could not schedule),
// following predecessor edges.
std::vector<std::string> find_cycle(const std::map<std::string, std::set<std::string>>& preds,
                                    const std::set<std::string>& remaining) {
    std::map<std::string, int> color;  // 0 white, 1 on stack, 2 done
    std::vector<std::string> stack;
    std::vector<std::string> cycle;
    std::function<bool(const std::string&)> dfs = [&](const std::string& node) {
        color[node] = 1;
        stack.push_back(node);
        for (const auto& p : preds.at(node)) {
            if (remaining.count(p) == 0) continue;
            if (color[p] == 1) {
                auto it = std::find(stack.begin(), stack.end(), p);
                cycle.assign(it, stack.end());
                cycle.push_back(p);
                return true;
            }
            if (color[p] == 0 && dfs(p)) return true;
        }
        stack.pop_back();
        color[node] = 2;
        return false;
    };
    for (const auto& n : remaining) {
        if (color[n] == 0 && dfs(n)) break;
    }
    // Walked along predecessor edges; present it in dependency order.
    std::reverse(cycle.begin(), cycle.end());
    return cycle;
}

}  // namespace

Plan resolve_order(std::vector<ModuleSpec> modules) {
    validate_specs(modules);

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < modules.size(); ++i) index[modules[i].id] = i;

    std::map<std::string, std::set<std::string>> preds;
    std::map<std::string, std::set<std::string>> succs;
    for (const auto& m : modules) {
        auto& p = preds[m.id];
        succs[m.id];
        for (const auto& d : m.deps) p.insert(d);
        for (const auto& d : m.soft_deps) {
            if (index.count(d) != 0) p.insert(d);
        }
    }
    for (const auto& [id, ps] : preds) {
        for (const auto& p : ps) succs[p].insert(id);
    }

    std::map<std::string, std::size_t> indegree;
    std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
    for (const auto& [id, ps] : preds) {
        indegree[id] = ps.size();
        if (ps.empty()) ready.push(id);
    }

    Plan plan;
    plan.modules.reserve(modules.size());
    while (!ready.empty()) {
        const std::string id = ready.top();
        ready.pop();
        plan.modules.push_back(std::move(modules[index[id]]));
        for (const auto& s : succs[id]) {
            if (--indegree[s] == 0) ready.push(s);
        }
    }

    if (plan.modules.size() != modules.size()) {
        std::set<std::string> remaining;
        for (const auto& [id, deg] : indegree) {
            if (deg > 0) remaining.insert(id);
        }
        const auto cycle = find_cycle(preds, remaining);
        std::string text;
        for (const auto& c : cycle) text += (text.empty() ? "" : " -> ") + c;
        throw Error(Errc::CycleDetected, "dependency cycle: " + text);
    }
    return plan;
}

std::string_view status_name(Status s) {
    switch (s) {
        case Status::Succeeded: return "Succeeded";
        case Status::Failed: return "Failed";
        case Status::Skipped: return "Skipped";
        case Status::NotRun: return "NotRun";
    }
    return "NotRun";
}

Status RunReport::status_of(const std::string& id) const {
    auto it = statuses.find(id);
    return it == statuses.end() ? Status::NotRun : it->second.status;
}

std::string RunReport::to_json() const {
    nlohmann::json doc;
    doc["order"] = order;
    nlohmann::json mods = nlohmann::json::object();
    for (const auto& [id, st] : statuses) {
        mods[id] = {{"status", status_name(st.status)}, {"detail", st.detail}, {"outputs", st.outputs}};
    }
    doc["modules"] = mods;
    nlohmann::json man = nlohmann::json::object();
    for (const auto& [name, entries] : manifest) {
        nlohmann::json list = nlohmann::json::array();
        for (std::size_t i = 0; i < entries.size(); ++i) {
            list.push_back({{"version", i + 1},
                            {"producer", entries[i].producer},
                            {"sequence", entries[i].sequence}});
        }
        man[name] = list;
    }
    doc["manifest"] = man;
    return doc.dump(2) + "\n";
}

RunReport execute(const Plan& plan, ArtifactStore& store) {
    RunReport report;
    for (const auto& m : plan.modules) report.statuses[m.id] = {};

    for (const auto& m : plan.modules) {
        auto& st = report.statuses[m.id];

        const auto blocked = std::find_if(m.deps.begin(), m.deps.end(), [&](const std::string& d) {
            return report.status_of(d) != Status::Succeeded;
        });
        if (blocked != m.deps.end()) {
            st.status = Status::Skipped;
            st.detail = *blocked;
            continue;
        }

        std::set<std::string> missing_soft;
        for (const auto& d : m.soft_deps) {
            if (report.status_of(d) != Status::Succeeded) missing_soft.insert(d);
        }

        report.order.push_back(m.id);
        ModuleResult result;
        try {
            const ModuleContext ctx(store, m.id, std::move(missing_soft));
            result = m.run(ctx);
        } catch (const std::exception& e) {
            st.status = Status::Failed;
            st.detail = e.what();
            continue;
        } catch (...) {
            st.status = Status::Failed;
            st.detail = "unknown failure";
            continue;
        }

        // All-or-nothing: check every output before writing any.
        std::string conflict;
        std::set<std::string> names;
        for (const auto& out : result.outputs) {
            if (!names.insert(out.name).second) {
                conflict = m.id + " emitted " + out.name + " twice";
            } else if (store.contains(out.name) && m.revises.count(out.name) == 0) {
                conflict = out.name + " was already written by " + store.latest(out.name)->producer;
            }
            if (!conflict.empty()) break;
        }
        if (!conflict.empty()) {
            st.status = Status::Failed;
            st.detail = std::string(errc_name(Errc::ArtifactConflict)) + ": " + conflict;
            continue;
        }
        for (auto& out : result.outputs) {
            store.put(out.name, std::move(out.payload), m.id, m.revises.count(out.name) != 0);
            report.manifest[out.name].push_back({m.id, store.latest(out.name)->sequence});
            st.outputs.push_back(out.name);
        }
        st.status = Status::Succeeded;
        st.detail = result.note;
    }
    return report;
}

}  // namespace ecoscapes::pipeline
