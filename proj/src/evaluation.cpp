#include "ecoscapes/evaluation.hpp"

#include "ecoscapes/error.hpp"
#include "ecoscapes/image.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ecoscapes::evaluation {

std::string_view criterion_name(Criterion c) {
    switch (c) {
        case Criterion::Correctness: return "Correctness";
        case Criterion::DepthCoverage: return "DepthCoverage";
        case Criterion::Usability: return "Usability";
        case Criterion::Relevancy: return "Relevancy";
    }
    return "Correctness";
}

std::string_view system_name(System s) {
    switch (s) {
        case System::CC: return "CC";
        case System::CCEcoScapes: return "CC+EcoScapes";
        case System::EcoScapes: return "EcoScapes";
    }
    return "CC";
}

std::optional<Criterion> parse_criterion(std::string_view text) {
    for (auto c : {Criterion::Correctness, Criterion::DepthCoverage, Criterion::Usability,
                   Criterion::Relevancy}) {
        if (criterion_name(c) == text) return c;
    }
    return std::nullopt;
}

std::optional<System> parse_system(std::string_view text) {
    for (auto s : {System::CC, System::CCEcoScapes, System::EcoScapes}) {
        if (system_name(s) == text) return s;
    }
    return std::nullopt;
}

const Rubric& rubric(Target target) {
    static const Rubric report{Target::EcoScapesReport,
                               {Criterion::Correctness, Criterion::DepthCoverage}};
    static const Rubric strategy{Target::AdaptationStrategy,
                                 {Criterion::Usability, Criterion::Correctness, Criterion::Relevancy}};
    return target == Target::EcoScapesReport ? report : strategy;
}

Target target_of(System system) {
    return system == System::EcoScapes ? Target::EcoScapesReport : Target::AdaptationStrategy;
}

bool applies(System system, Criterion criterion) {
    const auto& r = rubric(target_of(system));
    return std::find(r.criteria.begin(), r.criteria.end(), criterion) != r.criteria.end();
}

std::string_view level_description(Target target, Criterion criterion, int value) {
    using Levels = std::array<std::string_view, 6>;
    static constexpr Levels kReportCorrectness = {
        "Massive mistakes", "Major mistakes in one part of the analysis", "Medium mistakes",
        "Many smaller mistakes", "Few smaller mistakes", "No mistakes"};
    static constexpr Levels kReportDepth = {
        "Skips most sections or gives too vague info",
        "Skips a major section needed for the location",
        "Covers all important sections, omits key details",
        "Covers all important sections, medium depth",
        "Covers all important sections, some vagueness",
        "Detailed coverage of all important sections"};
    static constexpr Levels kUsability = {
        "Too vague or generic to be helpful",      "General suggestions with little detail",
        "Basic, practical suggestions, no creativity", "Detailed but lacks practical aspects",
        "Detailed, some alterations needed",       "Detailed, creative and practical"};
    static constexpr Levels kStrategyCorrectness = {
        "Contains misinformation",      "Major factual errors",
        "Several significant inaccuracies", "Some minor inaccuracies",
        "Mostly correct, small details wrong", "Fully accurate"};
    static constexpr Levels kRelevancy = {
        "Ignores the local context",          "Mostly irrelevant to the local context",
        "Partially relevant or vague",        "Generally relevant, hard to implement",
        "Mostly relevant, minor mismatches",  "Aligned with the local context"};

    if (value < 0 || value > 5) {
        throw Error(Errc::OutOfRange, "score must be 0..5");
    }
    const auto& r = rubric(target);
    if (std::find(r.criteria.begin(), r.criteria.end(), criterion) == r.criteria.end()) {
        throw Error(Errc::OutOfRange, std::string(criterion_name(criterion)) + " is not part of this rubric");
    }
    const auto i = static_cast<std::size_t>(value);
    if (target == Target::EcoScapesReport) {
        return criterion == Criterion::Correctness ? kReportCorrectness[i] : kReportDepth[i];
    }
    switch (criterion) {
        case Criterion::Usability: return kUsability[i];
        case Criterion::Correctness: return kStrategyCorrectness[i];
        default: return kRelevancy[i];
    }
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    if (quoted) {
        throw Error(Errc::InvalidArgument, "unterminated quote on line " + std::to_string(line_no));
    }
    return fields;
}

int parse_int(const std::string& s, const char* what, std::size_t line_no) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) {
        throw Error(Errc::InvalidArgument,
                    std::string(what) + " is not an integer on line " + std::to_string(line_no));
    }
    return v;
}

void validate(const ScoreRecord& r) {
    if (r.value < 0 || r.value > 5) {
        throw Error(Errc::OutOfRange, "score " + std::to_string(r.value) + " is outside 0..5");
    }
    if (r.run_index < 1) {
        throw Error(Errc::OutOfRange, "run index must be >= 1");
    }
    if (r.location.empty()) {
        throw Error(Errc::OutOfRange, "location must not be empty");
    }
    if (!applies(r.system, r.criterion)) {
        throw Error(Errc::OutOfRange, std::string(criterion_name(r.criterion)) + " is not graded for " +
                                          std::string(system_name(r.system)));
    }
}

std::string record_line(const ScoreRecord& r) {
    return csv_field(r.location) + "," + std::string(system_name(r.system)) + "," +
           std::string(criterion_name(r.criterion)) + "," + std::to_string(r.run_index) + "," +
           std::to_string(r.value);
}

}  // namespace

ScoreStore ScoreStore::parse(std::string_view csv) {
    ScoreStore store;
    std::istringstream in{std::string(csv)};
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kCsvHeader) {
                throw Error(Errc::InvalidArgument, "score file must start with '" +
                                                       std::string(kCsvHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        const auto f = split_csv_line(line, line_no);
        if (f.size() != 5) {
            throw Error(Errc::InvalidArgument, "expected 5 fields on line " + std::to_string(line_no));
        }
        ScoreRecord r;
        r.location = f[0];
        const auto sys = parse_system(f[1]);
        const auto crit = parse_criterion(f[2]);
        if (!sys || !crit) {
            throw Error(Errc::InvalidArgument, "unknown system or criterion on line " +
                                                   std::to_string(line_no));
        }
        r.system = *sys;
        r.criterion = *crit;
        r.run_index = parse_int(f[3], "run_index", line_no);
        r.value = parse_int(f[4], "value", line_no);
        store.record(r);
    }
    return store;
}

ScoreStore ScoreStore::open(const std::filesystem::path& path) {
    ScoreStore store;
    if (std::filesystem::exists(path)) {
        const auto bytes = read_file_bytes(path);
        store = parse(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    }
    store.path_ = path;
    return store;
}

bool ScoreStore::insert(const ScoreRecord& record) {
    validate(record);
    for (const auto& existing : records_) {
        if (existing.same_key(record)) {
            if (existing.value != record.value) {
                throw Error(Errc::DuplicateKey,
                            record.location + "/" + std::string(system_name(record.system)) + "/" +
                                std::string(criterion_name(record.criterion)) + " run " +
                                std::to_string(record.run_index) + " already scored " +
                                std::to_string(existing.value));
            }
            return false;
        }
    }
    records_.push_back(record);
    return true;
}

void ScoreStore::record(const ScoreRecord& record) {
    if (!insert(record) || !path_) return;
    const bool fresh = !std::filesystem::exists(*path_) || std::filesystem::file_size(*path_) == 0;
    if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
    std::ofstream out(*path_, std::ios::app | std::ios::binary);
    if (!out) {
        records_.pop_back();
        throw Error(Errc::Io, "cannot append to " + path_->string());
    }
    if (fresh) out << kCsvHeader << "\n";
    out << record_line(record) << "\n";
}

std::vector<int> ScoreStore::values(std::string_view location, System system,
                                    Criterion criterion) const {
    std::vector<const ScoreRecord*> hits;
    for (const auto& r : records_) {
        if (r.location == location && r.system == system && r.criterion == criterion) {
            hits.push_back(&r);
        }
    }
    std::sort(hits.begin(), hits.end(),
              [](const ScoreRecord* a, const ScoreRecord* b) { return a->run_index < b->run_index; });
    std::vector<int> out;
    for (const auto* r : hits) out.push_back(r->value);
    return out;
}

std::string ScoreStore::to_csv() const {
    std::string out(kCsvHeader);
    out += "\n";
    for (const auto& r : records_) out += record_line(r) + "\n";
    return out;
}

void ScoreStore::save(const std::filesystem::path& path) const {
    const auto csv = to_csv();
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
}

void record_score(ScoreStore& store, const ScoreRecord& record) { store.record(record); }

namespace {

double median_of(std::span<const int> sorted) {
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

}  // namespace

FiveNumberSummary summarize(std::span<const int> scores) {
    if (scores.empty()) {
        throw Error(Errc::EmptyInput, "cannot summarize an empty score list");
    }
    std::vector<int> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    FiveNumberSummary s;
    s.min = sorted.front();
    s.max = sorted.back();
    s.median = median_of(sorted);
    if (n == 1) {
        s.q1 = s.q3 = s.median;
        return s;
    }
    const std::span<const int> all(sorted);
    s.q1 = median_of(all.first(n / 2));
    s.q3 = median_of(all.last(n / 2));
    return s;
}

std::vector<SystemSummary> compare_systems(const ScoreStore& store, std::string_view location,
                                           Criterion criterion,
                                           std::optional<std::vector<System>> systems) {
    if (!systems) {
        systems.emplace();
        for (auto s : {System::CC, System::CCEcoScapes, System::EcoScapes}) {
            if (!store.values(location, s, criterion).empty()) systems->push_back(s);
        }
        if (systems->empty()) {
            throw Error(Errc::NoData, "no scores for " + std::string(location) + " / " +
                                          std::string(criterion_name(criterion)));
        }
    }
    std::vector<SystemSummary> out;
    for (auto s : *systems) {
        const auto vals = store.values(location, s, criterion);
        if (vals.empty()) {
            throw Error(Errc::NoData, std::string(system_name(s)) + " has no " +
                                          std::string(criterion_name(criterion)) + " scores for " +
                                          std::string(location));
        }
        out.push_back({s, vals.size(), summarize(vals)});
    }
    return out;
}

std::string format_comparison(std::string_view location, Criterion criterion,
                              const std::vector<SystemSummary>& rows) {
    std::string out = std::string(location) + " / " + std::string(criterion_name(criterion)) + "\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-14s %3s %6s %6s %6s %6s %6s\n", "system", "n", "min", "q1",
                  "median", "q3", "max");
    out += buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-14s %3zu %6.2f %6.2f %6.2f %6.2f %6.2f\n",
                      std::string(system_name(r.system)).c_str(), r.count, r.summary.min,
                      r.summary.q1, r.summary.median, r.summary.q3, r.summary.max);
        out += buf;
    }
    return out;
}

}  // namespace ecoscapes::evaluation
