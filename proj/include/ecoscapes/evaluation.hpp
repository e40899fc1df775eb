#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ecoscapes::evaluation {

enum class Target { EcoScapesReport, AdaptationStrategy };
enum class Criterion { Correctness, DepthCoverage, Usability, Relevancy };
enum class System { CC, CCEcoScapes, EcoScapes };

std::string_view criterion_name(Criterion c);
std::string_view system_name(System s);  // "CC", "CC+EcoScapes", "EcoScapes"
std::optional<Criterion> parse_criterion(std::string_view text);
std::optional<System> parse_system(std::string_view text);

struct Rubric {
    Target target;
    std::vector<Criterion> criteria;
};

const Rubric& rubric(Target target);
// Reports are graded on the EcoScapes rubric, strategies on the other one.
Target target_of(System system);
bool applies(System system, Criterion criterion);
// Short label for score `value` (0-5) of `criterion` under `target`.
std::string_view level_description(Target target, Criterion criterion, int value);

struct ScoreRecord {
    std::string location;
    System system = System::CC;
    Criterion criterion = Criterion::Correctness;
    int run_index = 1;  // 1-based
    int value = 0;      // 0..5

    bool same_key(const ScoreRecord& o) const {
        return location == o.location && system == o.system && criterion == o.criterion &&
               run_index == o.run_index;
    }
    bool operator==(const ScoreRecord&) const = default;
};

inline constexpr std::string_view kCsvHeader = "location,system,criterion,run_index,value";

// Rubric scores kept as CSV. A store bound to a file appends each new
// record to it.
class ScoreStore {
public:
    ScoreStore() = default;

    /// Reads `path` (an absent file gives an empty store) and binds to it.
    static ScoreStore open(const std::filesystem::path& path);
    static ScoreStore parse(std::string_view csv);

    /// Validates and stores `record`. Re-inserting an identical record is a
    /// no-op; OutOfRange for bad values or criteria, DuplicateKey when the
    /// key exists with a different value.
    void record(const ScoreRecord& record);

    const std::vector<ScoreRecord>& records() const { return records_; }
    bool empty() const { return records_.empty(); }
    /// Values for one (location, system, criterion), ordered by run index.
    std::vector<int> values(std::string_view location, System system, Criterion criterion) const;

    std::string to_csv() const;
    void save(const std::filesystem::path& path) const;

private:
    bool insert(const ScoreRecord& record);  // false when already present

    std::vector<ScoreRecord> records_;
    std::optional<std::filesystem::path> path_;
};

void record_score(ScoreStore& store, const ScoreRecord& record);

struct FiveNumberSummary {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    bool operator==(const FiveNumberSummary&) const = default;
};

/// Tukey hinges: q1 and q3 are the medians of the lower and upper halves,
/// the overall median excluded when n is odd. Throws EmptyInput.
FiveNumberSummary summarize(std::span<const int> scores);

struct SystemSummary {
    System system;
    std::size_t count = 0;
    FiveNumberSummary summary;
};

/// One summary per system. Without `systems`, every system holding scores
/// for (location, criterion) is compared. Throws NoData naming a requested
/// system without scores, or when nothing matches.
std::vector<SystemSummary> compare_systems(const ScoreStore& store, std::string_view location,
                                           Criterion criterion,
                                           std::optional<std::vector<System>> systems = std::nullopt);

std::string format_comparison(std::string_view location, Criterion criterion,
                              const std::vector<SystemSummary>& rows);

}  // namespace ecoscapes::evaluation
