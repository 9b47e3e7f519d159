#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mhfilter/filter.hpp"
#include "mhfilter/token_set.hpp"

namespace mhf {

using SetMap = std::map<SetId, TokenSet>;

// ---- set and pair files ----------------------------------------------------

struct LoadedSets {
    SetMap sets;
    std::size_t duplicates_dropped = 0;
};

// One set per line as whitespace-separated decimal tokens. The set id is the
// 0-based physical line index; lines starting with '#' are skipped. Blank data
// lines are rejected.
LoadedSets parse_sets(std::istream& in);
LoadedSets load_sets(const std::filesystem::path& path);

// One pair per line: two set ids. Blank and '#' lines are skipped.
PairList parse_pairs(std::istream& in);
PairList load_pairs(const std::filesystem::path& path);

void write_sets(std::ostream& out, std::span<const TokenSet> sets);
void write_pairs(std::ostream& out, const PairList& pairs);

// ---- synthetic workloads -----------------------------------------------------

struct WorkloadGroup {
    double jaccard = 0.5;
    std::size_t pairs = 0;
    std::size_t min_union = 100;
    std::size_t max_union = 100;
};

struct WorkloadSpec {
    std::vector<WorkloadGroup> groups;
    std::uint64_t seed = 42;
};

struct Workload {
    std::vector<TokenSet> sets;    // pair i uses sets 2i and 2i+1
    PairList pairs;
    std::vector<Rational> targets;  // exact Jaccard of each pair
};

// Parses "J:count:size" or "J:count:lo-hi" (size = union size of a pair).
WorkloadGroup parse_group(std::string_view text);

// Smallest-denominator fraction within 1e-9 of j; throws if none with
// denominator <= 10000 exists.
Rational rational_for(double j);

// Builds each pair from a fresh run of consecutive tokens: with target a/b and
// union size u = b*c, the pair shares a*c tokens and splits the rest between
// the two sides, so the Jaccard equals the target exactly.
Workload gen_synthetic(const WorkloadSpec& spec);

// ---- screening ---------------------------------------------------------------

struct ExperimentReport {
    std::uint64_t pairs = 0;
    std::uint64_t k = 0;
    double threshold = 0.0;
    double e_lower = 0.0;
    double e_upper = 0.0;
    std::vector<std::uint64_t> schedule;
    std::uint64_t total_comparisons = 0;
    std::uint64_t baseline_comparisons = 0;
    std::uint64_t full_comparisons = 0;
    std::uint64_t above = 0;
    std::vector<CheckpointCounts> per_checkpoint;
    std::vector<FilteringRate> fr;  // parallel to schedule
    std::optional<double> accuracy;            // vs. full-K MinHash decisions
    std::optional<double> agreement_vs_exact;  // vs. exact Jaccard >= T
    double wall_time_ms = 0.0;

    double comparison_ratio() const {
        return baseline_comparisons == 0 ? 0.0
                                         : static_cast<double>(total_comparisons) /
                                               static_cast<double>(baseline_comparisons);
    }
};

struct ScreenRun {
    std::vector<PairOutcome> outcomes;
    std::optional<std::vector<PairOutcome>> baseline;
    ExperimentReport report;
};

// Screens pre-computed signatures. `sets`, when given, enables the exact-Jaccard
// agreement figure; `with_baseline` runs the full-K comparison for accuracy.
ScreenRun run_screen(const SignatureStore& signatures, const PairList& pairs, const ScreenConfig& cfg,
                     bool with_baseline, const SetMap* sets = nullptr);

// Signs every referenced set with (cfg.k, cfg.master_seed) and screens.
ScreenRun run_screen(const SetMap& sets, const PairList& pairs, const ScreenConfig& cfg, bool with_baseline);

SignatureStore sign_sets(const SetMap& sets, const HashFamily& family, unsigned threads = 0);
SignatureStore sign_referenced(const SetMap& sets, const PairList& pairs, const HashFamily& family,
                               unsigned threads = 0);

// ---- reports -----------------------------------------------------------------

// Columns: pair_index,id_a,id_b,decision,resolution_kind,resolution_checkpoint,
// comparisons_used,estimate.
void write_outcomes_csv(std::ostream& out, const PairList& pairs, std::span<const PairOutcome> outcomes);

struct OutcomeTable {
    PairList pairs;
    std::vector<PairOutcome> outcomes;
};
OutcomeTable read_outcomes_csv(std::istream& in);

void write_report_text(std::ostream& out, const ExperimentReport& report);
void write_report_json(std::ostream& out, const ExperimentReport& report);

struct FrCurve {
    std::string label;
    std::vector<PairOutcome> outcomes;
};

// Columns: curve,k,fr_strict,fr_resolved; one row per checkpoint per curve.
void report_fr_curves(std::ostream& out, std::span<const FrCurve> curves, std::span<const std::uint64_t> schedule);

// "100,200,300" or "100:900:100" (start:stop:step, inclusive). Empty string or
// "none" is an empty schedule.
std::vector<std::uint64_t> parse_schedule(std::string_view text);

}  // namespace mhf
