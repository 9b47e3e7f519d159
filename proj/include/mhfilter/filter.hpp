#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mhfilter/binomial.hpp"
#include "mhfilter/minwise.hpp"

namespace mhf {

enum class Decision : std::uint8_t { Below, Above };

enum class Resolution : std::uint8_t {
    OutputEarly,    // prefix estimate reached the upper threshold
    FilteredEarly,  // prefix estimate fell to the lower threshold
    Full,           // all K slots compared
};

std::string_view to_string(Decision d) noexcept;
std::string_view to_string(Resolution r) noexcept;

struct PairOutcome {
    Decision decision = Decision::Below;
    Resolution resolution = Resolution::Full;
    std::uint64_t checkpoint = 0;  // resolving checkpoint; K for Full
    std::uint64_t comparisons = 0;
    double estimate = 0.0;  // matches / comparisons at resolution

    friend bool operator==(const PairOutcome&, const PairOutcome&) = default;
};

struct ScreenConfig {
    double threshold = 0.5;
    double e_lower = 1e-5;
    double e_upper = 1e-5;
    std::vector<std::uint64_t> schedule{100, 200, 300, 400, 500, 600, 700, 800, 900};
    std::uint64_t k = 1000;
    std::uint64_t master_seed = 42;
    unsigned threads = 0;  // 0: hardware concurrency

    void set_e(double e) { e_lower = e_upper = e; }
    // Throws unless the schedule is strictly increasing, positive and <= k.
    void validate() const;
};

ThresholdTable build_threshold_table(const ScreenConfig& cfg);

// Walks the slots of a and b in order and stops at the first checkpoint whose
// prefix estimate reaches T_U (output) or falls to T_L (filter). Without an
// early stop the decision is matches / K >= T.
PairOutcome compare_pair(const Signature& a, const Signature& b, const ThresholdTable& table,
                         const ScreenConfig& cfg);

// Plain full-length comparison; the reference the filter must agree with when
// it has no checkpoints.
PairOutcome compare_full(const Signature& a, const Signature& b, double threshold);

using SetId = std::uint64_t;
using PairList = std::vector<std::pair<SetId, SetId>>;
using SignatureStore = std::unordered_map<SetId, Signature>;

struct CheckpointCounts {
    std::uint64_t k = 0;
    std::uint64_t filtered = 0;
    std::uint64_t output = 0;
};

struct BatchSummary {
    std::uint64_t pairs = 0;
    std::uint64_t total_comparisons = 0;
    std::uint64_t baseline_comparisons = 0;
    std::uint64_t full_comparisons = 0;  // pairs that ran to K
    std::vector<CheckpointCounts> per_checkpoint;
    std::vector<std::size_t> above;  // indices of pairs decided Above
};

struct BatchResult {
    std::vector<PairOutcome> outcomes;  // same order as the input pairs
    BatchSummary summary;
};

BatchResult screen_batch(const PairList& pairs, const SignatureStore& signatures, const ScreenConfig& cfg);
BatchResult screen_batch(const PairList& pairs, const SignatureStore& signatures, const ScreenConfig& cfg,
                         const ThresholdTable& table);

BatchSummary summarize(std::span<const PairOutcome> outcomes, std::span<const std::uint64_t> schedule,
                       std::uint64_t k);

struct FilteringRate {
    double strict = 0.0;    // filtered early by checkpoint k
    double resolved = 0.0;  // filtered or output early by checkpoint k
};

// Cumulative early-resolution fractions at checkpoint k. k must be in the schedule.
FilteringRate filtering_rate(std::span<const PairOutcome> outcomes, std::span<const std::uint64_t> schedule,
                             std::uint64_t k);

}  // namespace mhf
