#include "mhfilter/filter.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "mhfilter/parallel.hpp"

namespace mhf {

std::string_view to_string(Decision d) noexcept { return d == Decision::Above ? "above" : "below"; }

std::string_view to_string(Resolution r) noexcept {
    switch (r) {
        case Resolution::OutputEarly: return "output_early";
        case Resolution::FilteredEarly: return "filtered_early";
        case Resolution::Full: return "full";
    }
    return "unknown";
}

void ScreenConfig::validate() const {
    if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
    if (!(e_lower > 0.0 && e_lower < 1.0) || !(e_upper > 0.0 && e_upper < 1.0))
        throw std::invalid_argument("small probability must lie in (0, 1)");
    if (k == 0) throw std::invalid_argument("K must be positive");
    std::uint64_t prev = 0;
    for (std::uint64_t c : schedule) {
        if (c <= prev) throw std::invalid_argument("checkpoint schedule must be strictly increasing and positive");
        prev = c;
    }
    if (prev > k)
        throw std::invalid_argument("checkpoint " + std::to_string(prev) + " exceeds K = " + std::to_string(k));
}

ThresholdTable build_threshold_table(const ScreenConfig& cfg) {
    cfg.validate();
    return build_threshold_table(cfg.threshold, cfg.e_lower, cfg.e_upper, cfg.schedule);
}

namespace {

void check_comparable(const Signature& a, const Signature& b, std::uint64_t k) {
    if (a.fingerprint() != b.fingerprint() || a.bits() != b.bits())
        throw std::invalid_argument("signatures come from different hash families");
    if (a.size() != k || b.size() != k)
        throw std::invalid_argument("signature length differs from K = " + std::to_string(k));
}

Decision decide(std::uint64_t matches, std::uint64_t k, double threshold) {
    // Ties count as above.
    const double r = static_cast<double>(matches) / static_cast<double>(k);
    return r >= threshold ? Decision::Above : Decision::Below;
}

}  // namespace

PairOutcome compare_full(const Signature& a, const Signature& b, double threshold) {
    check_comparable(a, b, a.size());
    if (a.size() == 0) throw std::invalid_argument("empty signatures");
    const MatchCount mc = match_count(a, b);
    return {decide(mc.matches, mc.examined, threshold), Resolution::Full, mc.examined, mc.examined,
            estimate(mc)};
}

PairOutcome compare_pair(const Signature& a, const Signature& b, const ThresholdTable& table,
                         const ScreenConfig& cfg) {
    const std::uint64_t k = cfg.k;
    check_comparable(a, b, k);
    if (table.last_checkpoint() > k)
        throw std::invalid_argument("threshold table reaches checkpoint " + std::to_string(table.last_checkpoint()) +
                                    " beyond K = " + std::to_string(k));
    if (table.threshold() != cfg.threshold && !table.empty())
        throw std::invalid_argument("threshold table was built for a different T");

    const auto va = a.values();
    const auto vb = b.values();
    std::uint64_t matches = 0;
    std::uint64_t pos = 0;
    for (const ThresholdRow& row : table.rows()) {
        for (; pos < row.k; ++pos) matches += va[pos] == vb[pos];
        // matches / k >= m_u / k  <=>  matches >= m_u; likewise for the lower bound.
        const double prefix_estimate = static_cast<double>(matches) / static_cast<double>(row.k);
        if (matches >= row.m_upper)
            return {Decision::Above, Resolution::OutputEarly, row.k, row.k, prefix_estimate};
        if (row.m_lower && matches <= *row.m_lower)
            return {Decision::Below, Resolution::FilteredEarly, row.k, row.k, prefix_estimate};
    }
    for (; pos < k; ++pos) matches += va[pos] == vb[pos];
    return {decide(matches, k, cfg.threshold), Resolution::Full, k, k,
            static_cast<double>(matches) / static_cast<double>(k)};
}

BatchSummary summarize(std::span<const PairOutcome> outcomes, std::span<const std::uint64_t> schedule,
                       std::uint64_t k) {
    BatchSummary s;
    s.pairs = outcomes.size();
    s.baseline_comparisons = s.pairs * k;
    s.per_checkpoint.reserve(schedule.size());
    for (std::uint64_t c : schedule) s.per_checkpoint.push_back({c, 0, 0});
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const PairOutcome& o = outcomes[i];
        s.total_comparisons += o.comparisons;
        if (o.decision == Decision::Above) s.above.push_back(i);
        if (o.resolution == Resolution::Full) {
            ++s.full_comparisons;
            continue;
        }
        auto it = std::lower_bound(s.per_checkpoint.begin(), s.per_checkpoint.end(), o.checkpoint,
                                   [](const CheckpointCounts& c, std::uint64_t v) { return c.k < v; });
        if (it == s.per_checkpoint.end() || it->k != o.checkpoint)
            throw std::invalid_argument("outcome resolved at checkpoint " + std::to_string(o.checkpoint) +
                                        " which is not in the schedule");
        if (o.resolution == Resolution::FilteredEarly)
            ++it->filtered;
        else
            ++it->output;
    }
    return s;
}

BatchResult screen_batch(const PairList& pairs, const SignatureStore& signatures, const ScreenConfig& cfg,
                         const ThresholdTable& table) {
    cfg.validate();
    std::vector<const Signature*> left(pairs.size());
    std::vector<const Signature*> right(pairs.size());
    auto lookup = [&signatures](SetId id) {
        auto it = signatures.find(id);
        if (it == signatures.end()) throw std::invalid_argument("no signature for set id " + std::to_string(id));
        return &it->second;
    };
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        left[i] = lookup(pairs[i].first);
        right[i] = lookup(pairs[i].second);
    }

    BatchResult result;
    result.outcomes.resize(pairs.size());
    parallel_for(pairs.size(), cfg.threads,
                 [&](std::size_t i) { result.outcomes[i] = compare_pair(*left[i], *right[i], table, cfg); });
    std::vector<std::uint64_t> checkpoints;
    for (const ThresholdRow& row : table.rows()) checkpoints.push_back(row.k);
    result.summary = summarize(result.outcomes, checkpoints, cfg.k);
    return result;
}

BatchResult screen_batch(const PairList& pairs, const SignatureStore& signatures, const ScreenConfig& cfg) {
    return screen_batch(pairs, signatures, cfg, build_threshold_table(cfg));
}

FilteringRate filtering_rate(std::span<const PairOutcome> outcomes, std::span<const std::uint64_t> schedule,
                             std::uint64_t k) {
    if (std::find(schedule.begin(), schedule.end(), k) == schedule.end())
        throw std::invalid_argument("checkpoint " + std::to_string(k) + " is not in the schedule");
    if (outcomes.empty()) return {};
    std::uint64_t filtered = 0;
    std::uint64_t resolved = 0;
    for (const PairOutcome& o : outcomes) {
        if (o.resolution == Resolution::Full || o.checkpoint > k) continue;
        ++resolved;
        if (o.resolution == Resolution::FilteredEarly) ++filtered;
    }
    const double n = static_cast<double>(outcomes.size());
    return {static_cast<double>(filtered) / n, static_cast<double>(resolved) / n};
}

}  // namespace mhf
