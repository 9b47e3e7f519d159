#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "mhfilter/filter.hpp"
#include "mhfilter/harness.hpp"

using mhf::Decision;
using mhf::PairOutcome;
using mhf::Resolution;
using mhf::ScreenConfig;
using mhf::Signature;

namespace {

constexpr std::uint64_t kFp = 0xabcdef;

// Signature pair of length k whose slot i matches iff match(i).
template <typename Pred>
std::pair<Signature, Signature> crafted(std::size_t k, Pred match) {
    std::vector<std::uint64_t> a(k), b(k);
    for (std::size_t i = 0; i < k; ++i) {
        a[i] = 2 * i;
        b[i] = match(i) ? 2 * i : 2 * i + 1;
    }
    return {Signature(a, kFp), Signature(b, kFp)};
}

ScreenConfig config(double t, double e, std::vector<std::uint64_t> schedule, std::uint64_t k = 1000) {
    ScreenConfig cfg;
    cfg.threshold = t;
    cfg.set_e(e);
    cfg.schedule = std::move(schedule);
    cfg.k = k;
    return cfg;
}

mhf::Workload workload(std::vector<mhf::WorkloadGroup> groups, std::uint64_t seed = 42) {
    return mhf::gen_synthetic({std::move(groups), seed});
}

mhf::SignatureStore sign(const mhf::Workload& w, std::uint64_t k, std::uint64_t seed) {
    const mhf::HashFamily f(k, seed);
    const auto sigs = f.sign_all(w.sets);
    mhf::SignatureStore store;
    for (std::size_t i = 0; i < sigs.size(); ++i) store.emplace(i, sigs[i]);
    return store;
}

}  // namespace

TEST_CASE("compare_pair: 20 matches in the first 100 slots filters at k=100") {
    const auto [a, b] = crafted(1000, [](std::size_t i) { return i < 100 ? i % 5 == 0 : true; });
    const ScreenConfig cfg = config(0.5, 5.6e-10, {100});
    const auto table = mhf::build_threshold_table(cfg);
    const PairOutcome o = mhf::compare_pair(a, b, table, cfg);
    CHECK(o.resolution == Resolution::FilteredEarly);
    CHECK(o.decision == Decision::Below);
    CHECK(o.checkpoint == 100);
    CHECK(o.comparisons == 100);
    CHECK(o.estimate == doctest::Approx(0.2));
}

TEST_CASE("compare_pair: 21 matches at k=100 is not filtered") {
    const auto [a, b] = crafted(1000, [](std::size_t i) { return i < 100 ? (i % 5 == 0 || i == 1) : false; });
    const ScreenConfig cfg = config(0.5, 5.6e-10, {100});
    const PairOutcome o = mhf::compare_pair(a, b, mhf::build_threshold_table(cfg), cfg);
    CHECK(o.resolution == Resolution::Full);
    CHECK(o.comparisons == 1000);
    CHECK(o.estimate == doctest::Approx(0.021));
}

TEST_CASE("compare_pair: identical signatures output at the first checkpoint") {
    const auto [a, b] = crafted(1000, [](std::size_t) { return true; });
    const ScreenConfig cfg = config(0.5, 1e-3, mhf::parse_schedule("100:900:100"));
    const PairOutcome o = mhf::compare_pair(a, b, mhf::build_threshold_table(cfg), cfg);
    CHECK(o.resolution == Resolution::OutputEarly);
    CHECK(o.decision == Decision::Above);
    CHECK(o.checkpoint == 100);
    CHECK(o.estimate == 1.0);
}

TEST_CASE("compare_pair: boundary counts resolve inclusively") {
    // k=100, T=0.5, e=1e-3: m_l = 34, m_u = 65.
    const ScreenConfig cfg = config(0.5, 1e-3, {100});
    const auto table = mhf::build_threshold_table(cfg);
    auto with_prefix_matches = [&](std::size_t x) {
        const auto [a, b] = crafted(1000, [x](std::size_t i) { return i < x; });
        return mhf::compare_pair(a, b, table, cfg);
    };
    CHECK(with_prefix_matches(65).resolution == Resolution::OutputEarly);
    CHECK(with_prefix_matches(64).resolution == Resolution::Full);
    CHECK(with_prefix_matches(34).resolution == Resolution::FilteredEarly);
    CHECK(with_prefix_matches(35).resolution == Resolution::Full);
}

TEST_CASE("compare_pair: final tie counts as above") {
    const auto [a, b] = crafted(1000, [](std::size_t i) { return i % 2 == 0; });
    const ScreenConfig cfg = config(0.5, 1e-3, {});
    const PairOutcome o = mhf::compare_pair(a, b, mhf::build_threshold_table(cfg), cfg);
    CHECK(o.resolution == Resolution::Full);
    CHECK(o.estimate == 0.5);
    CHECK(o.decision == Decision::Above);
    CHECK(mhf::compare_full(a, b, 0.5) == o);
}

TEST_CASE("compare_pair errors") {
    const auto [a, b] = crafted(1000, [](std::size_t) { return true; });
    ScreenConfig cfg = config(0.5, 1e-3, {100});
    const auto table = mhf::build_threshold_table(cfg);
    const Signature other({1, 2, 3}, kFp);
    CHECK_THROWS_AS(mhf::compare_pair(a, other, table, cfg), std::invalid_argument);
    const Signature foreign(std::vector<std::uint64_t>(a.values().begin(), a.values().end()), kFp + 1);
    CHECK_THROWS_AS(mhf::compare_pair(a, foreign, table, cfg), std::invalid_argument);

    // Table built for a schedule beyond K.
    const auto wide = mhf::build_threshold_table(0.5, 1e-3, std::vector<std::uint64_t>{100, 2000});
    CHECK_THROWS_AS(mhf::compare_pair(a, b, wide, cfg), std::invalid_argument);

    cfg.schedule = {100, 1200};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_THROWS_AS(mhf::build_threshold_table(cfg), std::invalid_argument);
}

TEST_CASE("compare_pair agrees with the full reference on mid-similarity pairs") {
    // Pairs at J = 0.5 and T = 0.5 rarely leave the band between the
    // thresholds; when they run to K the decision must equal the reference.
    const auto w = workload({{0.5, 400, 100, 100}});
    const auto store = sign(w, 1000, 3);
    const ScreenConfig cfg = config(0.5, 1e-10, mhf::parse_schedule("100:900:100"));
    const auto table = mhf::build_threshold_table(cfg);
    std::size_t full = 0;
    for (const auto& [ia, ib] : w.pairs) {
        const PairOutcome o = mhf::compare_pair(store.at(ia), store.at(ib), table, cfg);
        const PairOutcome ref = mhf::compare_full(store.at(ia), store.at(ib), 0.5);
        if (o.resolution == Resolution::Full) {
            ++full;
            CHECK(o == ref);
        }
    }
    CHECK(full >= 0.99 * static_cast<double>(w.pairs.size()));
}

TEST_CASE("screen_batch: duplicates, empty batches, missing ids") {
    const mhf::HashFamily f(1000, 1);
    mhf::SignatureStore store;
    store.emplace(0, f.sign({1, 2, 3, 4, 5}));
    store.emplace(1, f.sign({1, 2, 3, 4, 5}));
    const ScreenConfig cfg = config(0.5, 1e-3, mhf::parse_schedule("100:900:100"));

    const mhf::PairList dupes(25, {0, 1});
    const auto r = mhf::screen_batch(dupes, store, cfg);
    CHECK(r.outcomes.size() == 25);
    for (const auto& o : r.outcomes) CHECK(o.resolution == Resolution::OutputEarly);
    CHECK(r.summary.total_comparisons == 25 * 100);
    CHECK(r.summary.per_checkpoint.front().output == 25);
    CHECK(r.summary.above.size() == 25);

    const auto empty = mhf::screen_batch({}, store, cfg);
    CHECK(empty.outcomes.empty());
    CHECK(empty.summary.total_comparisons == 0);

    CHECK_THROWS_WITH_AS(mhf::screen_batch({{0, 7}}, store, cfg), doctest::Contains("7"), std::invalid_argument);
}

TEST_CASE("screen_batch output is independent of thread count") {
    const auto w = workload({{0.1, 60, 50, 50}, {0.5, 60, 50, 50}, {0.9, 60, 50, 50}});
    const auto store = sign(w, 1000, 9);
    ScreenConfig cfg = config(0.5, 1e-3, mhf::parse_schedule("100:900:100"));
    cfg.threads = 1;
    const auto serial = mhf::screen_batch(w.pairs, store, cfg);
    cfg.threads = 4;
    const auto parallel = mhf::screen_batch(w.pairs, store, cfg);
    CHECK(serial.outcomes == parallel.outcomes);
    CHECK(serial.summary.total_comparisons == parallel.summary.total_comparisons);
}

TEST_CASE("mixed batch spends under half the baseline comparisons") {
    const auto w = workload({{0.1, 300, 50, 50}, {0.5, 300, 50, 50}, {0.9, 300, 50, 50}});
    const auto store = sign(w, 1000, 42);
    const ScreenConfig cfg = config(0.5, 1e-3, mhf::parse_schedule("100:900:100"));
    const auto r = mhf::screen_batch(w.pairs, store, cfg);
    CHECK(r.summary.baseline_comparisons == 900 * 1000);
    CHECK(r.summary.total_comparisons < r.summary.baseline_comparisons / 2);
    for (const auto& o : r.outcomes) CHECK(o.comparisons <= 1000);
}

TEST_CASE("outcome invariants") {
    const auto w = workload({{0.2, 200, 60, 60}, {0.5, 200, 60, 60}, {0.8, 200, 60, 60}});
    const auto store = sign(w, 1000, 5);
    const ScreenConfig cfg = config(0.5, 1e-4, mhf::parse_schedule("100:900:100"));
    const auto table = mhf::build_threshold_table(cfg);
    const auto r = mhf::screen_batch(w.pairs, store, cfg, table);
    for (const PairOutcome& o : r.outcomes) {
        switch (o.resolution) {
            case Resolution::OutputEarly: {
                CHECK(o.decision == Decision::Above);
                const auto& row = table.rows()[o.checkpoint / 100 - 1];
                CHECK(o.estimate >= row.upper());
                break;
            }
            case Resolution::FilteredEarly: {
                CHECK(o.decision == Decision::Below);
                const auto& row = table.rows()[o.checkpoint / 100 - 1];
                REQUIRE(row.m_lower);
                CHECK(o.estimate <= *row.lower());
                break;
            }
            case Resolution::Full:
                CHECK(o.comparisons == 1000);
                CHECK((o.decision == Decision::Above) == (o.estimate >= 0.5));
                break;
        }
    }
}

TEST_CASE("degenerate filter: empty schedule reproduces full-K decisions bit for bit") {
    const auto w = workload({{0.3, 200, 40, 80}, {0.5, 200, 40, 80}, {0.7, 200, 40, 80}});
    const auto store = sign(w, 1000, 77);
    const ScreenConfig cfg = config(0.5, 1e-3, {});
    const auto r = mhf::screen_batch(w.pairs, store, cfg);
    for (std::size_t i = 0; i < w.pairs.size(); ++i)
        CHECK(r.outcomes[i] == mhf::compare_full(store.at(w.pairs[i].first), store.at(w.pairs[i].second), 0.5));
    CHECK(r.summary.total_comparisons == r.summary.baseline_comparisons);
}

TEST_CASE("resolution set shrinks as e shrinks") {
    const auto w = workload({{0.2, 150, 60, 60}, {0.4, 150, 60, 60}, {0.6, 150, 60, 60}, {0.8, 150, 60, 60}});
    const auto store = sign(w, 1000, 8);
    const auto sched = mhf::parse_schedule("100:900:100");
    const double es[] = {1e-12, 1e-8, 1e-5, 1e-3, 1e-2};
    std::vector<std::vector<PairOutcome>> runs;
    for (double e : es) runs.push_back(mhf::screen_batch(w.pairs, store, config(0.5, e, sched)).outcomes);
    for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
        for (std::size_t i = 0; i < w.pairs.size(); ++i) {
            const auto& tight = runs[r][i];
            const auto& loose = runs[r + 1][i];
            if (tight.resolution != Resolution::Full) {
                CHECK(loose.resolution != Resolution::Full);
                CHECK(loose.checkpoint <= tight.checkpoint);
            }
        }
    }
}

TEST_CASE("filtering_rate") {
    const std::vector<std::uint64_t> sched{100, 200};
    std::vector<PairOutcome> all_filtered(10, {Decision::Below, Resolution::FilteredEarly, 100, 100, 0.1});
    CHECK(mhf::filtering_rate(all_filtered, sched, 100).strict == 1.0);
    CHECK(mhf::filtering_rate(all_filtered, sched, 100).resolved == 1.0);

    std::vector<PairOutcome> none(4, {Decision::Above, Resolution::Full, 1000, 1000, 0.6});
    for (std::uint64_t k : sched) {
        CHECK(mhf::filtering_rate(none, sched, k).strict == 0.0);
        CHECK(mhf::filtering_rate(none, sched, k).resolved == 0.0);
    }

    std::vector<PairOutcome> mixed{{Decision::Below, Resolution::FilteredEarly, 100, 100, 0.1},
                                   {Decision::Above, Resolution::OutputEarly, 100, 100, 0.9},
                                   {Decision::Below, Resolution::FilteredEarly, 200, 200, 0.2},
                                   {Decision::Above, Resolution::Full, 1000, 1000, 0.5}};
    CHECK(mhf::filtering_rate(mixed, sched, 100).strict == 0.25);
    CHECK(mhf::filtering_rate(mixed, sched, 100).resolved == 0.5);
    CHECK(mhf::filtering_rate(mixed, sched, 200).strict == 0.5);
    CHECK(mhf::filtering_rate(mixed, sched, 200).resolved == 0.75);
    CHECK_THROWS_AS(mhf::filtering_rate(mixed, sched, 150), std::invalid_argument);
}

TEST_CASE("filtering rate grows with e on a low-similarity batch") {
    const auto w = workload({{0.1, 400, 50, 50}});
    const auto store = sign(w, 1000, 4);
    const auto sched = mhf::parse_schedule("100:900:100");
    const auto loose = mhf::screen_batch(w.pairs, store, config(0.3, 1e-3, sched)).outcomes;
    const auto tight = mhf::screen_batch(w.pairs, store, config(0.3, 1e-10, sched)).outcomes;
    const double fr_loose = mhf::filtering_rate(loose, sched, 100).strict;
    const double fr_tight = mhf::filtering_rate(tight, sched, 100).strict;
    CHECK(fr_loose > 0.9);
    CHECK(fr_loose > fr_tight);
    double prev = 0.0;
    for (std::uint64_t k : sched) {
        const double fr = mhf::filtering_rate(tight, sched, k).strict;
        CHECK(fr >= prev);
        prev = fr;
    }
}
