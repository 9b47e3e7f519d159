#include "mhfilter/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mhfilter/parallel.hpp"

namespace mhf {
namespace {

std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

}  // namespace

// ---- set and pair files ------------------------------------------------------

LoadedSets parse_sets(std::istream& in) {
    LoadedSets out;
    std::string line;
    for (std::uint64_t index = 0; std::getline(in, line); ++index) {
        const std::uint64_t line_no = index + 1;
        if (!line.empty() && line[0] == '#') continue;
        if (is_blank(line)) throw std::runtime_error("line " + std::to_string(line_no) + ": empty set");
        std::vector<Token> tokens;
        for (std::string_view field : split_ws(line)) {
            auto v = parse_number<Token>(field);
            if (!v)
                throw std::runtime_error("line " + std::to_string(line_no) + ": invalid token '" +
                                         std::string(field) + "'");
            tokens.push_back(*v);
        }
        std::size_t dups = 0;
        out.sets.emplace(index, TokenSet::from_unsorted(std::move(tokens), &dups));
        out.duplicates_dropped += dups;
    }
    return out;
}

LoadedSets load_sets(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_sets(in);
}

PairList parse_pairs(std::istream& in) {
    PairList pairs;
    std::string line;
    for (std::uint64_t line_no = 1; std::getline(in, line); ++line_no) {
        if ((!line.empty() && line[0] == '#') || is_blank(line)) continue;
        const auto fields = split_ws(line);
        std::optional<SetId> a, b;
        if (fields.size() == 2) {
            a = parse_number<SetId>(fields[0]);
            b = parse_number<SetId>(fields[1]);
        }
        if (!a || !b) throw std::runtime_error("line " + std::to_string(line_no) + ": expected two set ids");
        pairs.emplace_back(*a, *b);
    }
    return pairs;
}

PairList load_pairs(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_pairs(in);
}

void write_sets(std::ostream& out, std::span<const TokenSet> sets) {
    for (const TokenSet& s : sets) {
        bool first = true;
        for (Token t : s) {
            if (!first) out << ' ';
            out << t;
            first = false;
        }
        out << '\n';
    }
}

void write_pairs(std::ostream& out, const PairList& pairs) {
    for (const auto& [a, b] : pairs) out << a << ' ' << b << '\n';
}

// ---- synthetic workloads -----------------------------------------------------

WorkloadGroup parse_group(std::string_view text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw std::invalid_argument("group must be J:count:size, got '" + std::string(text) + "'");
    WorkloadGroup g;
    const auto j = parse_number<double>(parts[0]);
    const auto count = parse_number<std::size_t>(parts[1]);
    if (!j || !count) throw std::invalid_argument("bad group '" + std::string(text) + "'");
    g.jaccard = *j;
    g.pairs = *count;
    const auto range = split(parts[2], '-');
    std::optional<std::size_t> lo, hi;
    if (range.size() == 1) {
        lo = hi = parse_number<std::size_t>(range[0]);
    } else if (range.size() == 2) {
        lo = parse_number<std::size_t>(range[0]);
        hi = parse_number<std::size_t>(range[1]);
    }
    if (!lo || !hi || *lo > *hi) throw std::invalid_argument("bad union size in group '" + std::string(text) + "'");
    g.min_union = *lo;
    g.max_union = *hi;
    return g;
}

Rational rational_for(double j) {
    if (!(j > 0.0 && j < 1.0)) throw std::invalid_argument("target Jaccard must lie in the open interval (0, 1)");
    for (std::uint64_t den = 2; den <= 10000; ++den) {
        const double num = std::round(j * static_cast<double>(den));
        if (std::abs(num / static_cast<double>(den) - j) <= 1e-9)
            return Rational::reduced(static_cast<std::uint64_t>(num), den);
    }
    throw std::invalid_argument("target Jaccard " + fmt_double(j) + " has no fraction with denominator <= 10000");
}

Workload gen_synthetic(const WorkloadSpec& spec) {
    Workload w;
    std::uint64_t rng_state = spec.seed;
    auto next_random = [&rng_state] {
        rng_state += kSplitMixGamma;
        return splitmix64_mix(rng_state);
    };
    Token next_token = 1;

    for (const WorkloadGroup& g : spec.groups) {
        const Rational target = rational_for(g.jaccard);
        const std::uint64_t c_min = (g.min_union + target.den - 1) / target.den;
        const std::uint64_t c_max = g.max_union / target.den;
        if (c_min == 0 && c_max == 0)
            throw std::invalid_argument("union size range [" + std::to_string(g.min_union) + ", " +
                                        std::to_string(g.max_union) + "] cannot hold Jaccard " +
                                        std::to_string(target.num) + "/" + std::to_string(target.den));
        const std::uint64_t lo = std::max<std::uint64_t>(c_min, 1);
        if (lo > c_max)
            throw std::invalid_argument("union size range [" + std::to_string(g.min_union) + ", " +
                                        std::to_string(g.max_union) + "] has no multiple of " +
                                        std::to_string(target.den) + " needed for Jaccard " +
                                        std::to_string(target.num) + "/" + std::to_string(target.den));
        for (std::size_t p = 0; p < g.pairs; ++p) {
            const std::uint64_t c = lo + (lo == c_max ? 0 : next_random() % (c_max - lo + 1));
            const std::uint64_t uni = target.den * c;
            const std::uint64_t shared = target.num * c;
            const std::uint64_t only_a = (uni - shared) / 2;
            const std::uint64_t only_b = uni - shared - only_a;

            // Layout: [only_a | shared | only_b] over consecutive tokens.
            std::vector<Token> a, b;
            a.reserve(only_a + shared);
            b.reserve(only_b + shared);
            for (std::uint64_t i = 0; i < only_a; ++i) a.push_back(next_token++);
            for (std::uint64_t i = 0; i < shared; ++i) {
                a.push_back(next_token);
                b.push_back(next_token++);
            }
            for (std::uint64_t i = 0; i < only_b; ++i) b.push_back(next_token++);

            const SetId id = w.sets.size();
            w.sets.emplace_back(std::move(a));
            w.sets.emplace_back(std::move(b));
            w.pairs.emplace_back(id, id + 1);
            w.targets.push_back(target);
        }
    }
    return w;
}

// ---- screening ---------------------------------------------------------------

SignatureStore sign_sets(const SetMap& sets, const HashFamily& family, unsigned threads) {
    std::vector<SetId> ids;
    std::vector<TokenSet> ordered;
    ids.reserve(sets.size());
    ordered.reserve(sets.size());
    for (const auto& [id, s] : sets) {
        ids.push_back(id);
        ordered.push_back(s);
    }
    auto sigs = family.sign_all(ordered, threads);
    SignatureStore store;
    store.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) store.emplace(ids[i], std::move(sigs[i]));
    return store;
}

SignatureStore sign_referenced(const SetMap& sets, const PairList& pairs, const HashFamily& family,
                               unsigned threads) {
    std::set<SetId> wanted;
    for (const auto& [a, b] : pairs) {
        wanted.insert(a);
        wanted.insert(b);
    }
    SetMap subset;
    for (SetId id : wanted) {
        auto it = sets.find(id);
        if (it == sets.end()) throw std::invalid_argument("pair references unknown set id " + std::to_string(id));
        subset.emplace(id, it->second);
    }
    return sign_sets(subset, family, threads);
}

ScreenRun run_screen(const SignatureStore& signatures, const PairList& pairs, const ScreenConfig& cfg,
                     bool with_baseline, const SetMap* sets) {
    const auto started = std::chrono::steady_clock::now();
    const ThresholdTable table = build_threshold_table(cfg);
    BatchResult batch = screen_batch(pairs, signatures, cfg, table);
    const auto finished = std::chrono::steady_clock::now();

    ScreenRun run;
    ExperimentReport& r = run.report;
    r.pairs = pairs.size();
    r.k = cfg.k;
    r.threshold = cfg.threshold;
    r.e_lower = cfg.e_lower;
    r.e_upper = cfg.e_upper;
    r.schedule = cfg.schedule;
    r.total_comparisons = batch.summary.total_comparisons;
    r.baseline_comparisons = batch.summary.baseline_comparisons;
    r.full_comparisons = batch.summary.full_comparisons;
    r.above = batch.summary.above.size();
    r.per_checkpoint = batch.summary.per_checkpoint;
    for (std::uint64_t k : cfg.schedule) r.fr.push_back(filtering_rate(batch.outcomes, cfg.schedule, k));
    r.wall_time_ms = std::chrono::duration<double, std::milli>(finished - started).count();

    if (with_baseline) {
        std::vector<PairOutcome> base(pairs.size());
        parallel_for(pairs.size(), cfg.threads, [&](std::size_t i) {
            base[i] = compare_full(signatures.at(pairs[i].first), signatures.at(pairs[i].second), cfg.threshold);
        });
        std::size_t agree = 0;
        for (std::size_t i = 0; i < base.size(); ++i) agree += base[i].decision == batch.outcomes[i].decision;
        r.accuracy = base.empty() ? 1.0 : static_cast<double>(agree) / static_cast<double>(base.size());
        run.baseline = std::move(base);
    }
    if (sets) {
        std::size_t agree = 0;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const Rational j = exact_jaccard_ratio(sets->at(pairs[i].first), sets->at(pairs[i].second));
            const Decision truth = j.value() >= cfg.threshold ? Decision::Above : Decision::Below;
            agree += truth == batch.outcomes[i].decision;
        }
        r.agreement_vs_exact = pairs.empty() ? 1.0 : static_cast<double>(agree) / static_cast<double>(pairs.size());
    }
    run.outcomes = std::move(batch.outcomes);
    return run;
}

ScreenRun run_screen(const SetMap& sets, const PairList& pairs, const ScreenConfig& cfg, bool with_baseline) {
    cfg.validate();
    const HashFamily family(cfg.k, cfg.master_seed);
    const SignatureStore store = sign_referenced(sets, pairs, family, cfg.threads);
    return run_screen(store, pairs, cfg, with_baseline, &sets);
}

// ---- reports -----------------------------------------------------------------

void write_outcomes_csv(std::ostream& out, const PairList& pairs, std::span<const PairOutcome> outcomes) {
    if (pairs.size() != outcomes.size()) throw std::invalid_argument("pairs and outcomes differ in length");
    out << "pair_index,id_a,id_b,decision,resolution_kind,resolution_checkpoint,comparisons_used,estimate\n";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const PairOutcome& o = outcomes[i];
        out << i << ',' << pairs[i].first << ',' << pairs[i].second << ',' << to_string(o.decision) << ','
            << to_string(o.resolution) << ',' << o.checkpoint << ',' << o.comparisons << ','
            << fmt_double(o.estimate) << '\n';
    }
}

OutcomeTable read_outcomes_csv(std::istream& in) {
    OutcomeTable table;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || is_blank(line)) continue;
        if (line.back() == '\r') line.pop_back();
        const auto f = split(line, ',');
        auto fail = [&]() -> std::runtime_error {
            return std::runtime_error("outcomes line " + std::to_string(line_no) + ": malformed row");
        };
        if (f.size() != 8) throw fail();
        const auto a = parse_number<SetId>(f[1]);
        const auto b = parse_number<SetId>(f[2]);
        const auto checkpoint = parse_number<std::uint64_t>(f[5]);
        const auto comparisons = parse_number<std::uint64_t>(f[6]);
        const auto est = parse_number<double>(f[7]);
        if (!a || !b || !checkpoint || !comparisons || !est) throw fail();
        PairOutcome o;
        if (f[3] == "above")
            o.decision = Decision::Above;
        else if (f[3] == "below")
            o.decision = Decision::Below;
        else
            throw fail();
        if (f[4] == "output_early")
            o.resolution = Resolution::OutputEarly;
        else if (f[4] == "filtered_early")
            o.resolution = Resolution::FilteredEarly;
        else if (f[4] == "full")
            o.resolution = Resolution::Full;
        else
            throw fail();
        o.checkpoint = *checkpoint;
        o.comparisons = *comparisons;
        o.estimate = *est;
        table.pairs.emplace_back(*a, *b);
        table.outcomes.push_back(o);
    }
    return table;
}

void write_report_text(std::ostream& out, const ExperimentReport& r) {
    out << "pairs                 " << r.pairs << '\n'
        << "K                     " << r.k << '\n'
        << "threshold T           " << fmt_double(r.threshold) << '\n'
        << "e (lower / upper)     " << fmt_double(r.e_lower) << " / " << fmt_double(r.e_upper) << '\n'
        << "checkpoints           " << r.schedule.size() << '\n'
        << "total comparisons     " << r.total_comparisons << '\n'
        << "baseline comparisons  " << r.baseline_comparisons << '\n'
        << "comparison ratio      " << fmt_double(r.comparison_ratio()) << '\n'
        << "full-length pairs     " << r.full_comparisons << '\n'
        << "pairs above T         " << r.above << '\n';
    if (r.accuracy) out << "accuracy vs full-K    " << fmt_double(*r.accuracy) << '\n';
    if (r.agreement_vs_exact) out << "agreement vs exact    " << fmt_double(*r.agreement_vs_exact) << '\n';
    out << "wall time (ms)        " << fmt_double(r.wall_time_ms) << '\n';
    if (!r.per_checkpoint.empty()) {
        out << "\n     k  filtered    output  FR_strict  FR_resolved\n";
        for (std::size_t i = 0; i < r.per_checkpoint.size(); ++i) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%6llu  %8llu  %8llu  %9.6f  %11.6f\n",
                          static_cast<unsigned long long>(r.per_checkpoint[i].k),
                          static_cast<unsigned long long>(r.per_checkpoint[i].filtered),
                          static_cast<unsigned long long>(r.per_checkpoint[i].output), r.fr[i].strict,
                          r.fr[i].resolved);
            out << buf;
        }
    }
}

void write_report_json(std::ostream& out, const ExperimentReport& r) {
    nlohmann::ordered_json j;
    j["pairs"] = r.pairs;
    j["k"] = r.k;
    j["threshold"] = r.threshold;
    j["e_lower"] = r.e_lower;
    j["e_upper"] = r.e_upper;
    j["schedule"] = r.schedule;
    j["total_comparisons"] = r.total_comparisons;
    j["baseline_comparisons"] = r.baseline_comparisons;
    j["comparison_ratio"] = r.comparison_ratio();
    j["full_comparisons"] = r.full_comparisons;
    j["above"] = r.above;
    j["accuracy"] = r.accuracy ? nlohmann::ordered_json(*r.accuracy) : nlohmann::ordered_json(nullptr);
    j["agreement_vs_exact"] =
        r.agreement_vs_exact ? nlohmann::ordered_json(*r.agreement_vs_exact) : nlohmann::ordered_json(nullptr);
    auto& cps = j["checkpoints"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.per_checkpoint.size(); ++i) {
        cps.push_back({{"k", r.per_checkpoint[i].k},
                       {"filtered", r.per_checkpoint[i].filtered},
                       {"output", r.per_checkpoint[i].output},
                       {"fr_strict", r.fr[i].strict},
                       {"fr_resolved", r.fr[i].resolved}});
    }
    j["wall_time_ms"] = r.wall_time_ms;
    out << j.dump(2) << '\n';
}

void report_fr_curves(std::ostream& out, std::span<const FrCurve> curves, std::span<const std::uint64_t> schedule) {
    out << "curve,k,fr_strict,fr_resolved\n";
    for (const FrCurve& c : curves) {
        if (c.outcomes.empty()) throw std::invalid_argument("curve '" + c.label + "' has no outcomes");
        for (std::uint64_t k : schedule) {
            const FilteringRate fr = filtering_rate(c.outcomes, schedule, k);
            out << c.label << ',' << k << ',' << fmt_double(fr.strict) << ',' << fmt_double(fr.resolved) << '\n';
        }
    }
}

std::vector<std::uint64_t> parse_schedule(std::string_view text) {
    std::vector<std::uint64_t> out;
    if (is_blank(text) || text == "none") return out;
    const auto range = split(text, ':');
    if (range.size() == 3) {
        const auto start = parse_number<std::uint64_t>(range[0]);
        const auto stop = parse_number<std::uint64_t>(range[1]);
        const auto step = parse_number<std::uint64_t>(range[2]);
        if (!start || !stop || !step || *step == 0 || *start == 0)
            throw std::invalid_argument("bad schedule range '" + std::string(text) + "'");
        for (std::uint64_t k = *start; k <= *stop; k += *step) out.push_back(k);
        return out;
    }
    for (std::string_view item : split(text, ',')) {
        const auto v = parse_number<std::uint64_t>(item);
        if (!v) throw std::invalid_argument("bad checkpoint '" + std::string(item) + "' in schedule");
        out.push_back(*v);
    }
    return out;
}

}  // namespace mhf
