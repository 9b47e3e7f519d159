// Command-line front end: workload generation, signing, screening and reports.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mhfilter/binomial.hpp"
#include "mhfilter/filter.hpp"
#include "mhfilter/harness.hpp"
#include "mhfilter/signature_cache.hpp"

namespace {

std::ofstream open_output(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

// Writes through `fn` to `path`, or to stdout when path is empty or "-".
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    auto out = open_output(path);
    fn(out);
    if (!out) throw std::runtime_error("failed writing " + path);
}

void add_screen_knobs(CLI::App* cmd, mhf::ScreenConfig& cfg, std::string& schedule, std::optional<double>& e,
                      std::optional<double>& e_upper) {
    cmd->add_option("--threshold,-t", cfg.threshold, "Similarity threshold T in (0,1)")->capture_default_str();
    cmd->add_option("--e", e, "Small probability e (lower tail, and upper unless --e-upper)");
    cmd->add_option("--e-upper", e_upper, "Separate small probability for the upper threshold");
    cmd->add_option("--schedule", schedule, "Checkpoints: '100,200,...' or 'start:stop:step'; 'none' disables")
        ->capture_default_str();
}

void apply_e(mhf::ScreenConfig& cfg, const std::optional<double>& e, const std::optional<double>& e_upper) {
    if (e) cfg.set_e(*e);
    if (e_upper) cfg.e_upper = *e_upper;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MinHash similarity screening with early-terminating binomial thresholds"};
    app.require_subcommand(1);

    // gen
    std::vector<std::string> groups;
    std::uint64_t gen_seed = 42;
    std::string sets_out = "sets.txt";
    std::string pairs_out = "pairs.txt";
    auto* gen = app.add_subcommand("gen", "Generate a synthetic pair workload with exact Jaccard targets");
    gen->add_option("--group", groups, "J:count:size or J:count:lo-hi (union size); repeatable")->required();
    gen->add_option("--seed", gen_seed, "Seed for union-size selection")->capture_default_str();
    gen->add_option("--sets-out", sets_out, "Output sets file")->capture_default_str();
    gen->add_option("--pairs-out", pairs_out, "Output pairs file")->capture_default_str();

    // sign
    std::string sign_sets_path;
    std::string sign_out;
    std::uint64_t sign_k = 1000;
    std::uint64_t sign_seed = 42;
    unsigned sign_bits = 64;
    auto* sign = app.add_subcommand("sign", "Compute MinHash signatures into a binary cache");
    sign->add_option("--sets", sign_sets_path, "Sets file")->required();
    sign->add_option("--k", sign_k, "Signature length K")->capture_default_str();
    sign->add_option("--seed", sign_seed, "Master seed of the hash family")->capture_default_str();
    sign->add_option("--bits", sign_bits, "Keep the lowest b bits per slot (1-32, or 64)")->capture_default_str();
    sign->add_option("--out", sign_out, "Cache file")->required();

    // screen
    mhf::ScreenConfig screen_cfg;
    std::string screen_schedule = "100:900:100";
    std::optional<double> screen_e, screen_e_upper;
    std::string screen_sets, screen_cache, screen_pairs, screen_out, screen_report, screen_json;
    bool screen_baseline = false;
    auto* screen = app.add_subcommand("screen", "Screen pairs against threshold T with early termination");
    auto* sets_opt = screen->add_option("--sets", screen_sets, "Sets file (signed on the fly)");
    auto* cache_opt = screen->add_option("--cache", screen_cache, "Signature cache from `sign`");
    sets_opt->excludes(cache_opt);
    screen->add_option("--pairs", screen_pairs, "Pairs file")->required();
    add_screen_knobs(screen, screen_cfg, screen_schedule, screen_e, screen_e_upper);
    screen->add_option("--k", screen_cfg.k, "Signature length K (with --sets)")->capture_default_str();
    screen->add_option("--seed", screen_cfg.master_seed, "Master seed (with --sets)")->capture_default_str();
    screen->add_option("--threads", screen_cfg.threads, "Worker threads, 0 = all cores")->capture_default_str();
    screen->add_flag("--baseline", screen_baseline, "Also run the full-K comparison and report accuracy");
    screen->add_option("--out", screen_out, "Outcome CSV")->required();
    screen->add_option("--report", screen_report, "Text report (default: stdout)");
    screen->add_option("--report-json", screen_json, "Structured report");

    // thresholds
    mhf::ScreenConfig thr_cfg;
    std::string thr_schedule = "100:900:100";
    std::optional<double> thr_e, thr_e_upper;
    std::string thr_out;
    auto* thresholds = app.add_subcommand("thresholds", "Print the per-checkpoint threshold table as CSV");
    add_screen_knobs(thresholds, thr_cfg, thr_schedule, thr_e, thr_e_upper);
    thresholds->add_option("--out", thr_out, "Output CSV (default: stdout)");

    // fr
    std::vector<std::string> fr_outcomes, fr_labels;
    std::string fr_schedule = "100:900:100";
    std::string fr_out;
    auto* fr = app.add_subcommand("fr", "Filtering-rate curves from one or more outcome CSVs");
    fr->add_option("--outcomes", fr_outcomes, "Outcome CSV from `screen`; repeatable")->required();
    fr->add_option("--label", fr_labels, "Curve label per --outcomes (default: file path)");
    fr->add_option("--schedule", fr_schedule, "Checkpoints the outcomes were screened with")->capture_default_str();
    fr->add_option("--out", fr_out, "Output CSV (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            mhf::WorkloadSpec spec;
            spec.seed = gen_seed;
            for (const auto& g : groups) spec.groups.push_back(mhf::parse_group(g));
            const mhf::Workload w = mhf::gen_synthetic(spec);
            emit(sets_out, [&](std::ostream& o) { mhf::write_sets(o, w.sets); });
            emit(pairs_out, [&](std::ostream& o) { mhf::write_pairs(o, w.pairs); });
            std::cerr << "generated " << w.pairs.size() << " pairs over " << w.sets.size() << " sets\n";
        } else if (*sign) {
            const mhf::LoadedSets loaded = mhf::load_sets(sign_sets_path);
            if (loaded.duplicates_dropped)
                std::cerr << "warning: dropped " << loaded.duplicates_dropped << " duplicate tokens\n";
            const mhf::HashFamily family(sign_k, sign_seed);
            const mhf::SignatureStore store = mhf::sign_sets(loaded.sets, family);
            mhf::SignatureCache cache{sign_k, sign_seed, sign_bits, {}};
            for (const auto& [id, _] : loaded.sets) cache.entries.emplace_back(id, mhf::to_b_bit(store.at(id), sign_bits));
            auto out = open_output(sign_out, true);
            mhf::write_signature_cache(out, cache);
            std::cerr << "signed " << cache.entries.size() << " sets\n";
        } else if (*screen) {
            if (screen_sets.empty() == screen_cache.empty())
                throw std::invalid_argument("screen needs exactly one of --sets or --cache");
            screen_cfg.schedule = mhf::parse_schedule(screen_schedule);
            apply_e(screen_cfg, screen_e, screen_e_upper);
            const mhf::PairList pairs = mhf::load_pairs(screen_pairs);
            mhf::ScreenRun run;
            if (!screen_sets.empty()) {
                const mhf::LoadedSets loaded = mhf::load_sets(screen_sets);
                if (loaded.duplicates_dropped)
                    std::cerr << "warning: dropped " << loaded.duplicates_dropped << " duplicate tokens\n";
                run = mhf::run_screen(loaded.sets, pairs, screen_cfg, screen_baseline);
            } else {
                std::ifstream in(screen_cache, std::ios::binary);
                if (!in) throw std::runtime_error("cannot open " + screen_cache);
                const mhf::SignatureCache cache = mhf::read_signature_cache(in);
                screen_cfg.k = cache.k;
                screen_cfg.master_seed = cache.master_seed;
                run = mhf::run_screen(cache.to_store(), pairs, screen_cfg, screen_baseline);
            }
            emit(screen_out, [&](std::ostream& o) { mhf::write_outcomes_csv(o, pairs, run.outcomes); });
            emit(screen_report, [&](std::ostream& o) { mhf::write_report_text(o, run.report); });
            if (!screen_json.empty())
                emit(screen_json, [&](std::ostream& o) { mhf::write_report_json(o, run.report); });
        } else if (*thresholds) {
            thr_cfg.schedule = mhf::parse_schedule(thr_schedule);
            apply_e(thr_cfg, thr_e, thr_e_upper);
            thr_cfg.k = thr_cfg.schedule.empty() ? 1 : thr_cfg.schedule.back();
            const mhf::ThresholdTable table = mhf::build_threshold_table(thr_cfg);
            emit(thr_out, [&](std::ostream& o) { mhf::write_threshold_csv(o, table); });
        } else if (*fr) {
            if (!fr_labels.empty() && fr_labels.size() != fr_outcomes.size())
                throw std::invalid_argument("--label must be given once per --outcomes");
            const auto schedule = mhf::parse_schedule(fr_schedule);
            std::vector<mhf::FrCurve> curves;
            for (std::size_t i = 0; i < fr_outcomes.size(); ++i) {
                std::ifstream in(fr_outcomes[i]);
                if (!in) throw std::runtime_error("cannot open " + fr_outcomes[i]);
                curves.push_back({fr_labels.empty() ? fr_outcomes[i] : fr_labels[i],
                                  mhf::read_outcomes_csv(in).outcomes});
            }
            emit(fr_out, [&](std::ostream& o) { mhf::report_fr_curves(o, curves, schedule); });
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
