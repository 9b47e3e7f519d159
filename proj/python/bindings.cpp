#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "mhfilter/binomial.hpp"
#include "mhfilter/filter.hpp"
#include "mhfilter/harness.hpp"
#include "mhfilter/minwise.hpp"
#include "mhfilter/token_set.hpp"

namespace py = pybind11;

namespace {

mhf::TokenSet to_set(std::vector<mhf::Token> tokens) { return mhf::TokenSet::from_unsorted(std::move(tokens)); }

std::vector<std::uint64_t> to_vector(std::span<const std::uint64_t> s) { return {s.begin(), s.end()}; }

mhf::SetMap to_set_map(const std::map<mhf::SetId, std::vector<mhf::Token>>& sets) {
    mhf::SetMap out;
    for (const auto& [id, tokens] : sets) out.emplace(id, to_set(tokens));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "MinHash similarity screening with early-termination thresholds";

    m.def("exact_jaccard", [](std::vector<mhf::Token> a, std::vector<mhf::Token> b) {
        return mhf::exact_jaccard(to_set(std::move(a)), to_set(std::move(b)));
    });

    py::class_<mhf::Signature>(m, "Signature")
        .def(py::init<std::vector<std::uint64_t>, std::uint64_t, unsigned>(), py::arg("values"),
             py::arg("fingerprint"), py::arg("bits") = mhf::Signature::kFullBits)
        .def_property_readonly("values", [](const mhf::Signature& s) { return to_vector(s.values()); })
        .def_property_readonly("fingerprint", &mhf::Signature::fingerprint)
        .def_property_readonly("bits", &mhf::Signature::bits)
        .def("__len__", &mhf::Signature::size)
        .def("__eq__", [](const mhf::Signature& a, const mhf::Signature& b) { return a == b; });

    py::class_<mhf::HashFamily>(m, "HashFamily")
        .def(py::init<std::size_t, std::uint64_t>(), py::arg("k"), py::arg("master_seed"))
        .def_property_readonly("k", &mhf::HashFamily::k)
        .def_property_readonly("master_seed", &mhf::HashFamily::master_seed)
        .def_property_readonly("fingerprint", &mhf::HashFamily::fingerprint)
        .def("key", [](const mhf::HashFamily& f, std::size_t i) {
            const auto key = f.key(i);
            return py::make_tuple(key.whiten, key.inner);
        })
        .def("sign", [](const mhf::HashFamily& f, std::vector<mhf::Token> tokens) {
            return f.sign(to_set(std::move(tokens)));
        });

    m.def(
        "match_count",
        [](const mhf::Signature& a, const mhf::Signature& b, std::optional<std::size_t> upto) {
            const auto mc = upto ? mhf::match_count(a, b, *upto) : mhf::match_count(a, b);
            return py::make_tuple(mc.matches, mc.examined);
        },
        py::arg("a"), py::arg("b"), py::arg("upto") = py::none());
    m.def(
        "estimate", [](std::size_t matches, std::size_t examined) { return mhf::estimate({matches, examined}); },
        py::arg("matches"), py::arg("examined"));
    m.def("estimator_variance", &mhf::estimator_variance, py::arg("j"), py::arg("k"));
    m.def("to_b_bit", &mhf::to_b_bit, py::arg("signature"), py::arg("bits"));
    m.def("b_bit_match_probability", &mhf::b_bit_match_probability, py::arg("j"), py::arg("bits"));

    m.def("log_binom_pmf", &mhf::log_binom_pmf, py::arg("i"), py::arg("k"), py::arg("p"));
    m.def("binom_cdf", &mhf::binom_cdf, py::arg("m"), py::arg("k"), py::arg("p"));
    m.def("binom_upper_tail", &mhf::binom_upper_tail, py::arg("m"), py::arg("k"), py::arg("p"));
    m.def("solve_lower", &mhf::solve_lower, py::arg("k"), py::arg("t"), py::arg("e"));
    m.def("solve_upper", &mhf::solve_upper, py::arg("k"), py::arg("t"), py::arg("e"));

    py::class_<mhf::ThresholdRow>(m, "ThresholdRow")
        .def_readonly("k", &mhf::ThresholdRow::k)
        .def_readonly("m_lower", &mhf::ThresholdRow::m_lower)
        .def_readonly("m_upper", &mhf::ThresholdRow::m_upper)
        .def_property_readonly("lower", &mhf::ThresholdRow::lower)
        .def_property_readonly("upper", &mhf::ThresholdRow::upper);

    py::class_<mhf::ThresholdTable>(m, "ThresholdTable")
        .def_property_readonly("threshold", &mhf::ThresholdTable::threshold)
        .def_property_readonly("e_lower", &mhf::ThresholdTable::e_lower)
        .def_property_readonly("e_upper", &mhf::ThresholdTable::e_upper)
        .def_property_readonly("rows", [](const mhf::ThresholdTable& t) {
            return std::vector<mhf::ThresholdRow>(t.rows().begin(), t.rows().end());
        });

    m.def(
        "build_threshold_table",
        [](double t, double e, const std::vector<std::uint64_t>& checkpoints, std::optional<double> e_upper) {
            return mhf::build_threshold_table(t, e, e_upper.value_or(e), checkpoints);
        },
        py::arg("t"), py::arg("e"), py::arg("checkpoints"), py::arg("e_upper") = py::none());

    py::enum_<mhf::Decision>(m, "Decision")
        .value("Below", mhf::Decision::Below)
        .value("Above", mhf::Decision::Above);
    py::enum_<mhf::Resolution>(m, "Resolution")
        .value("OutputEarly", mhf::Resolution::OutputEarly)
        .value("FilteredEarly", mhf::Resolution::FilteredEarly)
        .value("Full", mhf::Resolution::Full);

    py::class_<mhf::PairOutcome>(m, "PairOutcome")
        .def_readonly("decision", &mhf::PairOutcome::decision)
        .def_readonly("resolution", &mhf::PairOutcome::resolution)
        .def_readonly("checkpoint", &mhf::PairOutcome::checkpoint)
        .def_readonly("comparisons", &mhf::PairOutcome::comparisons)
        .def_readonly("estimate", &mhf::PairOutcome::estimate)
        .def("__eq__", [](const mhf::PairOutcome& a, const mhf::PairOutcome& b) { return a == b; })
        .def("__repr__", [](const mhf::PairOutcome& o) {
            return "PairOutcome(" + std::string(mhf::to_string(o.decision)) + ", " +
                   std::string(mhf::to_string(o.resolution)) + ", checkpoint=" + std::to_string(o.checkpoint) + ")";
        });

    py::class_<mhf::ScreenConfig>(m, "ScreenConfig")
        .def(py::init<>())
        .def_readwrite("threshold", &mhf::ScreenConfig::threshold)
        .def_readwrite("e_lower", &mhf::ScreenConfig::e_lower)
        .def_readwrite("e_upper", &mhf::ScreenConfig::e_upper)
        .def_readwrite("schedule", &mhf::ScreenConfig::schedule)
        .def_readwrite("k", &mhf::ScreenConfig::k)
        .def_readwrite("master_seed", &mhf::ScreenConfig::master_seed)
        .def_readwrite("threads", &mhf::ScreenConfig::threads)
        .def("set_e", &mhf::ScreenConfig::set_e)
        .def("validate", &mhf::ScreenConfig::validate);

    m.def(
        "compare_pair",
        [](const mhf::Signature& a, const mhf::Signature& b, const mhf::ScreenConfig& cfg) {
            return mhf::compare_pair(a, b, mhf::build_threshold_table(cfg), cfg);
        },
        py::arg("a"), py::arg("b"), py::arg("config"));
    m.def("compare_full", &mhf::compare_full, py::arg("a"), py::arg("b"), py::arg("threshold"));

    py::class_<mhf::ExperimentReport>(m, "ExperimentReport")
        .def_readonly("pairs", &mhf::ExperimentReport::pairs)
        .def_readonly("total_comparisons", &mhf::ExperimentReport::total_comparisons)
        .def_readonly("baseline_comparisons", &mhf::ExperimentReport::baseline_comparisons)
        .def_readonly("full_comparisons", &mhf::ExperimentReport::full_comparisons)
        .def_readonly("above", &mhf::ExperimentReport::above)
        .def_readonly("accuracy", &mhf::ExperimentReport::accuracy)
        .def_readonly("agreement_vs_exact", &mhf::ExperimentReport::agreement_vs_exact)
        .def_property_readonly("fr_strict",
                               [](const mhf::ExperimentReport& r) {
                                   std::vector<double> out;
                                   for (const auto& f : r.fr) out.push_back(f.strict);
                                   return out;
                               })
        .def_property_readonly("fr_resolved",
                               [](const mhf::ExperimentReport& r) {
                                   std::vector<double> out;
                                   for (const auto& f : r.fr) out.push_back(f.resolved);
                                   return out;
                               })
        .def_property_readonly("comparison_ratio", &mhf::ExperimentReport::comparison_ratio);

    py::class_<mhf::ScreenRun>(m, "ScreenRun")
        .def_readonly("outcomes", &mhf::ScreenRun::outcomes)
        .def_readonly("baseline", &mhf::ScreenRun::baseline)
        .def_readonly("report", &mhf::ScreenRun::report);

    m.def(
        "run_screen",
        [](const std::map<mhf::SetId, std::vector<mhf::Token>>& sets, const mhf::PairList& pairs,
           const mhf::ScreenConfig& cfg, bool baseline) {
            const auto set_map = to_set_map(sets);
            py::gil_scoped_release release;
            return mhf::run_screen(set_map, pairs, cfg, baseline);
        },
        py::arg("sets"), py::arg("pairs"), py::arg("config"), py::arg("baseline") = false);

    // Groups are "J:count:size" or "J:count:lo-hi" strings. Returns (sets, pairs, targets).
    m.def(
        "gen_synthetic",
        [](const std::vector<std::string>& groups, std::uint64_t seed) {
            mhf::WorkloadSpec spec;
            spec.seed = seed;
            for (const auto& g : groups) spec.groups.push_back(mhf::parse_group(g));
            const auto w = mhf::gen_synthetic(spec);
            std::map<mhf::SetId, std::vector<mhf::Token>> sets;
            for (std::size_t i = 0; i < w.sets.size(); ++i) sets.emplace(i, to_vector(w.sets[i].tokens()));
            std::vector<double> targets;
            for (const auto& r : w.targets) targets.push_back(r.value());
            return py::make_tuple(sets, w.pairs, targets);
        },
        py::arg("groups"), py::arg("seed") = 42);

    m.def("parse_schedule", &mhf::parse_schedule, py::arg("text"));
}
