#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "mhfilter/binomial.hpp"
#include "oracles.hpp"

namespace {

bool rel_close(double got, double want, double rel) {
    if (want == 0.0) return got == 0.0;
    return std::abs(got - want) <= rel * std::abs(want);
}

}  // namespace

TEST_CASE("log_binom_pmf") {
    CHECK(mhf::log_binom_pmf(0, 10, 0.0) == 0.0);
    CHECK(mhf::log_binom_pmf(5, 10, 1.0) == -std::numeric_limits<double>::infinity());
    CHECK(mhf::log_binom_pmf(10, 10, 1.0) == 0.0);
    CHECK(mhf::log_binom_pmf(3, 10, 0.0) == -std::numeric_limits<double>::infinity());
    // C(100, 50) / 2^100 = 0.07958923738717877 (exact big-integer ratio).
    CHECK(rel_close(std::exp(mhf::log_binom_pmf(50, 100, 0.5)), 0.07958923738717877, 1e-12));
    CHECK(mhf::log_binom_pmf(50, 100, 0.5) == doctest::Approx(-2.530876403977105).epsilon(1e-13));
    CHECK_THROWS_AS(mhf::log_binom_pmf(11, 10, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(mhf::log_binom_pmf(1, 10, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(mhf::log_binom_pmf(1, 10, std::nan("")), std::invalid_argument);
}

TEST_CASE("binom_cdf printed values for k=100, p=0.5") {
    CHECK(rel_close(mhf::binom_cdf(20, 100, 0.5), 5.6e-10, 0.005));
    CHECK(rel_close(mhf::binom_cdf(10, 100, 0.5), 1.53e-17, 0.0035));
    CHECK(mhf::binom_cdf(100, 100, 0.5) == 1.0);
}

TEST_CASE("binom_upper_tail") {
    CHECK(rel_close(mhf::binom_upper_tail(80, 100, 0.5), 1.35e-10, 0.0035));
    CHECK(mhf::binom_upper_tail(100, 100, 0.5) == 0.0);
    CHECK(mhf::binom_upper_tail(7, 7, 0.3) == 0.0);
    // Binomial(100, 1/2) is symmetric: P(X > 80) = P(X <= 19).
    CHECK(rel_close(mhf::binom_upper_tail(80, 100, 0.5), mhf::binom_cdf(19, 100, 0.5), 1e-9));
    CHECK(std::abs(mhf::binom_upper_tail(19, 100, 0.5) - (1.0 - mhf::binom_cdf(19, 100, 0.5))) <= 1e-12);
}

TEST_CASE("binomial at degenerate probabilities") {
    CHECK(mhf::binom_cdf(0, 10, 0.0) == 1.0);
    CHECK(mhf::binom_upper_tail(0, 10, 0.0) == 0.0);
    CHECK(mhf::binom_cdf(9, 10, 1.0) == 0.0);
    CHECK(mhf::binom_upper_tail(9, 10, 1.0) == 1.0);
}

TEST_CASE("binom_cdf matches an exact big-integer oracle for k <= 30") {
    // p = num / 20 covers 0.05 .. 0.95 exactly in binary-unfriendly steps as well.
    for (std::uint64_t k = 1; k <= 30; ++k) {
        for (std::uint64_t num = 1; num < 20; num += 3) {
            const auto cdf = oracle::cdf_table(k, num, 20);
            const double p = static_cast<double>(num) / 20.0;
            for (std::uint64_t m = 0; m <= k; ++m) {
                const double want = oracle::to_double(cdf[m]);
                const double want_tail = oracle::to_double(oracle::BigRational(1) - cdf[m]);
                CAPTURE(k);
                CAPTURE(num);
                CAPTURE(m);
                CHECK(rel_close(mhf::binom_cdf(m, k, p), want, 1e-9));
                CHECK(rel_close(mhf::binom_upper_tail(m, k, p), want_tail, 1e-9));
            }
        }
    }
}

TEST_CASE("property: monotone tails and complement") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::uint64_t k = 1 + rng() % 1500;
        const double p = static_cast<double>(rng() % 1001) / 1000.0;
        double prev_cdf = -1.0;
        double prev_tail = 2.0;
        for (std::uint64_t m = 0; m <= k; m += 1 + k / 60) {
            const double c = mhf::binom_cdf(m, k, p);
            const double t = mhf::binom_upper_tail(m, k, p);
            CAPTURE(k);
            CAPTURE(p);
            CAPTURE(m);
            CHECK(c >= prev_cdf);
            CHECK(t <= prev_tail);
            CHECK(std::abs(c + t - 1.0) <= 1e-12);
            prev_cdf = c;
            prev_tail = t;
        }
    }
}

TEST_CASE("solve_lower") {
    const auto m = mhf::solve_lower(100, 0.5, 5.6e-10);
    REQUIRE(m.has_value());
    CHECK(*m == 20);
    // Brute-force exact scan gives m_l = 6 (CDF(6) ~ 1.6e-21, CDF(7) ~ 1.6e-20).
    CHECK(mhf::solve_lower(100, 0.5, 1e-20) == std::optional<std::uint64_t>(6));
    // CDF(0; 10, 0.9) = 1e-10 > 1e-12.
    CHECK_FALSE(mhf::solve_lower(10, 0.9, 1e-12).has_value());
    CHECK_THROWS_AS(mhf::solve_lower(0, 0.5, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(mhf::solve_lower(10, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(mhf::solve_lower(10, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("solve_upper") {
    // P(X > 80) = 1.3514e-10 exceeds 1.35e-10, so the conservative solver moves to 81.
    CHECK(mhf::solve_upper(100, 0.5, 1.35e-10) == 81);
    CHECK(mhf::solve_upper(100, 0.5, 1.3514e-10) == 80);
    // Near-certain acceptance region: exact scan gives P(X > 35) <= 0.999 < P(X > 34).
    CHECK(mhf::solve_upper(100, 0.5, 0.999) == 35);
    CHECK(mhf::solve_upper(100, 0.5, 0.999) == oracle::scan_upper(oracle::cdf_table(100, 1, 2), oracle::decimal(999, 3)));
    // Brute-force exact scan over m in [0, 100].
    CHECK(mhf::solve_upper(100, 0.3, 1e-5) == 50);
    CHECK(mhf::solve_upper(5, 0.5, 1e-9) == 5);
}

TEST_CASE("solvers agree with exact brute-force scans") {
    struct Case {
        std::uint64_t k, num, den, e_mant;
        unsigned e_exp;
    };
    const std::vector<Case> cases{{100, 1, 2, 1, 3}, {100, 3, 10, 1, 5}, {57, 7, 10, 5, 2},
                                  {200, 1, 4, 1, 10}, {30, 9, 10, 1, 12}, {400, 1, 2, 1, 3}};
    for (const Case& c : cases) {
        const auto cdf = oracle::cdf_table(c.k, c.num, c.den);
        const auto e = oracle::decimal(c.e_mant, c.e_exp);
        const double t = static_cast<double>(c.num) / static_cast<double>(c.den);
        const double ed = static_cast<double>(c.e_mant) * std::pow(10.0, -static_cast<double>(c.e_exp));
        CAPTURE(c.k);
        CAPTURE(t);
        CAPTURE(ed);
        CHECK(mhf::solve_lower(c.k, t, ed) == oracle::scan_lower(cdf, e));
        CHECK(mhf::solve_upper(c.k, t, ed) == oracle::scan_upper(cdf, e));
    }
}

TEST_CASE("threshold table") {
    const std::vector<std::uint64_t> one{100};
    const auto t1 = mhf::build_threshold_table(0.5, 5.6e-10, one);
    REQUIRE(t1.rows().size() == 1);
    CHECK(t1.rows()[0].m_lower == std::optional<std::uint64_t>(20));
    CHECK(*t1.rows()[0].lower() == doctest::Approx(0.2));

    std::vector<std::uint64_t> sched;
    for (std::uint64_t k = 100; k <= 900; k += 100) sched.push_back(k);
    const auto t = mhf::build_threshold_table(0.5, 1e-3, sched);
    REQUIRE(t.rows().size() == 9);
    // Exact scans of Binomial(k, 1/2) at e = 1e-3.
    const std::uint64_t want_l[] = {34, 77, 122, 168, 214, 261, 308, 355, 403};
    const std::uint64_t want_u[] = {65, 122, 177, 231, 285, 338, 391, 444, 496};
    for (std::size_t i = 0; i < 9; ++i) {
        const auto& row = t.rows()[i];
        CAPTURE(row.k);
        REQUIRE(row.m_lower);
        CHECK(*row.m_lower == want_l[i]);
        CHECK(row.m_upper == want_u[i]);
        CHECK(mhf::binom_cdf(*row.m_lower, row.k, 0.5) <= 1e-3);
        CHECK(mhf::binom_cdf(*row.m_lower + 1, row.k, 0.5) > 1e-3);
        CHECK(mhf::binom_upper_tail(row.m_upper, row.k, 0.5) <= 1e-3);
        CHECK(mhf::binom_upper_tail(row.m_upper - 1, row.k, 0.5) > 1e-3);
        CHECK(*row.lower() <= 0.5);
        CHECK(row.upper() >= 0.5);
    }

    CHECK(mhf::build_threshold_table(0.5, 1e-3, std::vector<std::uint64_t>{}).empty());
    CHECK_THROWS_AS(mhf::build_threshold_table(0.5, 1e-3, std::vector<std::uint64_t>{200, 100}),
                    std::invalid_argument);
    CHECK_THROWS_AS(mhf::build_threshold_table(0.5, 1e-3, std::vector<std::uint64_t>{0, 100}),
                    std::invalid_argument);
}

TEST_CASE("split e for lower and upper thresholds") {
    const std::vector<std::uint64_t> one{100};
    const auto t = mhf::build_threshold_table(0.5, 5.6e-10, 1.3514e-10, one);
    CHECK(t.rows()[0].m_lower == std::optional<std::uint64_t>(20));
    CHECK(t.rows()[0].m_upper == 80);
    CHECK(t.e_lower() == 5.6e-10);
    CHECK(t.e_upper() == 1.3514e-10);
}

TEST_CASE("property: bracketing and solver invariants over random settings") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        const std::uint64_t k = 1 + rng() % 1000;
        const double t = 0.01 + 0.98 * static_cast<double>(rng() % 10001) / 10000.0;
        const double e = std::pow(10.0, -1.0 - 11.0 * static_cast<double>(rng() % 1001) / 1000.0);
        CAPTURE(k);
        CAPTURE(t);
        CAPTURE(e);
        const auto ml = mhf::solve_lower(k, t, e);
        const auto mu = mhf::solve_upper(k, t, e);
        if (ml) {
            CHECK(mhf::binom_cdf(*ml, k, t) <= e);
            CHECK(mhf::binom_cdf(*ml + 1, k, t) > e);
            CHECK(static_cast<double>(*ml) / static_cast<double>(k) <= t);
        } else {
            CHECK(mhf::binom_cdf(0, k, t) > e);
        }
        CHECK(mhf::binom_upper_tail(mu, k, t) <= e);
        if (mu > 0) CHECK(mhf::binom_upper_tail(mu - 1, k, t) > e);
        CHECK(static_cast<double>(mu) / static_cast<double>(k) >= t);
    }
}

TEST_CASE("threshold CSV export") {
    const std::vector<std::uint64_t> sched{10, 100};
    std::ostringstream os;
    mhf::write_threshold_csv(os, mhf::build_threshold_table(0.9, 1e-12, sched));
    const std::string csv = os.str();
    CHECK(csv.rfind("k,m_l,T_L,m_u,T_U\n", 0) == 0);
    // k=10: no lower threshold exists at this e.
    CHECK(csv.find("\n10,,,10,1\n") != std::string::npos);
}
