#include "mhfilter/binomial.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mhf {
namespace {

void check_query(std::uint64_t m, std::uint64_t k, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0, 1]");
    if (m > k)
        throw std::invalid_argument("count " + std::to_string(m) + " exceeds trials " + std::to_string(k));
}

void check_solver_args(std::uint64_t k, double t, double e) {
    if (k == 0) throw std::invalid_argument("checkpoint must be at least 1");
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("small probability must lie in (0, 1)");
}

// Sum of pmf(i) for i in [lo, hi], visiting terms from `hi` down when `descending`.
// Terms are positive, so summing smallest-first keeps relative error near k * eps.
double sum_pmf(std::uint64_t lo, std::uint64_t hi, std::uint64_t k, double p, bool descending) {
    double s = 0.0;
    if (lo > hi) return s;
    if (descending) {
        for (std::uint64_t i = hi + 1; i-- > lo;) s += std::exp(log_binom_pmf(i, k, p));
    } else {
        for (std::uint64_t i = lo; i <= hi; ++i) s += std::exp(log_binom_pmf(i, k, p));
    }
    return s;
}

// Evaluate the lower tail directly when m sits below the mean, otherwise the
// upper tail; the other side comes from the complement.
bool lower_is_small(std::uint64_t m, std::uint64_t k, double p) {
    return static_cast<double>(m) < static_cast<double>(k) * p;
}

}  // namespace

double log_binom_pmf(std::uint64_t i, std::uint64_t k, double p) {
    check_query(i, k, p);
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (p == 0.0) return i == 0 ? 0.0 : neg_inf;
    if (p == 1.0) return i == k ? 0.0 : neg_inf;
    const double kd = static_cast<double>(k);
    const double id = static_cast<double>(i);
    const double log_coeff = std::lgamma(kd + 1.0) - std::lgamma(id + 1.0) - std::lgamma(kd - id + 1.0);
    return log_coeff + id * std::log(p) + (kd - id) * std::log1p(-p);
}

double binom_cdf(std::uint64_t m, std::uint64_t k, double p) {
    check_query(m, k, p);
    if (m == k) return 1.0;
    if (lower_is_small(m, k, p)) return std::min(1.0, sum_pmf(0, m, k, p, false));
    return std::clamp(1.0 - sum_pmf(m + 1, k, k, p, true), 0.0, 1.0);
}

double binom_upper_tail(std::uint64_t m, std::uint64_t k, double p) {
    check_query(m, k, p);
    if (m == k) return 0.0;
    if (lower_is_small(m, k, p)) return std::clamp(1.0 - sum_pmf(0, m, k, p, false), 0.0, 1.0);
    return std::min(1.0, sum_pmf(m + 1, k, k, p, true));
}

std::optional<std::uint64_t> solve_lower(std::uint64_t k, double t, double e) {
    check_solver_args(k, t, e);
    if (binom_cdf(0, k, t) > e) return std::nullopt;
    // Invariant: cdf(lo) <= e, cdf(hi) > e. cdf(k) = 1 > e.
    std::uint64_t lo = 0;
    std::uint64_t hi = k;
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (binom_cdf(mid, k, t) <= e)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

std::uint64_t solve_upper(std::uint64_t k, double t, double e) {
    check_solver_args(k, t, e);
    if (binom_upper_tail(0, k, t) <= e) return 0;
    // Invariant: tail(lo) > e, tail(hi) <= e. tail(k) = 0 <= e.
    std::uint64_t lo = 0;
    std::uint64_t hi = k;
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (binom_upper_tail(mid, k, t) <= e)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

ThresholdTable build_threshold_table(double t, double e_lower, double e_upper,
                                     std::span<const std::uint64_t> checkpoints) {
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
    if (!(e_lower > 0.0 && e_lower < 1.0) || !(e_upper > 0.0 && e_upper < 1.0))
        throw std::invalid_argument("small probability must lie in (0, 1)");
    ThresholdTable table;
    table.t_ = t;
    table.e_lower_ = e_lower;
    table.e_upper_ = e_upper;
    std::uint64_t prev = 0;
    for (std::uint64_t k : checkpoints) {
        if (k <= prev)
            throw std::invalid_argument("checkpoint schedule must be strictly increasing and positive (at " +
                                        std::to_string(k) + ")");
        prev = k;
        table.rows_.push_back({k, solve_lower(k, t, e_lower), solve_upper(k, t, e_upper)});
    }
    return table;
}

ThresholdTable build_threshold_table(double t, double e, std::span<const std::uint64_t> checkpoints) {
    return build_threshold_table(t, e, e, checkpoints);
}

namespace {

std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_threshold_csv(std::ostream& out, const ThresholdTable& table) {
    out << "k,m_l,T_L,m_u,T_U\n";
    for (const auto& row : table.rows()) {
        out << row.k << ',';
        if (row.m_lower)
            out << *row.m_lower << ',' << shortest(*row.lower());
        else
            out << ',';
        out << ',' << row.m_upper << ',' << shortest(row.upper()) << '\n';
    }
}

}  // namespace mhf
