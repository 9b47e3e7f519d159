#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace mhf {

// Natural log of C(k, i) p^i (1-p)^(k-i). Returns -inf for impossible outcomes
// at p = 0 or p = 1.
double log_binom_pmf(std::uint64_t i, std::uint64_t k, double p);

// P(X <= m) for X ~ Binomial(k, p).
double binom_cdf(std::uint64_t m, std::uint64_t k, double p);

// P(X > m) for X ~ Binomial(k, p).
double binom_upper_tail(std::uint64_t m, std::uint64_t k, double p);

// Largest m with P(X <= m) <= e under Binomial(k, t); nullopt when even m = 0
// exceeds e. A count at or below the result rejects "similarity >= t" at level e.
std::optional<std::uint64_t> solve_lower(std::uint64_t k, double t, double e);

// Smallest m with P(X > m) <= e under Binomial(k, t). Always exists because
// P(X > k) = 0; a result of k means only a perfect prefix triggers early output.
std::uint64_t solve_upper(std::uint64_t k, double t, double e);

struct ThresholdRow {
    std::uint64_t k = 0;
    std::optional<std::uint64_t> m_lower;
    std::uint64_t m_upper = 0;

    std::optional<double> lower() const {
        return m_lower ? std::optional<double>(static_cast<double>(*m_lower) / static_cast<double>(k))
                       : std::nullopt;
    }
    double upper() const { return static_cast<double>(m_upper) / static_cast<double>(k); }
};

// Per-checkpoint lower/upper match-count thresholds for one (t, e) setting.
class ThresholdTable {
public:
    ThresholdTable() = default;

    double threshold() const noexcept { return t_; }
    double e_lower() const noexcept { return e_lower_; }
    double e_upper() const noexcept { return e_upper_; }
    std::span<const ThresholdRow> rows() const noexcept { return rows_; }
    bool empty() const noexcept { return rows_.empty(); }
    std::uint64_t last_checkpoint() const noexcept { return rows_.empty() ? 0 : rows_.back().k; }

    friend ThresholdTable build_threshold_table(double, double, double, std::span<const std::uint64_t>);

private:
    double t_ = 0.5;
    double e_lower_ = 0.0;
    double e_upper_ = 0.0;
    std::vector<ThresholdRow> rows_;
};

// Checkpoints must be strictly increasing and positive.
ThresholdTable build_threshold_table(double t, double e_lower, double e_upper,
                                     std::span<const std::uint64_t> checkpoints);
ThresholdTable build_threshold_table(double t, double e, std::span<const std::uint64_t> checkpoints);

// CSV with header `k,m_l,T_L,m_u,T_U`; absent m_l leaves both lower columns empty.
void write_threshold_csv(std::ostream& out, const ThresholdTable& table);

}  // namespace mhf
