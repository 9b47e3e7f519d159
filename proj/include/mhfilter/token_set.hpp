#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace mhf {

using Token = std::uint64_t;

// Sorted, duplicate-free collection of token identifiers. Immutable once built.
class TokenSet {
public:
    TokenSet() = default;
    TokenSet(std::initializer_list<Token> tokens);
    explicit TokenSet(std::vector<Token> tokens);

    // Builds a set from raw tokens; `duplicates` receives the number of dropped repeats.
    static TokenSet from_unsorted(std::vector<Token> tokens, std::size_t* duplicates = nullptr);

    std::span<const Token> tokens() const noexcept { return tokens_; }
    std::size_t size() const noexcept { return tokens_.size(); }
    bool empty() const noexcept { return tokens_.empty(); }
    bool contains(Token t) const noexcept;

    auto begin() const noexcept { return tokens_.begin(); }
    auto end() const noexcept { return tokens_.end(); }

    friend bool operator==(const TokenSet&, const TokenSet&) = default;

private:
    std::vector<Token> tokens_;
};

// Exact fraction with a positive denominator, kept in lowest terms.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    static Rational reduced(std::uint64_t num, std::uint64_t den);
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Rational&, const Rational&) = default;
};

std::size_t intersection_size(const TokenSet& a, const TokenSet& b) noexcept;

// |a ∩ b| / |a ∪ b| as an exact fraction. Throws if both sets are empty.
Rational exact_jaccard_ratio(const TokenSet& a, const TokenSet& b);
double exact_jaccard(const TokenSet& a, const TokenSet& b);

inline constexpr std::uint64_t kMaxOracleUniverse = 8;

// Enumerates every permutation of {0, ..., universe_size-1} and returns the
// fraction under which a and b share the same minimum image.
Rational exhaustive_collision_probability(const TokenSet& a, const TokenSet& b,
                                          std::uint64_t universe_size);

}  // namespace mhf
