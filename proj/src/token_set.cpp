#include "mhfilter/token_set.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mhf {

TokenSet::TokenSet(std::initializer_list<Token> tokens)
    : TokenSet(std::vector<Token>(tokens)) {}

TokenSet::TokenSet(std::vector<Token> tokens) {
    std::size_t dups = 0;
    *this = from_unsorted(std::move(tokens), &dups);
    if (dups != 0) throw std::invalid_argument("TokenSet: duplicate tokens");
}

TokenSet TokenSet::from_unsorted(std::vector<Token> tokens, std::size_t* duplicates) {
    std::sort(tokens.begin(), tokens.end());
    auto last = std::unique(tokens.begin(), tokens.end());
    if (duplicates) *duplicates = static_cast<std::size_t>(tokens.end() - last);
    tokens.erase(last, tokens.end());
    TokenSet s;
    s.tokens_ = std::move(tokens);
    return s;
}

bool TokenSet::contains(Token t) const noexcept {
    return std::binary_search(tokens_.begin(), tokens_.end(), t);
}

Rational Rational::reduced(std::uint64_t num, std::uint64_t den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    const std::uint64_t g = std::gcd(num, den);
    return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
}

std::size_t intersection_size(const TokenSet& a, const TokenSet& b) noexcept {
    std::size_t n = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++n;
            ++ia;
            ++ib;
        }
    }
    return n;
}

Rational exact_jaccard_ratio(const TokenSet& a, const TokenSet& b) {
    if (a.empty() && b.empty()) throw std::invalid_argument("undefined Jaccard: both sets are empty");
    const std::size_t inter = intersection_size(a, b);
    const std::size_t uni = a.size() + b.size() - inter;
    return Rational::reduced(inter, uni);
}

double exact_jaccard(const TokenSet& a, const TokenSet& b) {
    return exact_jaccard_ratio(a, b).value();
}

Rational exhaustive_collision_probability(const TokenSet& a, const TokenSet& b,
                                          std::uint64_t universe_size) {
    if (universe_size > kMaxOracleUniverse)
        throw std::invalid_argument("oracle scale exceeded: universe_size " +
                                    std::to_string(universe_size) + " > " +
                                    std::to_string(kMaxOracleUniverse));
    if (a.empty() || b.empty()) throw std::invalid_argument("oracle requires non-empty sets");
    for (const TokenSet* s : {&a, &b})
        for (Token t : *s)
            if (t >= universe_size)
                throw std::invalid_argument("token " + std::to_string(t) + " outside universe of size " +
                                            std::to_string(universe_size));

    // perm[t] is the image of token t.
    std::vector<std::uint64_t> perm(universe_size);
    std::iota(perm.begin(), perm.end(), 0);
    auto min_image = [&perm](const TokenSet& s) {
        std::uint64_t m = std::numeric_limits<std::uint64_t>::max();
        for (Token t : s) m = std::min(m, perm[t]);
        return m;
    };

    std::uint64_t hits = 0;
    std::uint64_t total = 0;
    do {
        ++total;
        if (min_image(a) == min_image(b)) ++hits;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return Rational::reduced(hits, total);
}

}  // namespace mhf
