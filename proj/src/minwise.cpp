#include "mhfilter/minwise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mhfilter/parallel.hpp"

namespace mhf {

std::uint64_t family_fingerprint(std::uint64_t master_seed, std::uint64_t k, unsigned bits) {
    std::uint64_t h = splitmix64_mix(master_seed ^ 0x4d48534947000000ULL);
    h = splitmix64_mix(h ^ k);
    return splitmix64_mix(h ^ bits);
}

std::uint64_t b_bit_fingerprint(std::uint64_t full_fingerprint, unsigned bits) {
    return bits >= Signature::kFullBits ? full_fingerprint : splitmix64_mix(full_fingerprint ^ bits);
}

HashFamily::HashFamily(std::size_t k, std::uint64_t master_seed)
    : seed_(master_seed), fingerprint_(family_fingerprint(master_seed, k, Signature::kFullBits)) {
    if (k == 0) throw std::invalid_argument("hash family needs at least one permutation (k = 0)");
    whiten_.resize(k);
    inner_.resize(k);
    std::uint64_t state = master_seed;
    for (std::size_t i = 0; i < k; ++i) {
        state += kSplitMixGamma;
        whiten_[i] = splitmix64_mix(state);
        state += kSplitMixGamma;
        inner_[i] = splitmix64_mix(state);
    }
}

HashFamily make_family(std::size_t k, std::uint64_t master_seed) { return HashFamily(k, master_seed); }

Signature HashFamily::sign(const TokenSet& s) const {
    if (s.empty()) throw std::invalid_argument("minhash undefined on empty set");
    const std::size_t k = this->k();
    std::vector<std::uint64_t> mins(k, std::numeric_limits<std::uint64_t>::max());
    const std::uint64_t* wh = whiten_.data();
    const std::uint64_t* in = inner_.data();
    std::uint64_t* out = mins.data();
    for (Token t : s) {
        for (std::size_t i = 0; i < k; ++i) {
            const std::uint64_t h = slot_mix(t, SlotKey{wh[i], in[i]});
            out[i] = h < out[i] ? h : out[i];
        }
    }
    return Signature(std::move(mins), fingerprint_);
}

std::vector<Signature> HashFamily::sign_all(std::span<const TokenSet> sets, unsigned threads) const {
    std::vector<Signature> out(sets.size());
    parallel_for(sets.size(), threads, [&](std::size_t i) { out[i] = sign(sets[i]); });
    return out;
}

Signature::Signature(std::vector<std::uint64_t> values, std::uint64_t fingerprint, unsigned bits)
    : values_(std::move(values)), fingerprint_(fingerprint), bits_(bits) {
    if (bits_ == 0 || bits_ > kFullBits) throw std::invalid_argument("signature bit width out of range");
}

MatchCount match_count(const Signature& a, const Signature& b, std::size_t upto) {
    if (a.fingerprint() != b.fingerprint() || a.bits() != b.bits())
        throw std::invalid_argument("signatures come from different hash families");
    if (a.size() != b.size()) throw std::invalid_argument("signature length mismatch");
    if (upto > a.size())
        throw std::invalid_argument("prefix " + std::to_string(upto) + " exceeds signature length " +
                                    std::to_string(a.size()));
    const auto va = a.values();
    const auto vb = b.values();
    std::size_t x = 0;
    for (std::size_t i = 0; i < upto; ++i) x += va[i] == vb[i];
    return {x, upto};
}

MatchCount match_count(const Signature& a, const Signature& b) { return match_count(a, b, a.size()); }

double estimate(const MatchCount& mc) {
    if (mc.examined == 0) throw std::invalid_argument("estimate needs at least one examined slot");
    if (mc.matches > mc.examined) throw std::invalid_argument("match count exceeds examined slots");
    return static_cast<double>(mc.matches) / static_cast<double>(mc.examined);
}

double estimator_variance(double j, std::size_t k) {
    if (!(j >= 0.0 && j <= 1.0)) throw std::invalid_argument("similarity must lie in [0, 1]");
    if (k == 0) throw std::invalid_argument("k must be positive");
    return j * (1.0 - j) / static_cast<double>(k);
}

Signature to_b_bit(const Signature& sig, unsigned bits) {
    if (bits == Signature::kFullBits || bits == sig.bits()) return sig;
    if (bits < 1 || bits > 32) throw std::invalid_argument("b must lie in [1, 32] (or 64 for no-op)");
    if (sig.bits() != Signature::kFullBits)
        throw std::invalid_argument("signature is already reduced to " + std::to_string(sig.bits()) + " bits");
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    std::vector<std::uint64_t> v(sig.values().begin(), sig.values().end());
    for (auto& x : v) x &= mask;
    return Signature(std::move(v), b_bit_fingerprint(sig.fingerprint(), bits), bits);
}

double b_bit_match_probability(double j, unsigned bits) {
    if (bits >= Signature::kFullBits) return j;
    const double c = std::ldexp(1.0, -static_cast<int>(bits));
    return c + (1.0 - c) * j;
}

}  // namespace mhf
