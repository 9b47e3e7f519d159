#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mhfilter/token_set.hpp"

namespace mhf {

// Per-slot hash key. Each slot of a signature approximates one random
// permutation of the token universe with a keyed bijection on 64-bit words.
struct SlotKey {
    std::uint64_t whiten;
    std::uint64_t inner;

    friend bool operator==(const SlotKey&, const SlotKey&) = default;
};

inline constexpr std::uint64_t kSplitMixGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Keyed permutation of the 64-bit domain:
//
//   x  = token ^ key.whiten
//   x ^= x >> 33;  x *= 0xff51afd7ed558ccd
//   x ^= key.inner
//   x ^= x >> 33;  x *= 0xc4ceb9fe1a85ec53
//   x ^= x >> 33
//
// Every step is invertible, so distinct tokens never tie within a slot.
constexpr std::uint64_t slot_mix(std::uint64_t token, const SlotKey& key) noexcept {
    std::uint64_t x = token ^ key.whiten;
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= key.inner;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

class Signature {
public:
    static constexpr unsigned kFullBits = 64;

    Signature() = default;
    Signature(std::vector<std::uint64_t> values, std::uint64_t fingerprint, unsigned bits = kFullBits);

    std::span<const std::uint64_t> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::uint64_t fingerprint() const noexcept { return fingerprint_; }
    unsigned bits() const noexcept { return bits_; }

    friend bool operator==(const Signature&, const Signature&) = default;

private:
    std::vector<std::uint64_t> values_;
    std::uint64_t fingerprint_ = 0;
    unsigned bits_ = kFullBits;
};

// Family of `k` slot keys derived from a master seed. Key i takes outputs
// 2i and 2i+1 of the SplitMix64 stream seeded with master_seed, i.e.
//   whiten = splitmix64_mix(master_seed + (2i + 1) * gamma)
//   inner  = splitmix64_mix(master_seed + (2i + 2) * gamma)
// The stream visits distinct states, so all 2k words are pairwise distinct.
class HashFamily {
public:
    HashFamily(std::size_t k, std::uint64_t master_seed);

    std::size_t k() const noexcept { return whiten_.size(); }
    std::uint64_t master_seed() const noexcept { return seed_; }
    SlotKey key(std::size_t i) const { return {whiten_.at(i), inner_.at(i)}; }

    // Identifies (master_seed, k) for full-width signatures.
    std::uint64_t fingerprint() const noexcept { return fingerprint_; }

    // Slot i holds the minimum of slot_mix(t, key(i)) over t in s.
    Signature sign(const TokenSet& s) const;
    std::vector<Signature> sign_all(std::span<const TokenSet> sets, unsigned threads = 0) const;

private:
    std::uint64_t seed_;
    std::uint64_t fingerprint_;
    std::vector<std::uint64_t> whiten_;
    std::vector<std::uint64_t> inner_;
};

HashFamily make_family(std::size_t k, std::uint64_t master_seed);

std::uint64_t family_fingerprint(std::uint64_t master_seed, std::uint64_t k, unsigned bits);

// Fingerprint carried by a b-bit reduction of signatures with `full_fingerprint`,
// so reduced and full signatures never compare.
std::uint64_t b_bit_fingerprint(std::uint64_t full_fingerprint, unsigned bits);

struct MatchCount {
    std::size_t matches = 0;
    std::size_t examined = 0;
};

// Counts equal slots among the first `upto` positions.
MatchCount match_count(const Signature& a, const Signature& b, std::size_t upto);
MatchCount match_count(const Signature& a, const Signature& b);

// Running estimate matches / examined.
double estimate(const MatchCount& mc);

// j (1 - j) / k: variance of the full-length estimator for true similarity j.
double estimator_variance(double j, std::size_t k);

// Keeps the lowest `bits` bits of every slot. bits in [1, 32]; 64 returns the
// signature unchanged.
Signature to_b_bit(const Signature& sig, unsigned bits);

// Expected per-slot match rate for a b-bit signature pair with Jaccard j,
// assuming accidental collisions of unequal minima occur at rate 2^-b.
double b_bit_match_probability(double j, unsigned bits);

}  // namespace mhf
