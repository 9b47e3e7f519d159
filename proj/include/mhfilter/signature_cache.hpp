#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "mhfilter/filter.hpp"
#include "mhfilter/minwise.hpp"

namespace mhf {

// Binary signature cache, all integers little-endian:
//
//   "MHSG"            4 bytes
//   version           u32   1 = full 64-bit slots, 2 = b-bit slots
//   k                 u64
//   master_seed       u64
//   b                 u32   (version 2 only)
//   set_count         u64
//   set_count times:  set_id u64, then k slots
//
// Full slots are u64; b-bit slots are ceil(b/8)-byte little-endian values.
struct SignatureCache {
    std::uint64_t k = 0;
    std::uint64_t master_seed = 0;
    unsigned bits = Signature::kFullBits;
    std::vector<std::pair<SetId, Signature>> entries;

    std::uint64_t fingerprint() const;
    SignatureStore to_store() const;
};

inline constexpr std::uint32_t kCacheVersionFull = 1;
inline constexpr std::uint32_t kCacheVersionBBit = 2;

void write_signature_cache(std::ostream& out, const SignatureCache& cache);
SignatureCache read_signature_cache(std::istream& in);

}  // namespace mhf
