#include "mhfilter/signature_cache.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mhf {
namespace {

constexpr std::array<char, 4> kMagic{'M', 'H', 'S', 'G'};

void put_le(std::ostream& out, std::uint64_t v, unsigned bytes) {
    std::array<char, 8> buf{};
    for (unsigned i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(buf.data(), bytes);
}

std::uint64_t get_le(std::istream& in, unsigned bytes, const char* what) {
    std::array<unsigned char, 8> buf{};
    if (!in.read(reinterpret_cast<char*>(buf.data()), bytes))
        throw std::runtime_error(std::string("signature cache truncated while reading ") + what);
    std::uint64_t v = 0;
    for (unsigned i = 0; i < bytes; ++i) v |= std::uint64_t{buf[i]} << (8 * i);
    return v;
}

unsigned slot_bytes(unsigned bits) { return bits >= Signature::kFullBits ? 8 : (bits + 7) / 8; }

}  // namespace

std::uint64_t SignatureCache::fingerprint() const {
    return b_bit_fingerprint(family_fingerprint(master_seed, k, Signature::kFullBits), bits);
}

SignatureStore SignatureCache::to_store() const {
    SignatureStore store;
    store.reserve(entries.size());
    for (const auto& [id, sig] : entries)
        if (!store.emplace(id, sig).second)
            throw std::invalid_argument("duplicate set id " + std::to_string(id) + " in signature cache");
    return store;
}

void write_signature_cache(std::ostream& out, const SignatureCache& cache) {
    const bool full = cache.bits == Signature::kFullBits;
    if (!full && (cache.bits < 1 || cache.bits > 32)) throw std::invalid_argument("cache bit width out of range");
    const std::uint64_t fp = cache.fingerprint();
    out.write(kMagic.data(), kMagic.size());
    put_le(out, full ? kCacheVersionFull : kCacheVersionBBit, 4);
    put_le(out, cache.k, 8);
    put_le(out, cache.master_seed, 8);
    if (!full) put_le(out, cache.bits, 4);
    put_le(out, cache.entries.size(), 8);
    const unsigned width = slot_bytes(cache.bits);
    for (const auto& [id, sig] : cache.entries) {
        if (sig.size() != cache.k || sig.bits() != cache.bits || sig.fingerprint() != fp)
            throw std::invalid_argument("signature for set " + std::to_string(id) +
                                        " does not belong to the cache's hash family");
        put_le(out, id, 8);
        for (std::uint64_t v : sig.values()) put_le(out, v, width);
    }
    if (!out) throw std::runtime_error("failed writing signature cache");
}

SignatureCache read_signature_cache(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic)
        throw std::runtime_error("not a signature cache (bad magic)");
    const auto version = static_cast<std::uint32_t>(get_le(in, 4, "version"));
    if (version != kCacheVersionFull && version != kCacheVersionBBit)
        throw std::runtime_error("unsupported signature cache version " + std::to_string(version));
    SignatureCache cache;
    cache.k = get_le(in, 8, "k");
    cache.master_seed = get_le(in, 8, "master_seed");
    if (version == kCacheVersionBBit) {
        cache.bits = static_cast<unsigned>(get_le(in, 4, "b"));
        if (cache.bits < 1 || cache.bits > 32)
            throw std::runtime_error("cache bit width " + std::to_string(cache.bits) + " out of range");
    }
    if (cache.k == 0) throw std::runtime_error("signature cache declares k = 0");
    const std::uint64_t count = get_le(in, 8, "set_count");
    const unsigned width = slot_bytes(cache.bits);
    const std::uint64_t fp = cache.fingerprint();
    for (std::uint64_t n = 0; n < count; ++n) {
        const SetId id = get_le(in, 8, "set_id");
        std::vector<std::uint64_t> values(cache.k);
        for (auto& v : values) v = get_le(in, width, "slot value");
        cache.entries.emplace_back(id, Signature(std::move(values), fp, cache.bits));
    }
    return cache;
}

}  // namespace mhf
