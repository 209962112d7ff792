#pragma once

#include <array>
#include <cstdint>

namespace gck {

// Philox4x32-10 block function (Salmon et al. counter-based generator).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

// Stream (seed, stream_id): the key is the seed, the upper counter words hold
// stream_id and the lower words count blocks.  Distinct stream ids never
// overlap, so replicate r can use stream r regardless of scheduling.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1), 53 random bits.
    double uniform();
    // Standard normal by inversion of the uniform.
    double normal();
    // Uniform integer in [0, n), unbiased.
    std::uint64_t below(std::uint64_t n);

private:
    void refill();

    PhiloxKey key_;
    PhiloxCounter ctr_;
    PhiloxCounter buf_{};
    int pos_ = 4;
};

// Stream ids for derived purposes stay clear of replicate indices.
constexpr std::uint64_t kPoolStream = 0xFFFFFFFF00000000ULL;

}  // namespace gck
