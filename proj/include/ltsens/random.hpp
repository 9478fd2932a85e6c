#pragma once

#include <array>
#include <cstdint>

#include <boost/random/normal_distribution.hpp>

namespace ltsens {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Stateless: the output is a pure function of (counter, key).
class Philox4x32
{
  public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter apply(Counter ctr, Key key) noexcept
    {
        for (int round = 0; round < 10; ++round)
        {
            if (round > 0)
            {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

  private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// SplitMix64 output function (Steele, Lea and Flood, OOPSLA'14).
constexpr std::uint64_t splitmix_mix(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Weyl-sequence engine seeded at one substream; satisfies UniformRandomBitGenerator.
class SubstreamEngine
{
  public:
    using result_type = std::uint64_t;
    explicit constexpr SubstreamEngine(std::uint64_t start) noexcept : state_(start) {}
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    constexpr result_type operator()() noexcept
    {
        state_ += 0x9E3779B97F4A7C15ull;
        return splitmix_mix(state_);
    }

  private:
    std::uint64_t state_;
};

/// Standard normals addressed by (seed, stream, index). The stream key is one
/// Philox block; each index hashes to its own substream, which feeds a
/// ziggurat sampler that normally consumes a single 64-bit word.
class NormalStream
{
  public:
    NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept
    {
        const auto out = Philox4x32::apply(
            {static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0, 0},
            {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
        key_ = std::uint64_t{out[0]} << 32 | out[1];
    }

    std::uint64_t key() const noexcept { return key_; }

    SubstreamEngine substream(std::uint64_t index) const noexcept
    {
        return SubstreamEngine(key_ + 0xD1B54A32D192ED03ull * (index + 1));
    }

    double operator()(std::uint64_t index) const
    {
        auto eng = substream(index);
        return boost::random::normal_distribution<double>()(eng);
    }

  private:
    std::uint64_t key_ = 0;
};

/// SplitMix64 finalizer; derives independent seeds from a base seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept
{
    return splitmix_mix(seed + 0x9E3779B97F4A7C15ull * (salt + 1));
}

}  // namespace ltsens
