#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace fpp {

// Philox4x32-10 (Salmon et al.); counter-based, so any (key, counter) can be
// evaluated independently. That is what makes parallel runs reproducible.
struct Philox4x32 {
    using Counter = std::array<uint32_t, 4>;
    using Key = std::array<uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const uint64_t p0 = uint64_t(0xD2511F53u) * ctr[0];
            const uint64_t p1 = uint64_t(0xCD9E8D57u) * ctr[2];
            ctr = {uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], uint32_t(p1),
                   uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], uint32_t(p0)};
        }
        return ctr;
    }
};

inline uint64_t splitmix64(uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Separate domains (environment, replicas, walks...) drawn from one user seed.
inline uint64_t derive_seed(uint64_t seed, uint64_t tag) noexcept {
    return splitmix64(seed ^ splitmix64(tag + 0x632BE59BD9B4E019ull));
}

// A stream is (key = seed, stream id); draws walk the low counter words.
class RngStream {
public:
    using result_type = uint64_t;

    RngStream(uint64_t seed = 0, uint64_t stream = 0) noexcept
        : key_{uint32_t(seed), uint32_t(seed >> 32)}, stream_(stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<uint64_t>::max(); }

    uint64_t operator()() noexcept { return next_u64(); }

    uint64_t next_u64() noexcept {
        if (idx_ >= 2) refill();
        const uint64_t v = (uint64_t(buf_[2 * idx_]) << 32) | buf_[2 * idx_ + 1];
        ++idx_;
        return v;
    }

    // uniform on [0,1), 53 bits
    double uniform() noexcept { return double(next_u64() >> 11) * 0x1.0p-53; }
    // uniform on (0,1]
    double uniform_pos() noexcept { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double exponential(double rate) noexcept { return -std::log(uniform_pos()) / rate; }
    bool bernoulli(double p) noexcept { return uniform() < p; }

    // P(k) = c (1-c)^k
    uint64_t geometric0(double c) noexcept {
        if (c >= 1.0) return 0;
        const double k = std::floor(std::log(uniform_pos()) / std::log1p(-c));
        return k >= 1.8e19 ? std::numeric_limits<uint64_t>::max() : uint64_t(k);
    }

    uint64_t stream() const noexcept { return stream_; }
    uint64_t position() const noexcept { return block_; }

private:
    void refill() noexcept {
        buf_ = Philox4x32::block({uint32_t(block_), uint32_t(block_ >> 32), uint32_t(stream_),
                                  uint32_t(stream_ >> 32)},
                                 key_);
        ++block_;
        idx_ = 0;
    }

    Philox4x32::Key key_;
    uint64_t stream_;
    uint64_t block_ = 0;
    Philox4x32::Counter buf_{};
    int idx_ = 2;
};

// Stream for lattice site (a, b); independent of any window or grid extent.
inline RngStream site_rng(uint64_t seed, int64_t a, int64_t b) noexcept {
    return RngStream(seed, (uint64_t(uint32_t(int32_t(a))) << 32) | uint32_t(int32_t(b)));
}

}  // namespace fpp
