// SPDX-License-Identifier: Apache-2.0
//
// rrmimo - reduced-rank channel estimation library for large-scale MIMO uplinks
// Copyright (C) 2026 rrmimo contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "types.hpp"

namespace rrmimo
{

// Counter-based generator (Philox-4x32, 10 rounds). Streams are addressed by
// (key, counter-prefix) so that Monte Carlo trials can draw from independent,
// order-free substreams; results do not depend on scheduling or thread count.
//
// Known-answer vector: key = {0,0}, counter = {0,0,0,0} produces
// {0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}.
class Philox
{
  public:
    using block = std::array<uint32_t, 4>;

    static block round10(block ctr, std::array<uint32_t, 2> key)
    {
        for (int r = 0; r < 10; ++r)
        {
            const uint64_t p0 = uint64_t(0xD2511F53u) * ctr[0];
            const uint64_t p1 = uint64_t(0xCD9E8D57u) * ctr[2];
            block next;
            next[0] = uint32_t(p1 >> 32) ^ ctr[1] ^ key[0];
            next[1] = uint32_t(p1);
            next[2] = uint32_t(p0 >> 32) ^ ctr[3] ^ key[1];
            next[3] = uint32_t(p0);
            ctr = next;
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }
};

// One addressable random stream. The master seed forms the key; the stream
// identity (trial, cell, purpose) occupies the two high counter words, and the
// block index occupies the low words, giving 2^64 blocks per stream.
class Rng
{
  public:
    Rng(uint64_t master_seed, uint32_t c2, uint32_t c3)
        : key_{uint32_t(master_seed), uint32_t(master_seed >> 32)}, c2_(c2), c3_(c3)
    {
    }

    explicit Rng(uint64_t master_seed) : Rng(master_seed, 0, 0) {}

    uint32_t next_u32()
    {
        if (pos_ == 4)
        {
            buf_ = Philox::round10({uint32_t(blk_), uint32_t(blk_ >> 32), c2_, c3_}, key_);
            ++blk_;
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    uint64_t next_u64()
    {
        const uint64_t lo = next_u32();
        const uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform()
    {
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; second variate cached.
    double normal()
    {
        if (have_spare_)
        {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1] keeps the log finite.
        const double u1 = (double(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * pi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * pi * u2);
    }

    // Circular complex normal, unit variance: re and im are N(0, 1/2).
    cxd cnormal()
    {
        constexpr double half = 0.70710678118654752440; // sqrt(1/2)
        const double re = normal();
        const double im = normal();
        return {half * re, half * im};
    }

  private:
    std::array<uint32_t, 2> key_;
    uint32_t c2_;
    uint32_t c3_;
    uint64_t blk_ = 0;
    std::array<uint32_t, 4> buf_{};
    int pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stream purposes keep the draws of one trial independent of each other.
enum class StreamPurpose : uint8_t
{
    channel = 1,
    noise = 2,
    coarse_aoa = 3,
    lsfc = 4,
};

// Stream address layout: c2 = trial index, c3 = (cell << 8) | purpose.
// Cells above 2^24-1 are rejected by the harness config validation.
inline Rng make_stream(uint64_t master_seed, uint32_t trial, uint32_t cell, StreamPurpose purpose)
{
    return Rng(master_seed, trial, (cell << 8) | uint32_t(purpose));
}

} // namespace rrmimo
