#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace blockcot {

// mt19937_64 output is fixed by the standard, so seeded streams are
// reproducible across standard libraries as long as we avoid std::*_distribution.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
double uniform01(Rng& rng);

// Uniform integer in [lo, hi].
std::uint64_t uniform_int(Rng& rng, std::uint64_t lo, std::uint64_t hi);

bool bernoulli(Rng& rng, double p);

std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a; stable across platforms unlike std::hash.
std::uint64_t stable_hash(std::string_view s);

// Derives an independent engine for one (seed, key, index) work unit.
Rng derive_rng(std::uint64_t seed, std::string_view key, std::uint64_t index = 0);

}  // namespace blockcot
