#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lob {

/// The engine used everywhere. std::mt19937_64 has a fully specified output
/// sequence, and the transforms below avoid the implementation-defined
/// standard distributions, so runs are reproducible across toolchains.
using Rng = std::mt19937_64;

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1].
inline double uniform_open_closed(Rng& rng) noexcept { return 1.0 - uniform01(rng); }

/// Exponential with the given rate, by inversion.
inline double exponential(Rng& rng, double rate) noexcept {
  return -std::log(uniform_open_closed(rng)) / rate;
}

/// Seed-splitting rule for independent paths: path k of a batch with base seed
/// b uses mt19937_64 seeded from std::seed_seq{lo32(b), hi32(b), lo32(k), hi32(k)}.
inline Rng make_path_rng(std::uint64_t base_seed, std::uint64_t path) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  return Rng(seq);
}

}  // namespace lob
