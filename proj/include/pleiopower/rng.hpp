#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pleiopower {

using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Counter-based seed derivation: the stream for (base, a, b, ...) does not
/// depend on the order in which streams are created.
template <typename... Counters>
constexpr std::uint64_t derive_seed(std::uint64_t base, Counters... counters) {
  std::uint64_t h = detail::splitmix64(base);
  ((h = detail::splitmix64(h ^ detail::splitmix64(static_cast<std::uint64_t>(counters) + 0x632be59bd9b4e019ULL))), ...);
  return h;
}

/// FNV-1a, used to fold string labels (locus names) into seeds.
constexpr std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

}  // namespace pleiopower
