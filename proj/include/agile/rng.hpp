#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace agile {

using Rng = std::mt19937_64;

// Expands one master seed into independent named streams, so that adding
// draws to one component never shifts another component's sequence.
inline Rng substream(std::uint64_t master_seed, std::string_view name) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

}  // namespace agile
