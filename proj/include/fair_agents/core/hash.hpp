#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fair_agents {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

// FNV-1a, 64-bit. Feed successive pieces by passing the previous result as
// `state`; the result equals hashing the concatenation.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t state = kFnvOffsetBasis) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= kFnvPrime;
  }
  return state;
}

std::string to_hex(std::uint64_t value);

}  // namespace fair_agents
