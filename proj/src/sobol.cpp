#include "pinnlab/sobol.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>

namespace pinnlab {

std::vector<std::array<double, 2>> sobol_2d(int n, bool skip_zero) {
  if (n < 1) throw std::invalid_argument("sobol_2d: n must be >= 1");
  constexpr int kBits = 52;

  // Direction integers scaled to kBits fractional bits.
  std::uint64_t v0[kBits], v1[kBits];
  for (int j = 0; j < kBits; ++j) v0[j] = 1ULL << (kBits - 1 - j);
  // Dimension 1: recurrence m_k = 2*m_{k-1} XOR m_{k-1} for polynomial x+1.
  std::uint64_t m = 1;
  for (int j = 0; j < kBits; ++j) {
    v1[j] = m << (kBits - 1 - j);
    m = (m << 1) ^ m;
  }

  std::vector<std::array<double, 2>> pts;
  pts.reserve(n);
  std::uint64_t x0 = 0, x1 = 0;
  std::uint64_t index = 0;
  if (!skip_zero) pts.push_back({0.0, 0.0});
  while (static_cast<int>(pts.size()) < n) {
    const int c = std::countr_zero(index + 1);
    x0 ^= v0[c];
    x1 ^= v1[c];
    ++index;
    pts.push_back({static_cast<double>(x0) * 0x1p-52, static_cast<double>(x1) * 0x1p-52});
  }
  return pts;
}

}  // namespace pinnlab
