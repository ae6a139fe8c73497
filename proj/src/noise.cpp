#include "spdeapprox/noise.hpp"

#include <cmath>
#include <random>

namespace spdeapprox {

namespace {

std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); }
std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

}  // namespace

NoiseStream::NoiseStream(std::uint64_t master_seed, std::uint64_t sample)
    : master_(master_seed), sample_(sample) {}

void NoiseStream::fill(std::uint64_t step, std::span<double> out) const {
  std::seed_seq seq{lo(master_), hi(master_), lo(sample_), hi(sample_), lo(step), hi(step)};
  std::mt19937_64 gen(seq);
  std::normal_distribution<double> normal;
  for (double& v : out) v = normal(gen);
}

std::vector<std::complex<double>> NoiseStream::mode_draws(std::uint64_t step, int components,
                                                          int max_mode) const {
  std::vector<double> raw(draws_per_step(components, max_mode));
  fill(step, raw);
  const auto n = static_cast<std::size_t>(components);
  std::vector<std::complex<double>> z((static_cast<std::size_t>(max_mode) + 1) * n);
  const double s = 1.0 / std::sqrt(2.0);
  std::size_t r = 0;
  for (std::size_t j = 0; j < n; ++j) z[j] = {raw[r++], 0.0};
  for (std::size_t k = 1; k <= static_cast<std::size_t>(max_mode); ++k)
    for (std::size_t j = 0; j < n; ++j) {
      const double a = raw[r++];
      const double b = raw[r++];
      z[k * n + j] = {s * a, s * b};
    }
  return z;
}

}  // namespace spdeapprox
