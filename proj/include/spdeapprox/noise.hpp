#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace spdeapprox {

/// Stateless Gaussian increments for one Monte-Carlo sample.
///
/// The draws of a time step depend only on (master seed, sample index, step index),
/// so any step can be regenerated independently. Within a step the layout is mode
/// outermost: mode 0 takes one real draw per component, every mode k >= 1 takes two
/// (real and imaginary part). Runs with a smaller mode count therefore consume a
/// prefix of the same draws, which couples runs at different resolutions and eps.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t master_seed, std::uint64_t sample);

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t sample() const { return sample_; }

  static std::size_t draws_per_step(int components, int max_mode) {
    return static_cast<std::size_t>(components) * (2 * static_cast<std::size_t>(max_mode) + 1);
  }

  /// Standard normal draws for `step`; out.size() fixes how many are produced.
  void fill(std::uint64_t step, std::span<double> out) const;

  /// Unit complex Gaussians Z[k * n + j], k = 0..N, j = 0..n-1, with E|Z|^2 = 1.
  /// Z at k = 0 is real standard normal; for k >= 1, Z = (Z1 + i Z2)/sqrt(2).
  std::vector<std::complex<double>> mode_draws(std::uint64_t step, int components,
                                               int max_mode) const;

 private:
  std::uint64_t master_;
  std::uint64_t sample_;
};

}  // namespace spdeapprox
