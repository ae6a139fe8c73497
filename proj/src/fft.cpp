#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace spdeapprox::fft {
namespace {

enum class PlanKind { c2r, r2c, c2c_backward };

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan plan_for(PlanKind kind, int M) {
  static std::map<std::pair<int, int>, fftw_plan> cache;
  std::lock_guard lock(planner_mutex());
  const auto key = std::make_pair(static_cast<int>(kind), M);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  std::vector<std::complex<double>> c(static_cast<std::size_t>(M));
  std::vector<double> r(static_cast<std::size_t>(M));
  auto* cp = reinterpret_cast<fftw_complex*>(c.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan p = nullptr;
  switch (kind) {
    case PlanKind::c2r: p = fftw_plan_dft_c2r_1d(M, cp, r.data(), flags); break;
    case PlanKind::r2c: p = fftw_plan_dft_r2c_1d(M, r.data(), cp, flags); break;
    case PlanKind::c2c_backward: p = fftw_plan_dft_1d(M, cp, cp, FFTW_BACKWARD, flags); break;
  }
  cache.emplace(key, p);
  return p;
}

}  // namespace

void inverse_real(std::span<std::complex<double>> in, std::span<double> out) {
  const int M = static_cast<int>(out.size());
  fftw_execute_dft_c2r(plan_for(PlanKind::c2r, M), reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());
}

void forward_real(std::span<double> in, std::span<std::complex<double>> out) {
  const int M = static_cast<int>(in.size());
  fftw_execute_dft_r2c(plan_for(PlanKind::r2c, M), in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void backward_complex(std::span<std::complex<double>> data) {
  const int M = static_cast<int>(data.size());
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_for(PlanKind::c2c_backward, M), p, p);
}

}  // namespace spdeapprox::fft
