#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "eulerlab/field.hpp"

namespace eulerlab {
namespace detail {

// One cached c2c plan per (dim, n, sign). FFTW_UNALIGNED lets us execute on
// any std::vector buffer via fftw_execute_dft.
class FftPlans {
 public:
  static fftw_plan get(int dim, int n, int sign) {
    static FftPlans inst;
    std::lock_guard<std::mutex> lock(inst.mu_);
    auto key = std::make_tuple(dim, n, sign);
    auto it = inst.plans_.find(key);
    if (it != inst.plans_.end()) return it->second;
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= n;
    std::vector<Complex> scratch(total);
    int dims[3] = {n, n, n};
    fftw_plan p = fftw_plan_dft(dim, dims, reinterpret_cast<fftw_complex*>(scratch.data()),
                                reinterpret_cast<fftw_complex*>(scratch.data()), sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    inst.plans_.emplace(key, p);
    return p;
  }

 private:
  FftPlans() = default;
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

inline void execute(const GridSpec& g, int sign, std::vector<Complex>& buf) {
  fftw_plan p = FftPlans::get(g.dim, g.n, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(buf.data()),
                   reinterpret_cast<fftw_complex*>(buf.data()));
}

}  // namespace detail

/// Synthesis f(x_j) = sum_xi coeff(xi) e^{2 pi i x_j . xi}; returns the real part.
inline std::vector<double> to_physical(const ScalarField& f) {
  std::vector<Complex> buf = f.coeffs;
  detail::execute(f.grid, FFTW_BACKWARD, buf);
  std::vector<double> out(buf.size());
  for (std::size_t p = 0; p < buf.size(); ++p) out[p] = buf[p].real();
  return out;
}

/// Analysis with coeff(0) = spatial mean.
inline ScalarField from_physical(const GridSpec& g, const std::vector<double>& samples) {
  if (samples.size() != g.total_samples())
    throw ShapeMismatch("from_physical: expected " + std::to_string(g.total_samples()) +
                        " samples, got " + std::to_string(samples.size()));
  ScalarField f(g);
  std::vector<Complex>& buf = f.coeffs;
  for (std::size_t p = 0; p < samples.size(); ++p) buf[p] = Complex(samples[p], 0.0);
  detail::execute(g, FFTW_FORWARD, buf);
  const double scale = 1.0 / static_cast<double>(g.total_samples());
  for (auto& c : buf) c *= scale;
  return f;
}

}  // namespace eulerlab
