#pragma once

/// \file fft.hpp
/// \brief Thin RAII wrapper around FFTW multi-dimensional complex transforms.
///
/// Plans are created once per (shape, direction) with FFTW_ESTIMATE and
/// FFTW_UNALIGNED, so they may be executed on any buffer and give
/// bit-identical results for identical input. Planning is serialised by a
/// mutex (the FFTW planner is not thread-safe); execution is not.

#include <fftw3.h>

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

namespace llbar::fft {

using Complex = std::complex<double>;

namespace detail {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const noexcept { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct PlanKey {
  int rank;
  std::array<int, 3> dims;
  int sign;
  auto tie() const { return std::tie(rank, dims, sign); }
  friend bool operator<(const PlanKey& a, const PlanKey& b) {
    return a.tie() < b.tie();
  }
};

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int rank, const std::array<int, 3>& dims, int sign) {
    std::lock_guard lock(mutex_);
    const PlanKey key{rank, dims, sign};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second.get();
    std::size_t total = 1;
    for (int a = 0; a < rank; ++a) total *= static_cast<std::size_t>(dims[a]);
    std::vector<Complex> in(total), out(total);
    fftw_plan p = fftw_plan_dft(rank, dims.data(),
                                reinterpret_cast<fftw_complex*>(in.data()),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, PlanHandle(p));
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, PlanHandle> plans_;
};

}  // namespace detail

/// Unnormalised forward (e^{-ikx}) transform of a rank-`rank` array.
inline void forward(int rank, const std::array<int, 3>& dims, const Complex* in,
                    Complex* out) {
  fftw_plan p = detail::PlanCache::instance().get(rank, dims, FFTW_FORWARD);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

/// Unnormalised backward (e^{+ikx}) transform.
inline void backward(int rank, const std::array<int, 3>& dims,
                     const Complex* in, Complex* out) {
  fftw_plan p = detail::PlanCache::instance().get(rank, dims, FFTW_BACKWARD);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace llbar::fft
