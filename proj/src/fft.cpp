#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

namespace lplab::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Aligned scratch owned by one thread, grown on demand.
struct Scratch {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  std::size_t real_capacity = 0;
  std::size_t cplx_capacity = 0;

  void reserve(std::size_t nreal, std::size_t ncplx) {
    if (nreal > real_capacity) {
      fftw_free(real);
      real = fftw_alloc_real(nreal);
      real_capacity = nreal;
    }
    if (ncplx > cplx_capacity) {
      fftw_free(cplx);
      cplx = fftw_alloc_complex(ncplx);
      cplx_capacity = ncplx;
    }
  }
  ~Scratch() {
    fftw_free(real);
    fftw_free(cplx);
  }
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

}  // namespace

FftPlan::FftPlan(int dim, int size) : dim_(dim), size_(size) {
  physical_count_ = 1;
  for (int d = 0; d < dim; ++d) physical_count_ *= static_cast<std::size_t>(size);
  spectral_count_ = physical_count_ / size * (size / 2 + 1);

  double* r = fftw_alloc_real(physical_count_);
  fftw_complex* c = fftw_alloc_complex(spectral_count_);
  const unsigned flags = FFTW_ESTIMATE;
  if (dim == 2) {
    forward_plan_ = fftw_plan_dft_r2c_2d(size, size, r, c, flags);
    inverse_plan_ = fftw_plan_dft_c2r_2d(size, size, c, r, flags | FFTW_DESTROY_INPUT);
  } else {
    forward_plan_ = fftw_plan_dft_r2c_3d(size, size, size, r, c, flags);
    inverse_plan_ = fftw_plan_dft_c2r_3d(size, size, size, c, r, flags | FFTW_DESTROY_INPUT);
  }
  fftw_free(r);
  fftw_free(c);
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

const FftPlan& FftPlan::get(int dim, int size) {
  std::lock_guard lock(planner_mutex());
  static std::map<std::pair<int, int>, std::unique_ptr<FftPlan>> cache;
  auto& slot = cache[{dim, size}];
  if (!slot) slot.reset(new FftPlan(dim, size));
  return *slot;
}

void FftPlan::forward(std::span<const double> in, std::span<Complex> out) const {
  Scratch& s = scratch();
  s.reserve(physical_count_, spectral_count_);
  std::copy(in.begin(), in.begin() + physical_count_, s.real);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), s.real, s.cplx);
  const double scale = 1.0 / static_cast<double>(physical_count_);
  for (std::size_t i = 0; i < spectral_count_; ++i) {
    out[i] = Complex(s.cplx[i][0] * scale, s.cplx[i][1] * scale);
  }
}

void FftPlan::inverse(std::span<const Complex> in, std::span<double> out) const {
  Scratch& s = scratch();
  s.reserve(physical_count_, spectral_count_);
  for (std::size_t i = 0; i < spectral_count_; ++i) {
    s.cplx[i][0] = in[i].real();
    s.cplx[i][1] = in[i].imag();
  }
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), s.cplx, s.real);
  std::copy(s.real, s.real + physical_count_, out.begin());
}

}  // namespace lplab::detail
