#include "lplab/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "lplab/error.hpp"

namespace lplab {

Grid::Grid(int dim, int size) : dim_(dim), size_(size) {
  if (dim != 2 && dim != 3) {
    throw DomainError("grid dimension must be 2 or 3, got " + std::to_string(dim));
  }
  if (size < 8 || (size & (size - 1)) != 0) {
    throw DomainError("points per axis must be a power of two >= 8, got " + std::to_string(size));
  }
}

std::size_t Grid::physical_count() const {
  std::size_t count = 1;
  for (int d = 0; d < dim_; ++d) count *= static_cast<std::size_t>(size_);
  return count;
}

std::size_t Grid::spectral_count() const {
  return physical_count() / static_cast<std::size_t>(size_) * static_cast<std::size_t>(half());
}

double Grid::cell_volume() const { return std::pow(2.0 * std::numbers::pi / size_, dim_); }

double Grid::volume() const { return std::pow(2.0 * std::numbers::pi, dim_); }

namespace {

std::unique_ptr<WaveTables> build_tables(const Grid& grid) {
  auto t = std::make_unique<WaveTables>();
  t->dim = grid.dim();
  t->size = grid.size();
  const std::size_t count = grid.spectral_count();
  t->k.resize(count);
  t->ksq.resize(count);
  t->weight.resize(count);
  t->nyquist.resize(count);
  const int n = grid.size();
  const int h = grid.half();
  const int nyq = n / 2;
  std::size_t idx = 0;
  auto fill = [&](int kx, int ky, int kz, int last_index) {
    t->k[idx] = {static_cast<int16_t>(kx), static_cast<int16_t>(ky), static_cast<int16_t>(kz)};
    t->ksq[idx] = kx * kx + ky * ky + kz * kz;
    t->weight[idx] = (last_index == 0 || last_index == nyq) ? 1 : 2;
    t->nyquist[idx] = (std::abs(kx) == nyq || std::abs(ky) == nyq || std::abs(kz) == nyq) ? 1 : 0;
    t->max_ksq = std::max(t->max_ksq, t->ksq[idx]);
    ++idx;
  };
  if (grid.dim() == 2) {
    for (int ix = 0; ix < n; ++ix) {
      for (int iy = 0; iy < h; ++iy) fill(grid.wavenumber(ix), iy, 0, iy);
    }
  } else {
    for (int ix = 0; ix < n; ++ix) {
      for (int iy = 0; iy < n; ++iy) {
        for (int iz = 0; iz < h; ++iz) fill(grid.wavenumber(ix), grid.wavenumber(iy), iz, iz);
      }
    }
  }
  return t;
}

}  // namespace

const WaveTables& wave_tables(const Grid& grid) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<WaveTables>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{grid.dim(), grid.size()}];
  if (!slot) slot = build_tables(grid);
  return *slot;
}

bool half_index(const Grid& grid, std::array<int, 3> k, std::size_t& index) {
  const int n = grid.size();
  const int last = grid.dim() - 1;
  auto wrap = [n](int v) { return ((v % n) + n) % n; };
  bool conjugate = false;
  int kl = wrap(k[last]);
  if (kl > n / 2) {
    conjugate = true;
    for (int d = 0; d < grid.dim(); ++d) k[d] = -k[d];
    kl = wrap(k[last]);
  }
  if (grid.dim() == 2) {
    index = static_cast<std::size_t>(wrap(k[0])) * grid.half() + kl;
  } else {
    index = (static_cast<std::size_t>(wrap(k[0])) * n + wrap(k[1])) * grid.half() + kl;
  }
  return !conjugate;
}

}  // namespace lplab
