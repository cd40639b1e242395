#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace lplab {

/// Uniform discretisation of the periodic box [0, 2pi)^dim.
///
/// Spectral data uses the real-to-complex half layout: all axes are full
/// except the last one, which keeps wavenumbers 0..size/2. Physical data is
/// row-major with the last axis fastest.
class Grid {
 public:
  /// Throws DomainError unless dim is 2 or 3 and size is a power of two >= 8.
  Grid(int dim, int size);

  int dim() const { return dim_; }
  int size() const { return size_; }
  /// Number of stored wavenumbers along the last axis.
  int half() const { return size_ / 2 + 1; }

  std::size_t physical_count() const;
  std::size_t spectral_count() const;

  /// Quadrature weight (2pi/size)^dim of one grid point.
  double cell_volume() const;
  /// (2pi)^dim.
  double volume() const;

  /// Largest per-axis wavenumber that survives the 2/3 rule.
  int dealias_cutoff() const { return size_ / 3; }

  /// Signed wavenumber of a full-axis index.
  int wavenumber(int index) const { return index <= size_ / 2 ? index : index - size_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int dim_;
  int size_;
};

/// Per-grid lookup tables over the half-layout spectral indices. Built once
/// per (dim, size) and shared; immutable after construction.
struct WaveTables {
  int dim = 0;
  int size = 0;
  /// Signed integer wavevector, padded with zeros to three components.
  std::vector<std::array<int16_t, 3>> k;
  /// |k|^2.
  std::vector<int32_t> ksq;
  /// Multiplicity in full-lattice sums (2 for interior half-layout modes,
  /// 1 on the self-conjugate planes of the last axis).
  std::vector<uint8_t> weight;
  /// True when some component equals the Nyquist wavenumber size/2.
  std::vector<uint8_t> nyquist;
  int max_ksq = 0;
};

const WaveTables& wave_tables(const Grid& grid);

/// Half-layout index of a full-lattice wavevector. Returns false when the
/// wavevector lives in the conjugate half; `index` then points at -k.
bool half_index(const Grid& grid, std::array<int, 3> k, std::size_t& index);

}  // namespace lplab
