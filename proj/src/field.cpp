#include "lplab/field.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lplab/error.hpp"

namespace lplab {

namespace {

void check_components(int components) {
  if (components < 1) throw InvalidDataError("field needs at least one component");
}

}  // namespace

VectorField VectorField::from_spectral(const Grid& grid, int components, std::vector<Complex> coeffs) {
  check_components(components);
  if (coeffs.size() != grid.spectral_count() * static_cast<std::size_t>(components)) {
    throw InvalidDataError("spectral block has " + std::to_string(coeffs.size()) + " entries, expected " +
                           std::to_string(grid.spectral_count() * components));
  }
  for (const auto& c : coeffs) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw InvalidDataError("non-finite spectral coefficient");
    }
  }
  VectorField f(grid, components);
  f.spectral_ = std::move(coeffs);
  return f;
}

VectorField VectorField::from_physical(const Grid& grid, int components, std::vector<double> samples) {
  check_components(components);
  if (samples.size() != grid.physical_count() * static_cast<std::size_t>(components)) {
    throw InvalidDataError("physical block has " + std::to_string(samples.size()) + " entries, expected " +
                           std::to_string(grid.physical_count() * components));
  }
  for (double v : samples) {
    if (!std::isfinite(v)) throw InvalidDataError("non-finite physical sample");
  }
  VectorField f(grid, components);
  f.physical_ = std::move(samples);
  return f;
}

VectorField VectorField::from_both(const Grid& grid, int components, std::vector<Complex> coeffs,
                                   std::vector<double> samples) {
  VectorField f = from_spectral(grid, components, std::move(coeffs));
  if (samples.size() != grid.physical_count() * static_cast<std::size_t>(components)) {
    throw InvalidDataError("physical block size mismatch");
  }
  f.physical_ = std::move(samples);
  return f;
}

VectorField VectorField::zeros(const Grid& grid, int components) {
  return from_spectral(grid, components, std::vector<Complex>(grid.spectral_count() * components));
}

VectorField::Representation VectorField::representation() const {
  if (has_spectral() && has_physical()) return Representation::both;
  return has_spectral() ? Representation::spectral : Representation::physical;
}

std::span<const Complex> VectorField::spectral() const {
  if (!has_spectral()) throw std::logic_error("spectral representation not cached");
  return spectral_;
}

std::span<const Complex> VectorField::spectral(int component) const {
  const std::size_t n = grid_.spectral_count();
  return spectral().subspan(n * component, n);
}

std::span<const double> VectorField::physical() const {
  if (!has_physical()) throw std::logic_error("physical representation not cached");
  return physical_;
}

std::span<const double> VectorField::physical(int component) const {
  const std::size_t n = grid_.physical_count();
  return physical().subspan(n * component, n);
}

Complex VectorField::coefficient(int component, std::array<int, 3> k) const {
  std::size_t index = 0;
  const bool direct = half_index(grid_, k, index);
  const Complex c = spectral(component)[index];
  return direct ? c : std::conj(c);
}

}  // namespace lplab
