#pragma once

#include <string>
#include <vector>

#include "lplab/dynamics.hpp"
#include "lplab/field.hpp"

namespace lplab {

/// FLD1 snapshot: "FLD1", u8 dim, u8 components, u32 LE size, then the
/// physical samples as LE f64, component-major, last axis fastest.
std::vector<unsigned char> encode_fld1(const VectorField& f);
/// Throws InvalidDataError on a malformed header, size mismatch or
/// non-finite samples.
VectorField decode_fld1(const std::vector<unsigned char>& bytes);

/// Throws InvalidDataError when the file cannot be written or read.
void write_fld1(const std::string& path, const VectorField& f);
VectorField read_fld1(const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// Shortest round-trip decimal form of x ("nan", "inf" for non-finite).
std::string format_number(double x);

/// `t,L2,H1,H32,H52,B52_21,res_h32,res_besov`, one row per record. Residuals
/// (lhs - rhs) are blank where a check was not run or not evaluated.
std::string trajectory_csv(const Trajectory& traj, const H32Check* h32, const BesovBlockCheck* besov);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  bool log_x = false;
  std::vector<PlotSeries> series;
};

/// Self-contained SVG line plot. Points that are non-finite (or
/// non-positive on a log axis) are skipped.
std::string render_svg(const PlotSpec& spec);

}  // namespace lplab
