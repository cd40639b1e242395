#include "lplab/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "lplab/error.hpp"
#include "lplab/spectral.hpp"

namespace lplab {

namespace {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f64(std::vector<unsigned char>& out, double x) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
  return std::bit_cast<double>(bits);
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round numbers for axis ticks: 1, 2, 5 x 10^k.
std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (span / step <= 6.0) break;
  }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) out.push_back(v);
  return out;
}

const std::array<const char*, 8> kColours{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::vector<unsigned char> encode_fld1(const VectorField& f) {
  const VectorField p = to_physical(f);
  const Grid& g = p.grid();
  std::vector<unsigned char> out{'F', 'L', 'D', '1'};
  out.push_back(static_cast<unsigned char>(g.dim()));
  out.push_back(static_cast<unsigned char>(p.components()));
  put_u32(out, static_cast<std::uint32_t>(g.size()));
  out.reserve(out.size() + 8 * p.physical().size());
  for (double x : p.physical()) put_f64(out, x);
  return out;
}

VectorField decode_fld1(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 10 || std::memcmp(bytes.data(), "FLD1", 4) != 0) throw InvalidDataError("not an FLD1 file");
  const int dim = bytes[4];
  const int comps = bytes[5];
  std::uint32_t size = 0;
  for (int i = 3; i >= 0; --i) size = (size << 8) | bytes[6 + i];
  if (dim != 2 && dim != 3) throw InvalidDataError("FLD1: dimension must be 2 or 3");
  if (comps < 1) throw InvalidDataError("FLD1: no components");
  if (size < 8 || size > (1u << 12) || (size & (size - 1)) != 0) {
    throw InvalidDataError("FLD1: grid size must be a power of two >= 8");
  }
  const Grid g(dim, static_cast<int>(size));
  const std::size_t count = g.physical_count() * comps;
  if (bytes.size() != 10 + 8 * count) {
    throw InvalidDataError("FLD1: expected " + std::to_string(10 + 8 * count) + " bytes, got " +
                           std::to_string(bytes.size()));
  }
  std::vector<double> samples(count);
  for (std::size_t i = 0; i < count; ++i) samples[i] = get_f64(bytes.data() + 10 + 8 * i);
  return VectorField::from_physical(g, comps, std::move(samples));
}

void write_fld1(const std::string& path, const VectorField& f) {
  const auto bytes = encode_fld1(f);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InvalidDataError("cannot write " + path);
}

VectorField read_fld1(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidDataError("cannot read " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_fld1(bytes);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw InvalidDataError("cannot write " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidDataError("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string trajectory_csv(const Trajectory& traj, const H32Check* h32, const BesovBlockCheck* besov) {
  const std::size_t n = traj.records.size();
  std::vector<std::string> res_h32(n), res_besov(n);
  // Both checks evaluate records 2 .. n-3 in order.
  if (h32) {
    for (std::size_t i = 0; i < h32->pre_young.t.size(); ++i) {
      res_h32[i + 2] = format_number(h32->pre_young.lhs[i] - h32->pre_young.rhs[i]);
    }
  }
  if (besov) {
    for (std::size_t i = 0; i < besov->summed.t.size(); ++i) {
      res_besov[i + 2] = format_number(besov->summed.lhs[i] - besov->summed.rhs[i]);
    }
  }
  std::ostringstream out;
  out << "t,L2,H1,H32,H52,B52_21,res_h32,res_besov\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = traj.records[i];
    out << format_number(r.t) << ',' << format_number(r.l2) << ',' << format_number(r.h1) << ','
        << format_number(r.h_mid) << ',' << format_number(r.h_top) << ',' << format_number(r.besov) << ','
        << res_h32[i] << ',' << res_besov[i] << '\n';
  }
  return out.str();
}

std::string render_svg(const PlotSpec& spec) {
  constexpr double W = 720, H = 440, L = 80, R = 170, T = 40, B = 56;
  auto tx = [&](double x) { return spec.log_x ? std::log10(x) : x; };
  auto ty = [&](double y) { return spec.log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0) && (!spec.log_y || y > 0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 <= 0) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 <= 0) y0 -= 0.5 * std::max(1.0, std::abs(y0)), y1 += 0.5 * std::max(1.0, std::abs(y1));
  const double pad = 0.04 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o.precision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(spec.title)
    << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  auto tick_label = [](double v, bool log) {
    std::ostringstream s;
    s.precision(4);
    if (log) {
      s << "1e" << v;
    } else {
      s << (std::abs(v) < 1e-12 ? 0.0 : v);
    }
    return s.str();
  };
  for (double v : linear_ticks(x0, x1)) {
    o << "<line x1=\"" << px(v) << "\" y1=\"" << H - B << "\" x2=\"" << px(v) << "\" y2=\"" << H - B + 5
      << "\" stroke=\"black\"/>";
    o << "<text x=\"" << px(v) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
      << tick_label(v, spec.log_x) << "</text>\n";
  }
  for (double v : linear_ticks(y0, y1)) {
    o << "<line x1=\"" << L - 5 << "\" y1=\"" << py(v) << "\" x2=\"" << L << "\" y2=\"" << py(v)
      << "\" stroke=\"black\"/>";
    o << "<text x=\"" << L - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << tick_label(v, spec.log_y)
      << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
    << escape_xml(spec.x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape_xml(spec.y_label) << "</text>\n";
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const char* colour = kColours[k % kColours.size()];
    o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.6\"";
    if (s.dashed) o << " stroke-dasharray=\"6 4\"";
    o << " points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      o << px(tx(s.x[i])) << ',' << py(ty(s.y[i])) << ' ';
    }
    o << "\"/>\n";
    const double ly = T + 14 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 36 << "\" y2=\"" << ly
      << "\" stroke=\"" << colour << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
      << "/>";
    o << "<text x=\"" << W - R + 42 << "\" y=\"" << ly + 4 << "\">" << escape_xml(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace lplab
