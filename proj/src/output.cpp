#include "phoband/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "json.hpp"
#include "phoband/errors.hpp"

namespace phoband {

namespace {

constexpr const char* kBandsHeader =
    "segment_index,path_param,k1,k2,band_index,re_omega_over_c,im_omega_over_c,re_omega_over_2pic";

double parse_double(const std::string& s, int lineno) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("bands.csv line " + std::to_string(lineno) + ": bad number '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, int lineno) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("bands.csv line " + std::to_string(lineno) + ": bad integer '" + s + "'");
  }
  return v;
}

// M1 -> M with a subscript 1
std::string svg_label(const std::string& label) {
  static const char* sub[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
  std::string out;
  for (char c : label) {
    if (c >= '0' && c <= '9') out += sub[c - '0'];
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

void write_bands_csv(const BandDiagram& diagram, std::ostream& out) {
  out << kBandsHeader << '\n';
  for (const auto& rec : diagram.records) {
    const std::string prefix = fmt::format("{},{},{},{}", rec.segment_index, rec.path_param, rec.k[0], rec.k[1]);
    if (rec.eigenvalues.empty()) {
      out << prefix << ",-1,,,\n";
      continue;
    }
    for (std::size_t b = 0; b < rec.eigenvalues.size(); ++b) {
      const cplx w = rec.eigenvalues[b];
      out << fmt::format("{},{},{},{},{}\n", prefix, b, w.real(), w.imag(), w.real() / kTwoPi);
    }
  }
}

std::vector<BandRecord> read_bands_csv(std::istream& in) {
  std::vector<BandRecord> records;
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line) || line != kBandsHeader) throw ParseError("bands.csv: missing or unexpected header");
  ++lineno;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string item;
    std::istringstream is(line);
    while (std::getline(is, item, ',')) f.push_back(item);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 8) throw ParseError("bands.csv line " + std::to_string(lineno) + ": expected 8 fields");
    const int seg = parse_int(f[0], lineno);
    const double t = parse_double(f[1], lineno);
    const Vec2 k{parse_double(f[2], lineno), parse_double(f[3], lineno)};
    const int band = parse_int(f[4], lineno);
    const bool same = !records.empty() && records.back().segment_index == seg && records.back().path_param == t &&
                      records.back().k == k && band > 0;
    if (!same) {
      if (band > 0) throw ParseError("bands.csv line " + std::to_string(lineno) + ": band index out of sequence");
      records.push_back(BandRecord{seg, t, k, {}});
    }
    if (band < 0) continue;
    if (band != static_cast<int>(records.back().eigenvalues.size())) {
      throw ParseError("bands.csv line " + std::to_string(lineno) + ": band index out of sequence");
    }
    records.back().eigenvalues.emplace_back(parse_double(f[5], lineno), parse_double(f[6], lineno));
  }
  return records;
}

void write_bands_json(const BandDiagram& diagram, std::ostream& out) {
  using nlohmann::json;
  const auto& m = diagram.metadata;
  json meta = {
      {"mesh_h", m.mesh_h},
      {"n_dofs", m.n_dofs},
      {"model", m.model},
      {"region", {{"center", {m.region.center.real(), m.region.center.imag()}}, {"half_side", m.region.half_side}}},
      {"sim",
       {{"delta0", m.cfg.delta0},
        {"beta0", m.cfg.beta0},
        {"m0", m.cfg.m0},
        {"seed", m.cfg.rng_seed},
        {"max_level", m.cfg.max_level}}},
      {"vertex_params", m.vertex_params},
      {"vertex_labels", m.vertex_labels},
  };
  json failures = json::array();
  for (const auto& f : m.failures) failures.push_back({{"sample", f.sample}, {"message", f.message}});
  meta["failures"] = failures;
  json records = json::array();
  for (const auto& r : diagram.records) {
    json ev = json::array();
    for (const cplx w : r.eigenvalues) ev.push_back({w.real(), w.imag()});
    records.push_back(
        {{"segment_index", r.segment_index}, {"path_param", r.path_param}, {"k", {r.k[0], r.k[1]}}, {"omega_over_c", ev}});
  }
  out << json{{"metadata", meta}, {"records", records}}.dump(1) << '\n';
}

void write_bands_svg(const BandDiagram& diagram, std::ostream& out, const SvgOverlay& overlay) {
  constexpr double width = 640, height = 480, left = 70, right = 20, top = 20, bottom = 50;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t bands = 0;
  for (const auto& r : diagram.records) {
    bands = std::max(bands, r.eigenvalues.size());
    for (const cplx w : r.eigenvalues) {
      lo = std::min(lo, w.real() / kTwoPi);
      hi = std::max(hi, w.real() / kTwoPi);
    }
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  lo = std::min(lo, 0.0);
  if (hi <= lo) hi = lo + 1.0;
  hi += 0.05 * (hi - lo);
  auto px = [&](double t) { return left + t * (width - left - right); };
  auto py = [&](double v) { return height - bottom - (v - lo) / (hi - lo) * (height - top - bottom); };

  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      width, height, width, height, left, top, width - left - right, height - top - bottom);

  const auto& m = diagram.metadata;
  for (std::size_t v = 0; v < m.vertex_params.size(); ++v) {
    const double x = px(m.vertex_params[v]);
    out << fmt::format("<line x1=\"{:.2f}\" y1=\"{}\" x2=\"{:.2f}\" y2=\"{}\" stroke=\"#bbbbbb\"/>\n", x, top, x,
                       height - bottom);
    if (v < m.vertex_labels.size()) {
      out << fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", x,
                         height - bottom + 20, svg_label(m.vertex_labels[v]));
    }
  }
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double v = lo + (hi - lo) * i / ticks;
    out << fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\" font-size=\"12\">{:.3f}</text>\n", left - 6,
                       py(v) + 4, v);
  }
  out << fmt::format(
      "<text x=\"18\" y=\"{:.2f}\" font-size=\"14\" transform=\"rotate(-90 18 {:.2f})\" "
      "text-anchor=\"middle\">ωa/2πc</text>\n",
      0.5 * (top + height - bottom), 0.5 * (top + height - bottom));

  for (const auto& curve : overlay) {
    out << "<polyline fill=\"none\" stroke=\"#e07020\" stroke-dasharray=\"4 3\" points=\"";
    for (const auto& [t, v] : curve) out << fmt::format("{:.2f},{:.2f} ", px(t), py(v));
    out << "\"/>\n";
  }
  for (std::size_t b = 0; b < bands; ++b) {
    out << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : diagram.records) {
      if (b < r.eigenvalues.size()) {
        out << fmt::format("{:.2f},{:.2f} ", px(r.path_param), py(r.eigenvalues[b].real() / kTwoPi));
      }
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

void write_converge_csv(const ConvergenceReport& report, std::ostream& out) {
  out << "n,h,re_omega_over_c,im_omega_over_c,re_omega_over_2pic,xi,order\n";
  for (const auto& r : report.rows) {
    out << fmt::format("{},{},{},{},{},{},{}\n", r.n, r.h, r.omega.real(), r.omega.imag(), r.omega.real() / kTwoPi,
                       r.xi ? fmt::format("{}", *r.xi) : std::string(),
                       r.order ? fmt::format("{}", *r.order) : std::string());
  }
}

}  // namespace phoband
