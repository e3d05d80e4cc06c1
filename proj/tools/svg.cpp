#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "radcav/errors.hpp"

namespace radcav::cli {

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Tick step of the form {1,2,5}*10^k covering the span with 4..9 ticks.
double tick_step(double span) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

std::vector<double> ticks(double lo, double hi) {
  const double step = tick_step(hi - lo);
  std::vector<double> t;
  double v = std::ceil(lo / step) * step;
  for (; v <= hi + 0.5 * step; v += step) {
    if (std::abs(v) < 1e-12 * step) v = 0.0;
    t.push_back(v);
  }
  return t;
}

std::string color(size_t i) {
  return "hsl(" + std::to_string((static_cast<int>(i) * 67) % 360) + ",62%,42%)";
}

}  // namespace

SvgFigure::SvgFigure(std::string title, std::string xlabel, std::string ylabel,
                     int width, int height)
    : title_(std::move(title)),
      xlabel_(std::move(xlabel)),
      ylabel_(std::move(ylabel)),
      width_(width),
      height_(height) {}

void SvgFigure::add_polyline(const std::vector<double>& x, const std::vector<double>& y,
                             const std::string& label) {
  if (x.size() != y.size()) throw Error("svg: x/y length mismatch for '" + label + "'");
  curves_.push_back({x, y, label, false});
}

void SvgFigure::add_markers(const std::vector<double>& x, const std::vector<double>& y,
                            const std::string& label) {
  if (x.size() != y.size()) throw Error("svg: x/y length mismatch for '" + label + "'");
  curves_.push_back({x, y, label, true});
}

void SvgFigure::add_hline(double y, const std::string& label) {
  hlines_.push_back({y, label});
}

std::string SvgFigure::render() const {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& c : curves_) {
    for (size_t i = 0; i < c.x.size(); ++i) {
      if (!std::isfinite(c.x[i]) || !std::isfinite(c.y[i])) continue;
      xlo = std::min(xlo, c.x[i]);
      xhi = std::max(xhi, c.x[i]);
      ylo = std::min(ylo, c.y[i]);
      yhi = std::max(yhi, c.y[i]);
    }
  }
  for (const auto& h : hlines_) {
    ylo = std::min(ylo, h.y);
    yhi = std::max(yhi, h.y);
  }
  if (!std::isfinite(xlo)) { xlo = 0.0; xhi = 1.0; }
  if (!std::isfinite(ylo)) { ylo = 0.0; yhi = 1.0; }
  if (xhi <= xlo) xhi = xlo + 1.0;
  if (yhi <= ylo) yhi = ylo + (std::abs(ylo) > 0 ? std::abs(ylo) * 1e-3 : 1.0);
  const double xpad = 0.04 * (xhi - xlo);
  const double ypad = 0.06 * (yhi - ylo);
  xlo -= xpad; xhi += xpad;
  ylo -= ypad; yhi += ypad;

  const double ml = 68, mr = 16, mt = 40, mb = 52;
  const double pw = width_ - ml - mr, ph = height_ - mt - mb;
  auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double y) { return mt + (yhi - y) / (yhi - ylo) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
     << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
  os << "<!-- x range [" << fmt(xlo) << ", " << fmt(xhi) << "], y range [" << fmt(ylo)
     << ", " << fmt(yhi) << "] -->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width_ / 2.0 << "\" y=\"22\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"15\">"
     << escape_xml(title_) << "</text>\n";

  for (double t : ticks(xlo, xhi)) {
    const double X = px(t);
    os << "<line x1=\"" << fmt(X) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(X)
       << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << fmt(X) << "\" y=\"" << fmt(mt + ph + 16)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
       << "</text>\n";
  }
  for (double t : ticks(ylo, yhi)) {
    const double Y = py(t);
    os << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(Y) << "\" x2=\"" << fmt(ml + pw)
       << "\" y2=\"" << fmt(Y) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(Y + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
       << "</text>\n";
  }
  os << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
     << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  os << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(height_ - 12)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
     << escape_xml(xlabel_) << "</text>\n";
  os << "<text x=\"16\" y=\"" << fmt(mt + ph / 2)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        "transform=\"rotate(-90 16 "
     << fmt(mt + ph / 2) << ")\">" << escape_xml(ylabel_) << "</text>\n";

  for (const auto& h : hlines_) {
    const double Y = py(h.y);
    os << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(Y) << "\" x2=\"" << fmt(ml + pw)
       << "\" y2=\"" << fmt(Y)
       << "\" stroke=\"#888\" stroke-dasharray=\"6 4\" stroke-width=\"1.2\"/>\n";
    if (!h.label.empty())
      os << "<text x=\"" << fmt(ml + pw - 4) << "\" y=\"" << fmt(Y - 5)
         << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
            "fill=\"#666\">"
         << escape_xml(h.label) << "</text>\n";
  }

  size_t ci = 0;
  double legend_y = mt + 14;
  for (const auto& c : curves_) {
    const std::string col = color(ci++);
    if (c.markers) {
      for (size_t i = 0; i < c.x.size(); ++i) {
        if (!std::isfinite(c.x[i]) || !std::isfinite(c.y[i])) continue;
        os << "<circle cx=\"" << fmt(px(c.x[i])) << "\" cy=\"" << fmt(py(c.y[i]))
           << "\" r=\"3\" fill=\"" << col << "\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.6\" points=\"";
      bool first = true;
      for (size_t i = 0; i < c.x.size(); ++i) {
        if (!std::isfinite(c.x[i]) || !std::isfinite(c.y[i])) continue;
        if (!first) os << ' ';
        os << fmt(px(c.x[i])) << ',' << fmt(py(c.y[i]));
        first = false;
      }
      os << "\"/>\n";
    }
    if (!c.label.empty()) {
      os << "<line x1=\"" << fmt(ml + pw - 130) << "\" y1=\"" << fmt(legend_y - 4)
         << "\" x2=\"" << fmt(ml + pw - 110) << "\" y2=\"" << fmt(legend_y - 4)
         << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << fmt(ml + pw - 104) << "\" y=\"" << fmt(legend_y)
         << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(c.label)
         << "</text>\n";
      legend_y += 15;
    }
  }

  os << "</svg>\n";
  return os.str();
}

void SvgFigure::write(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw Error("svg: cannot open '" + path + "' for writing");
  f << render();
}

}  // namespace radcav::cli
