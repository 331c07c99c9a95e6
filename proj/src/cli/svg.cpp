#include "lrgan/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lrgan {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
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

// Round tick spacing covering [lo, hi] with about `target` intervals.
std::vector<double> ticks(double lo, double hi, int target) {
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) out.push_back(t);
  return out;
}

}  // namespace

std::string render_svg_lineplot(const std::vector<Series>& series, const PlotOptions& options) {
  if (series.empty()) throw std::invalid_argument("render_svg_lineplot: no series");
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points)
      if (std::isfinite(x) && std::isfinite(y)) {
        xlo = std::min(xlo, x);
        xhi = std::max(xhi, x);
        ylo = std::min(ylo, y);
        yhi = std::max(yhi, y);
      }
  if (options.reference_y) {
    ylo = std::min(ylo, *options.reference_y);
    yhi = std::max(yhi, *options.reference_y);
  }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1;
  if (!std::isfinite(ylo)) ylo = 0, yhi = 1;
  if (xhi - xlo <= 0) xlo -= 0.5, xhi += 0.5;
  if (yhi - ylo <= 0) ylo -= 0.5, yhi += 0.5;
  const double pad = 0.05 * (yhi - ylo);
  ylo -= pad;
  yhi += pad;

  const double W = options.width, H = options.height;
  const double left = 70, right = W - 160, top = 40, bottom = H - 50;
  const auto sx = [&](double x) { return left + (x - xlo) / (xhi - xlo) * (right - left); };
  const auto sy = [&](double y) { return bottom - (y - ylo) / (yhi - ylo) * (bottom - top); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(options.width) +
         "\" height=\"" + std::to_string(options.height) + "\" viewBox=\"0 0 " +
         std::to_string(options.width) + " " + std::to_string(options.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty())
    out += "<text x=\"" + num(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" + escape(options.title) + "</text>\n";
  out += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (double t : ticks(xlo, xhi, 6)) {
    out += "<line x1=\"" + num(sx(t)) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(sx(t)) +
           "\" y2=\"" + num(bottom + 5) + "\" stroke=\"#333\"/>\n";
    out += "<text x=\"" + num(sx(t)) + "\" y=\"" + num(bottom + 18) + "\" text-anchor=\"middle\">" +
           tick_label(t) + "</text>\n";
  }
  for (double t : ticks(ylo, yhi, 5)) {
    out += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(sy(t)) + "\" x2=\"" + num(right) +
           "\" y2=\"" + num(sy(t)) + "\" stroke=\"#e6e6e6\"/>\n";
    out += "<text x=\"" + num(left - 8) + "\" y=\"" + num(sy(t) + 4) + "\" text-anchor=\"end\">" +
           tick_label(t) + "</text>\n";
  }
  out += "<text x=\"" + num((left + right) / 2) + "\" y=\"" + num(H - 12) +
         "\" text-anchor=\"middle\">" + escape(options.x_label) + "</text>\n";
  if (!options.y_label.empty())
    out += "<text x=\"16\" y=\"" + num((top + bottom) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           num((top + bottom) / 2) + ")\">" + escape(options.y_label) + "</text>\n";
  out += "</g>\n";
  out += "<polyline class=\"axes\" fill=\"none\" stroke=\"#333\" points=\"" + num(left) + "," +
         num(top) + " " + num(left) + "," + num(bottom) + " " + num(right) + "," + num(bottom) + "\"/>\n";
  if (options.reference_y) {
    const double y = sy(*options.reference_y);
    out += "<line class=\"reference\" x1=\"" + num(left) + "\" y1=\"" + num(y) + "\" x2=\"" +
           num(right) + "\" y2=\"" + num(y) + "\" stroke=\"#555\" stroke-dasharray=\"6 4\"/>\n";
    out += "<text x=\"" + num(right + 4) + "\" y=\"" + num(y + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">y = " + tick_label(*options.reference_y) +
           "</text>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* colour = kPalette[i % std::size(kPalette)];
    out += "<polyline class=\"series\" fill=\"none\" stroke=\"" + std::string(colour) +
           "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& [x, y] : series[i].points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      out += (first ? "" : " ") + num(sx(x)) + "," + num(sy(y));
      first = false;
    }
    out += "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(i);
    out += "<line x1=\"" + num(right + 40) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(right + 60) +
           "\" y2=\"" + num(ly) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(right + 64) + "\" y=\"" + num(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(series[i].name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void emit_svg_lineplot(const std::vector<Series>& series, const std::filesystem::path& path,
                       const PlotOptions& options) {
  const std::string svg = render_svg_lineplot(series, options);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << svg;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace lrgan
