// Static SVG figures: p-value heatmap, Cohen's d bar chart, label-vs-score scatter.
// Output is self-contained (no external fonts, images or stylesheets). Elements
// carry class names and data-* attributes so tests and scripts can read values back.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "simcmp/error.hpp"
#include "simcmp/report.hpp"

namespace simcmp::report {

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fixed(double v) { return fmt::format("{:.3f}", v); }

// Viridis sampled at ten evenly spaced stops.
constexpr std::array<std::array<int, 3>, 10> kViridis = {{{68, 1, 84},
                                                          {72, 40, 120},
                                                          {62, 73, 137},
                                                          {49, 104, 142},
                                                          {38, 130, 142},
                                                          {31, 158, 137},
                                                          {53, 183, 121},
                                                          {110, 206, 88},
                                                          {181, 222, 43},
                                                          {253, 231, 37}}};

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                                  "#bcbd22", "#17becf"};

constexpr const char* kFont = "font-family=\"sans-serif\"";

void check_grid(const Grid& grid, const std::vector<std::string>& rows,
                const std::vector<std::string>& cols) {
  if (grid.empty() || rows.empty() || cols.empty()) throw UsageError("cannot plot an empty matrix");
  if (grid.size() != rows.size()) throw UsageError("matrix rows do not match row labels");
  for (const auto& r : grid) {
    if (r.size() != cols.size()) throw UsageError("matrix columns do not match column labels");
  }
}

void write_svg(const std::filesystem::path& path, const std::string& svg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << svg;
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

std::size_t longest(const std::vector<std::string>& labels) {
  std::size_t n = 0;
  for (const auto& l : labels) n = std::max(n, l.size());
  return n;
}

}  // namespace

std::string Rgb::hex() const { return fmt::format("#{:02x}{:02x}{:02x}", r, g, b); }

Rgb heat_color(double t) {
  t = std::clamp(std::isnan(t) ? 0.0 : t, 0.0, 1.0);
  const double pos = t * static_cast<double>(kViridis.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, kViridis.size() - 1);
  const double f = pos - static_cast<double>(lo);
  auto mix = [&](int k) {
    return static_cast<int>(std::lround(kViridis[lo][k] + f * (kViridis[hi][k] - kViridis[lo][k])));
  };
  return {mix(0), mix(1), mix(2)};
}

std::string format_sci(double value) {
  if (std::isnan(value)) return "nan";
  if (value == 0.0) return "0.0e0";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  int exponent = static_cast<int>(std::floor(std::log10(std::fabs(value))));
  double mantissa = value / std::pow(10.0, exponent);
  mantissa = std::round(mantissa * 10.0) / 10.0;
  if (std::fabs(mantissa) >= 10.0) {
    mantissa /= 10.0;
    ++exponent;
  }
  return fmt::format("{:.1f}e{}", mantissa, exponent);
}

// --- heatmap -----------------------------------------------------------------

std::string render_heatmap(const Grid& p_matrix, const std::vector<std::string>& rows,
                           const std::vector<std::string>& cols) {
  check_grid(p_matrix, rows, cols);
  const double cell_w = std::max(110.0, 7.0 * static_cast<double>(longest(cols)) + 16.0);
  const double cell_h = 34.0;
  const double left = 7.5 * static_cast<double>(longest(rows)) + 20.0;
  const double top = 60.0;
  const double legend_h = 70.0;
  const double width = left + cell_w * static_cast<double>(cols.size()) + 20.0;
  const double height = top + cell_h * static_cast<double>(rows.size()) + legend_h;

  std::ostringstream svg;
  svg << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      fixed(width), fixed(height));
  svg << "<defs><pattern id=\"hatch\" width=\"8\" height=\"8\" patternUnits=\"userSpaceOnUse\" "
         "patternTransform=\"rotate(45)\"><rect width=\"8\" height=\"8\" fill=\"#eeeeee\"/>"
         "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\"#999999\" stroke-width=\"3\"/>"
         "</pattern></defs>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << fmt::format("<text class=\"title\" x=\"{}\" y=\"22\" {} font-size=\"15\">"
                     "Paired t-test p-values (color: log10 p, clamped to [{:g}, 0])</text>\n",
                     fixed(left), kFont, kLog10PFloor);

  for (std::size_t c = 0; c < cols.size(); ++c) {
    svg << fmt::format(
        "<text class=\"col-label\" x=\"{}\" y=\"{}\" {} font-size=\"12\" "
        "text-anchor=\"middle\">{}</text>\n",
        fixed(left + cell_w * (static_cast<double>(c) + 0.5)), fixed(top - 8.0), kFont,
        xml_escape(cols[c]));
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double y = top + cell_h * static_cast<double>(r);
    svg << fmt::format(
        "<text class=\"row-label\" x=\"{}\" y=\"{}\" {} font-size=\"12\" "
        "text-anchor=\"end\">{}</text>\n",
        fixed(left - 8.0), fixed(y + cell_h / 2.0 + 4.0), kFont, xml_escape(rows[r]));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double x = left + cell_w * static_cast<double>(c);
      const auto& p = p_matrix[r][c];
      if (!p) {
        svg << fmt::format(
            "<rect class=\"cell failed\" data-row=\"{}\" data-col=\"{}\" x=\"{}\" y=\"{}\" "
            "width=\"{}\" height=\"{}\" fill=\"url(#hatch)\" stroke=\"white\"/>\n",
            r, c, fixed(x), fixed(y), fixed(cell_w), fixed(cell_h));
        svg << fmt::format(
            "<text class=\"annotation\" x=\"{}\" y=\"{}\" {} font-size=\"12\" "
            "text-anchor=\"middle\">failed</text>\n",
            fixed(x + cell_w / 2.0), fixed(y + cell_h / 2.0 + 4.0), kFont);
        continue;
      }
      const double log10p = *p > 0.0 ? std::log10(*p) : kLog10PFloor;
      const double clamped = std::clamp(log10p, kLog10PFloor, 0.0);
      const double t = (clamped - kLog10PFloor) / -kLog10PFloor;
      const auto color = heat_color(t);
      const bool dark = t < 0.6;
      svg << fmt::format(
          "<rect class=\"cell\" data-row=\"{}\" data-col=\"{}\" data-log10p=\"{:.6g}\" "
          "data-clamped=\"{:.6g}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" "
          "stroke=\"white\"/>\n",
          r, c, log10p, clamped, fixed(x), fixed(y), fixed(cell_w), fixed(cell_h), color.hex());
      svg << fmt::format(
          "<text class=\"annotation\" x=\"{}\" y=\"{}\" {} font-size=\"12\" "
          "text-anchor=\"middle\" fill=\"{}\">{}</text>\n",
          fixed(x + cell_w / 2.0), fixed(y + cell_h / 2.0 + 4.0), kFont,
          dark ? "white" : "black", format_sci(*p));
    }
  }

  // Color legend from the clamp floor to 0.
  const double ly = top + cell_h * static_cast<double>(rows.size()) + 22.0;
  const double lw = std::max(200.0, cell_w * static_cast<double>(cols.size()));
  constexpr int kSteps = 50;
  for (int s = 0; s < kSteps; ++s) {
    const double t = (s + 0.5) / kSteps;
    svg << fmt::format(
        "<rect class=\"legend\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"12\" fill=\"{}\"/>\n",
        fixed(left + lw * s / kSteps), fixed(ly), fixed(lw / kSteps + 0.5), heat_color(t).hex());
  }
  svg << fmt::format("<text class=\"legend-label\" x=\"{}\" y=\"{}\" {} font-size=\"11\">"
                     "log10 p = {:g}</text>\n",
                     fixed(left), fixed(ly + 28.0), kFont, kLog10PFloor);
  svg << fmt::format("<text class=\"legend-label\" x=\"{}\" y=\"{}\" {} font-size=\"11\" "
                     "text-anchor=\"end\">log10 p = 0</text>\n",
                     fixed(left + lw), fixed(ly + 28.0), kFont);
  svg << "</svg>\n";
  return svg.str();
}

// --- Cohen's d bars ----------------------------------------------------------

std::string render_bar_chart(const Grid& d_matrix, const std::vector<std::string>& rows,
                             const std::vector<std::string>& cols) {
  check_grid(d_matrix, rows, cols);
  double max_abs = 0.0;
  for (const auto& r : d_matrix) {
    for (const auto& v : r) {
      if (v && std::isfinite(*v)) max_abs = std::max(max_abs, std::fabs(*v));
    }
  }
  const double range = std::max(1.0, 1.1 * max_abs);

  const double bar_w = 14.0;
  const double group_gap = 30.0;
  const double group_w = bar_w * static_cast<double>(rows.size()) + group_gap;
  const double left = 60.0;
  const double top = 40.0;
  const double plot_h = 320.0;
  const double legend_w = 8.0 * static_cast<double>(longest(rows)) + 40.0;
  const double width =
      left + std::max(group_w * static_cast<double>(cols.size()), 240.0) + legend_w + 20.0;
  const double height = top + plot_h + 60.0;
  const double zero_y = top + plot_h / 2.0;
  auto y_of = [&](double d) { return zero_y - d / range * (plot_h / 2.0); };
  const double plot_right = left + std::max(group_w * static_cast<double>(cols.size()), 240.0);

  std::ostringstream svg;
  svg << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      fixed(width), fixed(height));
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << fmt::format("<text class=\"title\" x=\"{}\" y=\"22\" {} font-size=\"15\">"
                     "Cohen's d per metric and dataset pair</text>\n",
                     fixed(left), kFont);

  for (double g : {0.2, 0.5, 0.8, -0.2, -0.5, -0.8}) {
    svg << fmt::format(
        "<line class=\"guide\" data-value=\"{:g}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" "
        "stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n",
        g, fixed(left), fixed(y_of(g)), fixed(plot_right), fixed(y_of(g)));
    svg << fmt::format("<text class=\"guide-label\" x=\"{}\" y=\"{}\" {} font-size=\"10\" "
                       "text-anchor=\"end\">{:+.1f}</text>\n",
                       fixed(left - 4.0), fixed(y_of(g) + 3.0), kFont, g);
  }
  svg << fmt::format(
      "<line class=\"axis\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
      fixed(left), fixed(zero_y), fixed(plot_right), fixed(zero_y));

  for (std::size_t c = 0; c < cols.size(); ++c) {
    const double gx = left + group_w * static_cast<double>(c) + group_gap / 2.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double x = gx + bar_w * static_cast<double>(r);
      const auto& d = d_matrix[r][c];
      if (!d) {
        svg << fmt::format(
            "<text class=\"missing\" x=\"{}\" y=\"{}\" {} font-size=\"10\" "
            "text-anchor=\"middle\">×</text>\n",
            fixed(x + bar_w / 2.0), fixed(zero_y - 2.0), kFont);
        continue;
      }
      const bool clipped = !std::isfinite(*d);
      const double shown = std::clamp(*d, -range, range);
      const double y_tip = y_of(shown);
      const double y = std::min(y_tip, zero_y);
      const double h = std::fabs(zero_y - y_tip);
      svg << fmt::format(
          "<rect class=\"bar{}\" data-metric=\"{}\" data-pair=\"{}\" data-d=\"{:.6g}\" "
          "data-tip=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
          clipped ? " clipped" : "", xml_escape(rows[r]), xml_escape(cols[c]), *d, fixed(y_tip),
          fixed(x), fixed(y), fixed(bar_w - 2.0), fixed(h), kPalette[r % kPalette.size()]);
    }
    svg << fmt::format(
        "<text class=\"col-label\" x=\"{}\" y=\"{}\" {} font-size=\"12\" "
        "text-anchor=\"middle\">{}</text>\n",
        fixed(gx + bar_w * static_cast<double>(rows.size()) / 2.0), fixed(top + plot_h + 20.0),
        kFont, xml_escape(cols[c]));
  }

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double ly = top + 10.0 + 18.0 * static_cast<double>(r);
    svg << fmt::format(
        "<rect class=\"legend\" x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n",
        fixed(plot_right + 16.0), fixed(ly), kPalette[r % kPalette.size()]);
    svg << fmt::format("<text class=\"legend-label\" x=\"{}\" y=\"{}\" {} font-size=\"11\">{}"
                       "</text>\n",
                       fixed(plot_right + 32.0), fixed(ly + 10.0), kFont, xml_escape(rows[r]));
  }
  svg << "</svg>\n";
  return svg.str();
}

// --- label vs score ----------------------------------------------------------

std::string render_label_score_plot(const corpus::Dataset& dataset, const ScoreVector& scores) {
  if (scores.scored.empty()) throw UsageError("label-score plot needs at least one scored record");
  std::map<std::string_view, double> label_of;
  for (const auto& r : dataset.records) label_of.emplace(r.id, r.label);

  double lo = scores.scored.front().score;
  double hi = lo;
  for (const auto& s : scores.scored) {
    lo = std::min(lo, s.score);
    hi = std::max(hi, s.score);
  }
  const bool degenerate = !(hi > lo);
  const auto corr = stats::label_score_correlation(dataset, scores);

  const double left = 60.0;
  const double top = 50.0;
  const double plot = 320.0;
  const double width = left + plot + 40.0;
  const double height = top + plot + 60.0;
  auto px = [&](double label) { return left + label / 5.0 * plot; };
  auto py = [&](double norm) { return top + (1.0 - norm) * plot; };

  std::ostringstream svg;
  svg << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      fixed(width), fixed(height));
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << fmt::format("<text class=\"title\" x=\"{}\" y=\"20\" {} font-size=\"14\">{}: gold label "
                     "vs {} (min-max normalized)</text>\n",
                     fixed(left), kFont, xml_escape(dataset.name), xml_escape(scores.metric_name));
  auto coef = [](const std::optional<double>& v) {
    return v ? fmt::format("{:.4f}", *v) : std::string("n/a");
  };
  svg << fmt::format("<text class=\"stats\" x=\"{}\" y=\"38\" {} font-size=\"12\">Pearson r = {}, "
                     "Spearman rho = {}, n = {}</text>\n",
                     fixed(left), kFont, coef(corr.pearson), coef(corr.spearman), corr.n);
  svg << fmt::format(
      "<rect class=\"frame\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      fixed(left), fixed(top), fixed(plot), fixed(plot));
  for (int l = 0; l <= 5; ++l) {
    svg << fmt::format("<text class=\"tick\" x=\"{}\" y=\"{}\" {} font-size=\"10\" "
                       "text-anchor=\"middle\">{}</text>\n",
                       fixed(px(l)), fixed(top + plot + 14.0), kFont, l);
  }
  for (double v : {0.0, 0.5, 1.0}) {
    svg << fmt::format("<text class=\"tick\" x=\"{}\" y=\"{}\" {} font-size=\"10\" "
                       "text-anchor=\"end\">{:.1f}</text>\n",
                       fixed(left - 4.0), fixed(py(v) + 3.0), kFont, v);
  }
  svg << fmt::format("<text class=\"axis-label\" x=\"{}\" y=\"{}\" {} font-size=\"12\" "
                     "text-anchor=\"middle\">gold label</text>\n",
                     fixed(left + plot / 2.0), fixed(top + plot + 34.0), kFont);
  if (degenerate) {
    svg << fmt::format("<text class=\"note\" x=\"{}\" y=\"{}\" {} font-size=\"11\" "
                       "fill=\"#b00000\">degenerate scale: all scores equal, drawn at 0.5</text>\n",
                       fixed(left + 6.0), fixed(top + 14.0), kFont);
  }
  for (const auto& s : scores.scored) {
    auto it = label_of.find(s.id);
    if (it == label_of.end()) continue;
    const double norm = degenerate ? 0.5 : (s.score - lo) / (hi - lo);
    svg << fmt::format(
        "<circle class=\"point\" data-id=\"{}\" data-label=\"{:.6g}\" data-norm=\"{:.9g}\" "
        "cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#1f77b4\" fill-opacity=\"0.45\"/>\n",
        xml_escape(s.id), it->second, norm, fixed(px(it->second)), fixed(py(norm)));
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_heatmap(const Grid& p_matrix, const std::vector<std::string>& rows,
                  const std::vector<std::string>& cols, const std::filesystem::path& path) {
  write_svg(path, render_heatmap(p_matrix, rows, cols));
}

void emit_bar_chart(const Grid& d_matrix, const std::vector<std::string>& rows,
                    const std::vector<std::string>& cols, const std::filesystem::path& path) {
  write_svg(path, render_bar_chart(d_matrix, rows, cols));
}

void emit_label_score_plot(const corpus::Dataset& dataset, const ScoreVector& scores,
                           const std::filesystem::path& path) {
  write_svg(path, render_label_score_plot(dataset, scores));
}

}  // namespace simcmp::report
