#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "cxr/pipeline.hpp"

namespace cxr {

namespace {

constexpr double kPanelW = 480.0;
constexpr double kPanelH = 360.0;
constexpr double kMargin = 50.0;

struct Panel {
  double x0;  // left edge of the plotting area
  double y0;  // top edge
  double step_lo, step_hi;
  double val_lo, val_hi;

  double px(double step) const {
    const double span = step_hi > step_lo ? step_hi - step_lo : 1.0;
    return x0 + (step - step_lo) / span * (kPanelW - 2 * kMargin);
  }
  double py(double v) const {
    const double span = val_hi > val_lo ? val_hi - val_lo : 1.0;
    return y0 + (kPanelH - 2 * kMargin) * (1.0 - (v - val_lo) / span);
  }
};

bool is_accuracy(Metric m) { return m == Metric::TrainAcc || m == Metric::ValAcc; }
bool is_train(Metric m) { return m == Metric::TrainAcc || m == Metric::TrainLoss; }

std::string polyline(const Panel& p, const CurveStats& s, const std::vector<double>& ys,
                     std::string_view stroke, double width, bool dashed) {
  std::string pts;
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    pts += fmt::format("{:.2f},{:.2f} ", p.px(static_cast<double>(s.grid[i])), p.py(ys[i]));
  }
  return fmt::format(
      "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"{} points=\"{}\"/>\n", stroke,
      width, dashed ? " stroke-dasharray=\"6,4\"" : "", pts);
}

std::string draw_panel(const Panel& p, const std::vector<const CurveStats*>& series,
                       std::string_view title) {
  std::string out;
  const double w = kPanelW - 2 * kMargin;
  const double h = kPanelH - 2 * kMargin;
  out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"#444\"/>\n",
                     p.x0, p.y0, w, h);
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                     p.x0 + w / 2, p.y0 - 15, title);
  for (int t = 0; t <= 4; ++t) {
    const double v = p.val_lo + (p.val_hi - p.val_lo) * t / 4.0;
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"end\">{:.3g}</text>\n",
                       p.x0 - 5, p.py(v) + 3, v);
    const double s = p.step_lo + (p.step_hi - p.step_lo) * t / 4.0;
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"middle\">{:.0f}</text>\n",
                       p.px(s), p.y0 + h + 14, s);
  }
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">step</text>\n",
                     p.x0 + w / 2, p.y0 + h + 30);

  for (const CurveStats* s : series) {
    const bool train = is_train(s->metric);
    const std::string_view mean_color = train ? "#e57373" : "#f4a261";
    const std::string_view smooth_color = train ? "#1565c0" : "#2a9d8f";
    // +-std whiskers around the cross-run mean
    for (std::size_t i = 0; i < s->grid.size(); ++i) {
      const double x = p.px(static_cast<double>(s->grid[i]));
      out += fmt::format(
          "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"0.8\"/>\n",
          x, p.py(s->mean[i] - s->std[i]), x, p.py(s->mean[i] + s->std[i]), smooth_color);
    }
    out += polyline(p, *s, s->mean, mean_color, 1.0, !train);
    if (!s->smoothed.empty()) out += polyline(p, *s, s->smoothed, smooth_color, 2.0, !train);
  }

  double ly = p.y0 + 12;
  for (const CurveStats* s : series) {
    const bool train = is_train(s->metric);
    out += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"2\"{}/>\n",
        p.x0 + w - 110, ly, p.x0 + w - 85, ly, train ? "#1565c0" : "#2a9d8f",
        train ? "" : " stroke-dasharray=\"6,4\"");
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\">{}</text>\n", p.x0 + w - 80,
                       ly + 3, to_string(s->metric));
    ly += 14;
  }
  return out;
}

}  // namespace

std::string render_curves_svg(const std::vector<CurveStats>& stats) {
  std::vector<const CurveStats*> acc;
  std::vector<const CurveStats*> loss;
  double step_lo = 0.0;
  double step_hi = 1.0;
  bool first = true;
  double loss_hi = 0.0;
  for (const auto& s : stats) {
    (is_accuracy(s.metric) ? acc : loss).push_back(&s);
    if (s.grid.empty()) continue;
    const auto lo = static_cast<double>(s.grid.front());
    const auto hi = static_cast<double>(s.grid.back());
    step_lo = first ? lo : std::min(step_lo, lo);
    step_hi = first ? hi : std::max(step_hi, hi);
    first = false;
    if (!is_accuracy(s.metric)) {
      for (std::size_t i = 0; i < s.mean.size(); ++i) loss_hi = std::max(loss_hi, s.mean[i] + s.std[i]);
      for (double v : s.smoothed) loss_hi = std::max(loss_hi, v);
    }
  }
  if (!(loss_hi > 0.0)) loss_hi = 1.0;

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      2 * kPanelW, kPanelH, 2 * kPanelW, kPanelH);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += draw_panel({kMargin, kMargin, step_lo, step_hi, 0.0, 1.0}, acc, "accuracy");
  out += draw_panel({kPanelW + kMargin, kMargin, step_lo, step_hi, 0.0, loss_hi * 1.05}, loss, "loss");
  out += "</svg>\n";
  return out;
}

}  // namespace cxr
