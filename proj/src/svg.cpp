#include "pursuit/svg.hpp"

#include <cmath>
#include <cstdio>

namespace pursuit::svg {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

}  // namespace

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

Document::Document(double width, double height) : width_(width), height_(height) {
  rect(0, 0, width, height, "white");
}

void Document::rect(double x, double y, double w, double h, std::string_view fill,
                    std::string_view stroke) {
  body_ += "  <rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" +
           num(h) + "\" fill=\"" + std::string(fill) + "\" stroke=\"" + std::string(stroke) + "\"/>\n";
}

void Document::line(XY a, XY b, std::string_view stroke, double width, std::string_view dash) {
  body_ += "  <line x1=\"" + num(a.x) + "\" y1=\"" + num(a.y) + "\" x2=\"" + num(b.x) + "\" y2=\"" +
           num(b.y) + "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) + "\"";
  if (!dash.empty()) body_ += " stroke-dasharray=\"" + std::string(dash) + "\"";
  body_ += "/>\n";
}

void Document::polyline(const std::vector<XY>& pts, std::string_view stroke, double width,
                        double opacity) {
  if (pts.size() < 2) return;
  body_ += "  <polyline fill=\"none\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" +
           num(width) + "\"";
  if (opacity < 1.0) body_ += " stroke-opacity=\"" + num(opacity) + "\"";
  body_ += " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) body_ += ' ';
    body_ += num(pts[i].x) + "," + num(pts[i].y);
  }
  body_ += "\"/>\n";
}

void Document::circle(XY c, double r, std::string_view fill) {
  body_ += "  <circle cx=\"" + num(c.x) + "\" cy=\"" + num(c.y) + "\" r=\"" + num(r) +
           "\" fill=\"" + std::string(fill) + "\"/>\n";
}

void Document::text(XY at, std::string_view content, double size, std::string_view anchor,
                    double rotate) {
  body_ += "  <text x=\"" + num(at.x) + "\" y=\"" + num(at.y) + "\" font-size=\"" + num(size) +
           "\" font-family=\"sans-serif\" text-anchor=\"" + std::string(anchor) + "\"";
  if (rotate != 0.0)
    body_ += " transform=\"rotate(" + num(rotate) + " " + num(at.x) + " " + num(at.y) + ")\"";
  body_ += ">" + escape(content) + "</text>\n";
}

std::string Document::str() const {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" +
         num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\">\n" + body_ +
         "</svg>\n";
}

Chart::Chart(Document& doc, double left, double top, double width, double height, double x_min,
             double x_max, double y_min, double y_max)
    : doc_(doc), left_(left), top_(top), width_(width), height_(height),
      x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {}

XY Chart::map(double x, double y) const {
  return {left_ + (x - x_min_) / (x_max_ - x_min_) * width_,
          top_ + (y_max_ - y) / (y_max_ - y_min_) * height_};
}

void Chart::frame(std::string_view title, std::string_view x_label, std::string_view y_label,
                  int ticks) {
  doc_.rect(left_, top_, width_, height_, "none", "#444444");
  for (int k = 0; k <= ticks; ++k) {
    const double fx = x_min_ + (x_max_ - x_min_) * k / ticks;
    const double fy = y_min_ + (y_max_ - y_min_) * k / ticks;
    const XY px = map(fx, y_min_);
    const XY py = map(x_min_, fy);
    doc_.line(px, {px.x, px.y + 5}, "#444444");
    doc_.text({px.x, px.y + 18}, tick_label(fx), 10);
    doc_.line(py, {py.x - 5, py.y}, "#444444");
    doc_.text({py.x - 8, py.y + 3}, tick_label(fy), 10, "end");
  }
  doc_.text({left_ + width_ / 2, top_ - 10}, title, 14);
  doc_.text({left_ + width_ / 2, top_ + height_ + 36}, x_label, 12);
  doc_.text({left_ - 44, top_ + height_ / 2}, y_label, 12, "middle", -90);
}

void Chart::polyline(const std::vector<XY>& data_pts, std::string_view stroke, double width,
                     double opacity) {
  std::vector<XY> px;
  px.reserve(data_pts.size());
  for (const auto& p : data_pts) px.push_back(map(p.x, p.y));
  doc_.polyline(px, stroke, width, opacity);
}

void Chart::point(XY data_pt, double r, std::string_view fill) {
  doc_.circle(map(data_pt.x, data_pt.y), r, fill);
}

void Chart::legend(const std::vector<std::pair<std::string, std::string>>& entries) {
  double y = top_ + 14;
  for (const auto& [label, color] : entries) {
    doc_.line({left_ + width_ - 110, y - 4}, {left_ + width_ - 90, y - 4}, color, 3);
    doc_.text({left_ + width_ - 85, y}, label, 11, "start");
    y += 16;
  }
}

std::pair<double, double> padded_range(double lo, double hi, double margin) {
  if (!(hi > lo)) return {lo - 0.5, hi + 0.5};
  const double pad = (hi - lo) * margin;
  return {lo - pad, hi + pad};
}

}  // namespace pursuit::svg
