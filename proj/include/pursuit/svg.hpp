#pragma once

// Minimal standalone SVG emitter and a 2D chart frame on top of it.
// Output is plain text with fixed number formatting, so identical inputs
// give identical files.

#include <string>
#include <string_view>
#include <vector>

namespace pursuit::svg {

struct XY {
  double x = 0.0;
  double y = 0.0;
};

std::string escape(std::string_view text);

class Document {
 public:
  Document(double width, double height);

  void rect(double x, double y, double w, double h, std::string_view fill,
            std::string_view stroke = "none");
  void line(XY a, XY b, std::string_view stroke, double width = 1.0, std::string_view dash = "");
  void polyline(const std::vector<XY>& pts, std::string_view stroke, double width = 1.5,
                double opacity = 1.0);
  void circle(XY c, double r, std::string_view fill);
  void text(XY at, std::string_view content, double size = 12.0, std::string_view anchor = "middle",
            double rotate = 0.0);

  std::string str() const;

 private:
  double width_;
  double height_;
  std::string body_;
};

// Plot area inside a document with linear axes, ticks and labels. The y axis
// points up as in data space.
class Chart {
 public:
  Chart(Document& doc, double left, double top, double width, double height, double x_min,
        double x_max, double y_min, double y_max);

  XY map(double x, double y) const;
  void frame(std::string_view title, std::string_view x_label, std::string_view y_label,
             int ticks = 5);
  void polyline(const std::vector<XY>& data_pts, std::string_view stroke, double width = 1.5,
                double opacity = 1.0);
  void point(XY data_pt, double r, std::string_view fill);
  void legend(const std::vector<std::pair<std::string, std::string>>& entries);

  Document& doc() { return doc_; }

 private:
  Document& doc_;
  double left_, top_, width_, height_;
  double x_min_, x_max_, y_min_, y_max_;
};

// Expands [lo, hi] by a margin fraction; degenerate ranges become +-0.5.
std::pair<double, double> padded_range(double lo, double hi, double margin = 0.05);

}  // namespace pursuit::svg
