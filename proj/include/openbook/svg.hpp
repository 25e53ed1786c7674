#pragma once

#include <string>
#include <vector>

namespace openbook {

// Minimal deterministic SVG emitter: fixed-precision coordinates, no
// timestamps, byte-identical output for identical input.
class SvgCanvas {
 public:
  SvgCanvas(double width, double height);

  void line(double x1, double y1, double x2, double y2,
            const std::string& color, double stroke = 1.0);
  void polyline(const std::vector<double>& x, const std::vector<double>& y,
                const std::string& color, double stroke = 1.0);
  void circle(double cx, double cy, double r, const std::string& color);
  void text(double x, double y, const std::string& s, int size = 12);
  void rect(double x, double y, double w, double h, const std::string& color);

  std::string finish() const;
  void write(const std::string& path) const;

 private:
  double w_, h_;
  std::string body_;
};

// A single x-y panel with axes, labels and data series.
struct SvgPanel {
  double x0 = 0, y0 = 0, w = 300, h = 240;  // placement on the canvas
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  std::string title, xlabel, ylabel;

  double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
  double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }

  void frame(SvgCanvas& c) const;
  void series(SvgCanvas& c, const std::vector<double>& x,
              const std::vector<double>& y, const std::string& color) const;
};

}  // namespace openbook
