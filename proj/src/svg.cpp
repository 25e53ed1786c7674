#include <openbook/svg.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace openbook {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

SvgCanvas::SvgCanvas(double width, double height) : w_(width), h_(height) {}

void SvgCanvas::line(double x1, double y1, double x2, double y2,
                     const std::string& color, double stroke) {
  body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" +
           num(x2) + "\" y2=\"" + num(y2) + "\" stroke=\"" + color +
           "\" stroke-width=\"" + num(stroke) + "\"/>\n";
}

void SvgCanvas::polyline(const std::vector<double>& x,
                         const std::vector<double>& y,
                         const std::string& color, double stroke) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("svg: polyline size mismatch");
  body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
           num(stroke) + "\" points=\"";
  for (size_t i = 0; i < x.size(); ++i) {
    if (i) body_ += ' ';
    body_ += num(x[i]) + "," + num(y[i]);
  }
  body_ += "\"/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r,
                       const std::string& color) {
  body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" +
           num(r) + "\" fill=\"" + color + "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& s, int size) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
           std::to_string(size) + "\" font-family=\"sans-serif\">" +
           xml_escape(s) + "</text>\n";
}

void SvgCanvas::rect(double x, double y, double w, double h,
                     const std::string& color) {
  body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
           num(w) + "\" height=\"" + num(h) + "\" fill=\"none\" stroke=\"" +
           color + "\"/>\n";
}

std::string SvgCanvas::finish() const {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w_) +
         "\" height=\"" + num(h_) + "\" viewBox=\"0 0 " + num(w_) + " " +
         num(h_) + "\">\n";
  out += body_;
  out += "</svg>\n";
  return out;
}

void SvgCanvas::write(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("svg: cannot open " + path);
  os << finish();
}

void SvgPanel::frame(SvgCanvas& c) const {
  c.rect(x0, y0, w, h, "#444444");
  if (!title.empty()) c.text(x0 + 4, y0 - 6, title, 13);
  if (!xlabel.empty()) c.text(x0 + w / 2 - 20, y0 + h + 28, xlabel, 11);
  if (!ylabel.empty()) c.text(x0 - 38, y0 + 12, ylabel, 11);
  // min/max tick labels
  c.text(x0 - 2, y0 + h + 14, num(xmin), 9);
  c.text(x0 + w - 28, y0 + h + 14, num(xmax), 9);
  c.text(x0 - 42, y0 + h, num(ymin), 9);
  c.text(x0 - 42, y0 + 8, num(ymax), 9);
}

void SvgPanel::series(SvgCanvas& c, const std::vector<double>& x,
                      const std::vector<double>& y,
                      const std::string& color) const {
  std::vector<double> sx(x.size()), sy(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    sx[i] = px(x[i]);
    sy[i] = py(y[i]);
  }
  c.polyline(sx, sy, color, 1.2);
}

}  // namespace openbook
