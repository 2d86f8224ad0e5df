#include "emit.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace ogc::app {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ += (i ? "," : "") + header[i];
  out_ += "\n";
  in_row_ = columns_;
}

Csv& Csv::row() {
  require(in_row_ == columns_, ErrorCode::InvalidArgument, "csv: short row");
  in_row_ = 0;
  return *this;
}

Csv& Csv::cell(const std::string& s) {
  require(in_row_ < columns_, ErrorCode::InvalidArgument, "csv: too many cells");
  if (in_row_) out_ += ",";
  out_ += s;
  if (++in_row_ == columns_) out_ += "\n";
  return *this;
}

Csv& Csv::cell(double x) { return cell(fmt(x)); }
Csv& Csv::cell(int x) { return cell(std::to_string(x)); }

Csv& Csv::cells(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) cell(v[i]);
  return *this;
}

std::string Csv::str() const {
  require(in_row_ == columns_, ErrorCode::InvalidArgument, "csv: unfinished row");
  return out_;
}

namespace {

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

Svg::Svg(const Vec& lo, const Vec& hi, int width_px) : lo_(lo.head(2)), hi_(hi.head(2)) {
  const double margin = 0.05 * std::max(hi_[0] - lo_[0], hi_[1] - lo_[1]);
  lo_.array() -= margin;
  hi_.array() += margin;
  scale_ = width_px / (hi_[0] - lo_[0]);
  w_ = width_px;
  h_ = static_cast<int>(std::ceil(scale_ * (hi_[1] - lo_[1])));
}

std::string Svg::xy(const Vec& p) const {
  return px(scale_ * (p[0] - lo_[0])) + "," + px(scale_ * (hi_[1] - p[1]));
}

void Svg::polyline(const std::vector<Vec>& pts, const std::string& stroke, double width, bool closed,
                   const std::string& dash) {
  if (pts.empty()) return;
  std::string s = std::string("<") + (closed ? "polygon" : "polyline") + " fill=\"none\" stroke=\"" +
                  stroke + "\" stroke-width=\"" + px(width) + "\"";
  if (!dash.empty()) s += " stroke-dasharray=\"" + dash + "\"";
  s += " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? " " : "") + xy(pts[i]);
  body_ += s + "\"/>\n";
}

void Svg::marker(const Vec& p, const std::string& fill, double radius) {
  const double cx = scale_ * (p[0] - lo_[0]), cy = scale_ * (hi_[1] - p[1]);
  body_ += "<circle cx=\"" + px(cx) + "\" cy=\"" + px(cy) + "\" r=\"" + px(radius) + "\" fill=\"" + fill + "\"/>\n";
}

void Svg::label(const Vec& p, const std::string& text) {
  const double x = scale_ * (p[0] - lo_[0]), y = scale_ * (hi_[1] - p[1]);
  body_ += "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" font-family=\"sans-serif\" font-size=\"12\">" + text +
           "</text>\n";
}

std::string Svg::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w_) + "\" height=\"" +
         std::to_string(h_) + "\" viewBox=\"0 0 " + std::to_string(w_) + " " + std::to_string(h_) +
         "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
}

std::string Svg::palette(int k) {
  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  return colours[k % 8];
}

}  // namespace ogc::app
