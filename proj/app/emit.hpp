#pragma once

#include "ogc/types.hpp"

#include <string>
#include <vector>

namespace ogc::app {

/// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string fmt(double x);

/// Comma-separated table with a fixed header.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& row();
  Csv& cell(double x);
  Csv& cell(int x);
  Csv& cell(const std::string& s);
  Csv& cells(const Vec& v);
  std::string str() const;

 private:
  std::size_t columns_;
  std::string out_;
  std::size_t in_row_ = 0;
};

/// Polyline plot in chart coordinates (first two), y axis pointing up.
class Svg {
 public:
  Svg(const Vec& lo, const Vec& hi, int width_px = 640);
  void polyline(const std::vector<Vec>& pts, const std::string& stroke, double width = 1.5,
                bool closed = false, const std::string& dash = "");
  void marker(const Vec& p, const std::string& fill, double radius = 3.0);
  void label(const Vec& p, const std::string& text);
  std::string str() const;

  /// Stroke colour for curve k.
  static std::string palette(int k);

 private:
  Vec lo_, hi_;
  double scale_ = 1.0;
  int w_ = 0, h_ = 0;
  std::string body_;
  std::string xy(const Vec& p) const;
};

}  // namespace ogc::app
