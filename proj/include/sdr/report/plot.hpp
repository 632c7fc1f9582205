#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sdr {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
};

// Top-left-origin raster image, 8-bit RGB.
class Canvas {
 public:
  Canvas(int width, int height, Rgb background = {255, 255, 255});

  int width() const { return width_; }
  int height() const { return height_; }

  void set(int x, int y, Rgb c);  // out-of-bounds pixels are dropped
  void fill_rect(int x, int y, int w, int h, Rgb c);
  void hline(int x0, int x1, int y, Rgb c);
  void vline(int x, int y0, int y1, Rgb c);

  // 5x7 glyphs with a one-column advance gap; lowercase renders as uppercase.
  void text(int x, int y, const std::string& s, Rgb c, int scale = 1);
  static int text_width(const std::string& s, int scale = 1);

  const std::vector<std::uint8_t>& pixels() const { return pixels_; }

  void save_png(const std::filesystem::path& path) const;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;  // row-major RGB
};

struct BarSeries {
  std::string name;
  std::vector<double> values;  // one per group
  std::vector<double> errors;  // whisker half-lengths; empty for none
};

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> group_labels;
  std::vector<BarSeries> series;
  double y_max = 1.0;  // axis top; <= 0 fits the data instead
};

// Grouped bars with optional error whiskers. Equal charts produce identical
// bytes: the encoder embeds no timestamps or machine state.
void save_bar_chart(const std::filesystem::path& path, const BarChart& chart);

}  // namespace sdr
