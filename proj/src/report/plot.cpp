#include "sdr/report/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <zlib.h>

namespace sdr {

namespace {

struct Glyph {
  char c;
  std::uint8_t rows[7];  // low 5 bits per row, bit 4 = leftmost column
};

constexpr Glyph kFont[] = {
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
    {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
    {'D', {0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
    {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0E}},
    {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
    {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
    {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x1B, 0x11}},
    {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04}},
    {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {',', {0x00, 0x00, 0x00, 0x00, 0x0C, 0x04, 0x08}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'_', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F}},
    {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}},
    {'%', {0x18, 0x19, 0x02, 0x04, 0x08, 0x13, 0x03}},
    {'/', {0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10}},
    {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}},
    {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}},
    {'=', {0x00, 0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00}},
    {'?', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x00, 0x04}},
};

constexpr Glyph kUnknown = {'\0', {0x1F, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1F}};

const Glyph& find_glyph(char c) {
  if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  for (const auto& g : kFont) {
    if (g.c == c) return g;
  }
  return kUnknown;
}

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void append_chunk(std::vector<std::uint8_t>& out, const char* type,
                  const std::vector<std::uint8_t>& data) {
  put_u32_be(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const auto crc = crc32(0L, out.data() + start, static_cast<uInt>(4 + data.size()));
  put_u32_be(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

Canvas::Canvas(int width, int height, Rgb background) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw std::invalid_argument("canvas: non-positive dimensions");
  pixels_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = background.r;
    pixels_[i + 1] = background.g;
    pixels_[i + 2] = background.b;
  }
}

void Canvas::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  pixels_[i] = c.r;
  pixels_[i + 1] = c.g;
  pixels_[i + 2] = c.b;
}

void Canvas::fill_rect(int x, int y, int w, int h, Rgb c) {
  for (int yy = y; yy < y + h; ++yy) {
    for (int xx = x; xx < x + w; ++xx) set(xx, yy, c);
  }
}

void Canvas::hline(int x0, int x1, int y, Rgb c) {
  if (x1 < x0) std::swap(x0, x1);
  for (int x = x0; x <= x1; ++x) set(x, y, c);
}

void Canvas::vline(int x, int y0, int y1, Rgb c) {
  if (y1 < y0) std::swap(y0, y1);
  for (int y = y0; y <= y1; ++y) set(x, y, c);
}

void Canvas::text(int x, int y, const std::string& s, Rgb c, int scale) {
  int cx = x;
  for (char ch : s) {
    const Glyph& g = find_glyph(ch);
    for (int row = 0; row < 7; ++row) {
      for (int col = 0; col < 5; ++col) {
        if (g.rows[row] & (0x10 >> col)) {
          fill_rect(cx + col * scale, y + row * scale, scale, scale, c);
        }
      }
    }
    cx += 6 * scale;
  }
}

int Canvas::text_width(const std::string& s, int scale) {
  if (s.empty()) return 0;
  return (static_cast<int>(s.size()) * 6 - 1) * scale;
}

void Canvas::save_png(const std::filesystem::path& path) const {
  // filter byte 0 before each scanline, then one zlib stream over the lot
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(height_) * (static_cast<std::size_t>(width_) * 3 + 1));
  for (int y = 0; y < height_; ++y) {
    raw.push_back(0);
    const std::uint8_t* row = pixels_.data() + static_cast<std::size_t>(y) * width_ * 3;
    raw.insert(raw.end(), row, row + static_cast<std::size_t>(width_) * 3);
  }

  uLongf out_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> compressed(out_len);
  const int rc = compress2(compressed.data(), &out_len, raw.data(),
                           static_cast<uLong>(raw.size()), 9);
  if (rc != Z_OK) throw std::runtime_error("png: deflate failed");
  compressed.resize(out_len);

  std::vector<std::uint8_t> ihdr;
  put_u32_be(ihdr, static_cast<std::uint32_t>(width_));
  put_u32_be(ihdr, static_cast<std::uint32_t>(height_));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // truecolor
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter set
  ihdr.push_back(0);  // no interlace

  std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  append_chunk(png, "IHDR", ihdr);
  append_chunk(png, "IDAT", compressed);
  append_chunk(png, "IEND", {});

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("png: cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
  if (!out) throw std::runtime_error("png: write failed for " + path.string());
}

void save_bar_chart(const std::filesystem::path& path, const BarChart& chart) {
  if (chart.series.empty()) throw std::invalid_argument("bar chart: no series");
  if (chart.group_labels.empty()) throw std::invalid_argument("bar chart: no groups");
  const int n_groups = static_cast<int>(chart.group_labels.size());
  const int n_series = static_cast<int>(chart.series.size());
  for (const auto& s : chart.series) {
    if (static_cast<int>(s.values.size()) != n_groups) {
      throw std::invalid_argument("bar chart: series '" + s.name + "' value count mismatch");
    }
    if (!s.errors.empty() && s.errors.size() != s.values.size()) {
      throw std::invalid_argument("bar chart: series '" + s.name + "' error count mismatch");
    }
  }

  double y_max = chart.y_max;
  if (y_max <= 0.0) {
    for (const auto& s : chart.series) {
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        const double err = s.errors.empty() ? 0.0 : s.errors[i];
        y_max = std::max(y_max, s.values[i] + err);
      }
    }
    y_max = y_max <= 0.0 ? 1.0 : y_max * 1.1;
  }

  const int bar_w = 26;
  const int bar_gap = 5;
  const int group_gap = 36;
  const int group_w = n_series * bar_w + (n_series - 1) * bar_gap;
  const int plot_w = n_groups * group_w + (n_groups + 1) * group_gap;
  const int plot_h = 320;
  const int margin_left = 64;
  const int margin_top = 54;
  const int margin_bottom = 42;
  int legend_w = 0;
  for (const auto& s : chart.series) {
    legend_w = std::max(legend_w, Canvas::text_width(s.name) + 18);
  }
  const int margin_right = legend_w + 24;

  const int width = std::max(margin_left + plot_w + margin_right,
                             Canvas::text_width(chart.title, 2) + 20);
  const int height = margin_top + plot_h + margin_bottom;

  Canvas canvas(width, height);
  const Rgb black{0, 0, 0};
  const Rgb grid{210, 210, 210};
  const Rgb palette[] = {{70, 130, 180}, {226, 125, 60},  {60, 160, 90},
                         {170, 70, 150}, {120, 120, 120}, {200, 180, 60}};
  constexpr int kPaletteSize = 6;

  canvas.text((width - Canvas::text_width(chart.title, 2)) / 2, 14, chart.title, black, 2);

  const int x0 = margin_left;
  const int y0 = margin_top + plot_h;
  const auto y_of = [&](double v) {
    const double t = std::clamp(v / y_max, 0.0, 1.0);
    return y0 - static_cast<int>(std::lround(t * plot_h));
  };

  for (int tick = 0; tick <= 4; ++tick) {
    const double v = y_max * tick / 4.0;
    const int y = y_of(v);
    if (tick > 0) canvas.hline(x0 + 1, x0 + plot_w, y, grid);
    char label[16];
    std::snprintf(label, sizeof(label), "%.2f", v);
    canvas.text(x0 - 8 - Canvas::text_width(label), y - 3, label, black);
    canvas.hline(x0 - 4, x0, y, black);
  }
  canvas.text(6, margin_top - 14, chart.y_label, black);

  canvas.vline(x0, margin_top - 6, y0, black);
  canvas.hline(x0, x0 + plot_w, y0, black);

  for (int g = 0; g < n_groups; ++g) {
    const int gx = x0 + group_gap + g * (group_w + group_gap);
    for (int s = 0; s < n_series; ++s) {
      const BarSeries& series = chart.series[s];
      const double value = series.values[static_cast<std::size_t>(g)];
      const int bx = gx + s * (bar_w + bar_gap);
      const int by = y_of(value);
      canvas.fill_rect(bx, by, bar_w, y0 - by, palette[s % kPaletteSize]);
      const double err = series.errors.empty() ? 0.0 : series.errors[static_cast<std::size_t>(g)];
      if (err > 0.0) {
        const int cx = bx + bar_w / 2;
        const int y_low = y_of(value - err);
        const int y_high = y_of(value + err);
        canvas.vline(cx, y_high, y_low, black);
        canvas.hline(cx - 4, cx + 4, y_high, black);
        canvas.hline(cx - 4, cx + 4, y_low, black);
      }
    }
    const std::string& label = chart.group_labels[static_cast<std::size_t>(g)];
    canvas.text(gx + (group_w - Canvas::text_width(label)) / 2, y0 + 10, label, black);
  }

  int ly = margin_top;
  const int lx = width - margin_right + 8;
  for (int s = 0; s < n_series; ++s) {
    canvas.fill_rect(lx, ly, 10, 10, palette[s % kPaletteSize]);
    canvas.text(lx + 14, ly + 2, chart.series[s].name, black);
    ly += 16;
  }

  canvas.save_png(path);
}

}  // namespace sdr
