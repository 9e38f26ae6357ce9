#pragma once

// Figure-style composites: map background, particle occupancy, straight-line
// graph drawings, city markers and labels.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <string>

#include "slimenet/graph.hpp"
#include "slimenet/habitat.hpp"
#include "slimenet/raster.hpp"

namespace slimenet {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

class Canvas {
 public:
  Canvas(int width, int height, int scale = 1, Rgb fill = {})
      : scale_(std::max(1, scale)), img_(width * std::max(1, scale), height * std::max(1, scale), 3, 0) {
    clear(fill);
  }

  int scale() const { return scale_; }
  const Image& image() const { return img_; }
  Image& pixels() { return img_; }

  void clear(Rgb c) {
    for (int y = 0; y < img_.height; ++y)
      for (int x = 0; x < img_.width; ++x) put(x, y, c);
  }

  /// Pixel in output (scaled) coordinates; silently clipped.
  void put(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= img_.width || y >= img_.height) return;
    auto* p = &img_.data[(static_cast<std::size_t>(y) * img_.width + x) * 3];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }

  /// Fills the block for lattice cell (x, y).
  void cell(int x, int y, Rgb c) {
    for (int dy = 0; dy < scale_; ++dy)
      for (int dx = 0; dx < scale_; ++dx) put(x * scale_ + dx, y * scale_ + dy, c);
  }

  /// Bresenham line between lattice cell centres, `thick` output pixels wide.
  void line(double x0, double y0, double x1, double y1, Rgb c, int thick = 1) {
    auto px = [&](double v) { return static_cast<int>(std::lround(v * scale_ + (scale_ - 1) / 2.0)); };
    int ax = px(x0), ay = px(y0);
    const int bx = px(x1), by = px(y1);
    const int dx = std::abs(bx - ax), sx = ax < bx ? 1 : -1;
    const int dy = -std::abs(by - ay), sy = ay < by ? 1 : -1;
    int err = dx + dy;
    const int h = thick / 2;
    while (true) {
      for (int oy = -h; oy <= h; ++oy)
        for (int ox = -h; ox <= h; ++ox) put(ax + ox, ay + oy, c);
      if (ax == bx && ay == by) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        ax += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ay += sy;
      }
    }
  }

  /// Filled disc of radius r lattice cells.
  void disc(int cx, int cy, double r, Rgb c) {
    const double R = r * scale_;
    const int ox = cx * scale_ + scale_ / 2, oy = cy * scale_ + scale_ / 2;
    const int ir = static_cast<int>(std::ceil(R));
    for (int dy = -ir; dy <= ir; ++dy)
      for (int dx = -ir; dx <= ir; ++dx)
        if (dx * dx + dy * dy <= R * R) put(ox + dx, oy + dy, c);
  }

  /// 5x7 upper-case label with its top-left at output pixel (x, y).
  void text(int x, int y, const std::string& s, Rgb c, int size = 1);

 private:
  int scale_;
  Image img_;
};

namespace detail {

// Rows top to bottom, 5 bits each, MSB = leftmost column.
inline const std::map<char, std::array<std::uint8_t, 7>>& glyphs() {
  static const std::map<char, std::array<std::uint8_t, 7>> g{
      {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}}, {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
      {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}}, {'D', {0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E}},
      {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}}, {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
      {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}}, {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
      {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}}, {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
      {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}}, {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
      {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}}, {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
      {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}, {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
      {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}}, {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
      {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}}, {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
      {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}, {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
      {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}}, {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
      {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}}, {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
      {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}}, {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
      {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}}, {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
      {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}}, {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
      {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}}, {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
      {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}}, {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
      {'/', {0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10}}, {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
      {'=', {0x00, 0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00}}, {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
      {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}}, {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}},
  };
  return g;
}

}  // namespace detail

inline void Canvas::text(int x, int y, const std::string& s, Rgb c, int size) {
  const auto& g = detail::glyphs();
  int cx = x;
  for (char ch : s) {
    auto it = g.find(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    if (it != g.end()) {
      for (int row = 0; row < 7; ++row)
        for (int col = 0; col < 5; ++col)
          if (it->second[row] & (0x10 >> col))
            for (int sy = 0; sy < size; ++sy)
              for (int sx = 0; sx < size; ++sx) put(cx + col * size + sx, y + row * size + sy, c);
    }
    cx += 6 * size;
  }
}

namespace palette {
inline constexpr Rgb kSea{18, 32, 58};
inline constexpr Rgb kLand{236, 230, 214};
inline constexpr Rgb kMountain{168, 150, 128};
inline constexpr Rgb kParticle{214, 170, 20};
inline constexpr Rgb kEdge{170, 20, 30};
inline constexpr Rgb kCity{20, 20, 20};
inline constexpr Rgb kLabel{10, 10, 90};
}  // namespace palette

inline Canvas map_canvas(const HabitatMap& habitat, int scale) {
  Canvas cv(habitat.width(), habitat.height(), scale, palette::kSea);
  for (int y = 0; y < habitat.height(); ++y)
    for (int x = 0; x < habitat.width(); ++x) {
      const auto c = habitat.at(x, y);
      if (c == CellClass::Habitable) cv.cell(x, y, palette::kLand);
      else if (c == CellClass::Obstacle) cv.cell(x, y, palette::kMountain);
    }
  return cv;
}

/// Paints every non-zero pixel of a greyscale lattice-sized image.
inline void overlay_mask(Canvas& cv, const Image& mask, Rgb c) {
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(x, y) != 0) cv.cell(x, y, c);
}

/// Blends a greyscale intensity lattice over the canvas (alpha = value / 255).
inline void overlay_intensity(Canvas& cv, const Image& field, Rgb c) {
  const int s = cv.scale();
  auto& img = cv.pixels();
  for (int y = 0; y < field.height; ++y)
    for (int x = 0; x < field.width; ++x) {
      const double a = field.at(x, y) / 255.0;
      if (a <= 0) continue;
      for (int dy = 0; dy < s; ++dy)
        for (int dx = 0; dx < s; ++dx) {
          auto* p = &img.data[(static_cast<std::size_t>(y * s + dy) * img.width + (x * s + dx)) * 3];
          p[0] = static_cast<std::uint8_t>(std::lround(p[0] * (1 - a) + c.r * a));
          p[1] = static_cast<std::uint8_t>(std::lround(p[1] * (1 - a) + c.g * a));
          p[2] = static_cast<std::uint8_t>(std::lround(p[2] * (1 - a) + c.b * a));
        }
    }
}

inline void draw_graph(Canvas& cv, const CityGraph& g, const CitySet& cities, Rgb c = palette::kEdge, int thick = 2) {
  for (const auto& e : g.edges()) {
    const auto ia = cities.find(e.a), ib = cities.find(e.b);
    if (!ia || !ib) throw ValidationError("edge " + to_string(e) + " names a city not in the scenario", "graph");
    const auto& a = cities.cities[*ia];
    const auto& b = cities.cities[*ib];
    cv.line(a.x, a.y, b.x, b.y, c, thick);
  }
}

inline void draw_cities(Canvas& cv, const CitySet& cities, bool labels = true) {
  const int s = cv.scale();
  for (const auto& c : cities.cities) {
    cv.disc(c.x, c.y, std::max(2.0, cities.vicinity_radius / 2.0), palette::kCity);
    if (labels) cv.text(c.x * s + 4 * s, c.y * s - 3 * s, c.name, palette::kLabel, std::max(1, s / 2));
  }
}

}  // namespace slimenet
