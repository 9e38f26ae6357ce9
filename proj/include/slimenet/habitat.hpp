#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "slimenet/error.hpp"
#include "slimenet/geometry.hpp"
#include "slimenet/raster.hpp"

namespace slimenet {

enum class CellClass : std::uint8_t { Outside = 0, Obstacle = 1, Habitable = 2 };

inline const char* to_string(CellClass c) {
  switch (c) {
    case CellClass::Habitable: return "habitable";
    case CellClass::Obstacle: return "obstacle";
    case CellClass::Outside: return "outside";
  }
  return "?";
}

inline CellClass cell_class_from_string(const std::string& s) {
  if (s == "habitable") return CellClass::Habitable;
  if (s == "obstacle") return CellClass::Obstacle;
  if (s == "outside") return CellClass::Outside;
  throw ValidationError("unknown cell class '" + s + "'", "map.grey");
}

/// Grey level -> cell class. Values not listed are rejected at load time.
using GreyMapping = std::map<int, CellClass>;

inline GreyMapping default_grey_mapping() {
  return {{255, CellClass::Habitable}, {128, CellClass::Obstacle}, {0, CellClass::Outside}};
}

inline std::uint8_t grey_of(CellClass c) {
  switch (c) {
    case CellClass::Habitable: return 255;
    case CellClass::Obstacle: return 128;
    case CellClass::Outside: return 0;
  }
  return 0;
}

struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Classified lattice. Invariants: at least 3x3, at least one habitable cell.
class HabitatMap {
 public:
  HabitatMap() = default;

  HabitatMap(int width, int height, std::vector<CellClass> cells, std::string source = {})
      : width_(width), height_(height), cells_(std::move(cells)), source_(std::move(source)) {
    if (width_ < 3 || height_ < 3) throw ValidationError("map must be at least 3x3", "map");
    if (cells_.size() != static_cast<std::size_t>(width_) * height_)
      throw ValidationError("cell count does not match dimensions", "map");
    for (auto c : cells_) {
      if (c == CellClass::Habitable) ++habitable_;
      else if (c == CellClass::Obstacle) ++obstacle_;
      else ++outside_;
    }
    if (habitable_ == 0) throw ValidationError("map has no habitable cells", "map");
  }

  /// All-habitable rectangle.
  static HabitatMap open(int width, int height) {
    return HabitatMap(width, height, std::vector<CellClass>(static_cast<std::size_t>(width) * height, CellClass::Habitable));
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return cells_.size(); }
  const std::string& source() const { return source_; }

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }
  CellClass at(int x, int y) const { return cells_[index(x, y)]; }
  CellClass at(std::size_t i) const { return cells_[i]; }
  bool habitable(int x, int y) const { return in_bounds(x, y) && at(x, y) == CellClass::Habitable; }

  std::size_t habitable_count() const { return habitable_; }
  std::size_t obstacle_count() const { return obstacle_; }
  std::size_t outside_count() const { return outside_; }

  const std::vector<CellClass>& cells() const { return cells_; }

  /// Canonical greyscale rendering (255/128/0).
  Image to_image() const {
    Image img(width_, height_, 1);
    for (std::size_t i = 0; i < cells_.size(); ++i) img.data[i] = grey_of(cells_[i]);
    return img;
  }

  friend bool operator==(const HabitatMap& a, const HabitatMap& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.cells_ == b.cells_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<CellClass> cells_;
  std::string source_;
  std::size_t habitable_ = 0, obstacle_ = 0, outside_ = 0;
};

inline HabitatMap load_map(const Image& img, const GreyMapping& mapping = default_grey_mapping(),
                           std::string source = {}) {
  if (img.empty()) throw ValidationError("empty image", "map.image");
  if (img.channels != 1) throw ValidationError("map raster must be single-channel greyscale", "map.image");
  std::vector<CellClass> cells(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    auto it = mapping.find(img.data[i]);
    if (it == mapping.end())
      throw ValidationError("grey value " + std::to_string(img.data[i]) + " at (" + std::to_string(i % img.width) +
                                "," + std::to_string(i / img.width) + ") has no class mapping",
                            "map.grey");
    cells[i] = it->second;
  }
  return HabitatMap(img.width, img.height, std::move(cells), std::move(source));
}

inline HabitatMap load_map(const std::filesystem::path& path, const GreyMapping& mapping = default_grey_mapping()) {
  return load_map(read_image(path), mapping, path.string());
}

// ---------------------------------------------------------------------------
// Cities

struct City {
  std::string name;
  int x = 0;
  int y = 0;

  Cell cell() const { return {x, y}; }
};

/// Named food sources with a shared vicinity radius (cells).
struct CitySet {
  std::vector<City> cities;
  int vicinity_radius = 0;

  std::size_t size() const { return cities.size(); }
  bool empty() const { return cities.empty(); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& c : cities) out.push_back(c.name);
    return out;
  }

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < cities.size(); ++i)
      if (cities[i].name == name) return i;
    return std::nullopt;
  }

  PointSet points() const {
    std::vector<Site> sites;
    for (const auto& c : cities) sites.push_back({c.name, {double(c.x), double(c.y)}});
    return PointSet(std::move(sites));
  }
};

/// 3% of the map diagonal, rounded.
inline int default_vicinity_radius(int width, int height) {
  return static_cast<int>(std::lround(0.03 * std::hypot(double(width), double(height))));
}

/// Habitable cells within Euclidean distance `vicinity_radius` of city `i`.
inline std::vector<Cell> vicinity_cells(const CitySet& cities, std::size_t i, const HabitatMap& habitat) {
  const auto& c = cities.cities.at(i);
  const int r = cities.vicinity_radius;
  std::vector<Cell> out;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (dx * dx + dy * dy <= r * r && habitat.habitable(c.x + dx, c.y + dy)) out.push_back({c.x + dx, c.y + dy});
  return out;
}

/// Checks the CitySet invariants against a map: unique names, cities on
/// habitable cells, pairwise-disjoint vicinity discs.
inline void validate_cities(const CitySet& cs, const HabitatMap& habitat) {
  if (cs.vicinity_radius < 0) throw ValidationError("must be non-negative", "cities.vicinity_radius");
  std::set<std::string> names;
  for (const auto& c : cs.cities) {
    if (c.name.empty()) throw ValidationError("city without a name", "cities");
    if (!names.insert(c.name).second) throw ValidationError("duplicate city '" + c.name + "'", "cities");
    if (!habitat.in_bounds(c.x, c.y))
      throw ValidationError("city '" + c.name + "' lies off the map", "cities." + c.name);
    if (habitat.at(c.x, c.y) != CellClass::Habitable)
      throw ValidationError("city '" + c.name + "' lies on a " + to_string(habitat.at(c.x, c.y)) + " cell",
                            "cities." + c.name);
  }
  // Discrete discs of radius r around integer centres are disjoint iff no
  // lattice point is within r of both; check by enumeration.
  std::vector<std::vector<Cell>> discs;
  const int r = cs.vicinity_radius;
  for (const auto& c : cs.cities) {
    std::vector<Cell> d;
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx)
        if (dx * dx + dy * dy <= r * r) d.push_back({c.x + dx, c.y + dy});
    std::sort(d.begin(), d.end());
    discs.push_back(std::move(d));
  }
  for (std::size_t i = 0; i < discs.size(); ++i) {
    for (std::size_t j = i + 1; j < discs.size(); ++j) {
      const auto& a = cs.cities[i];
      const auto& b = cs.cities[j];
      const long dx = a.x - b.x, dy = a.y - b.y;
      if (dx * dx + dy * dy > 4L * r * r + 4) continue;
      std::vector<Cell> common;
      std::set_intersection(discs[i].begin(), discs[i].end(), discs[j].begin(), discs[j].end(),
                            std::back_inserter(common));
      if (!common.empty())
        throw ValidationError("vicinities of '" + a.name + "' and '" + b.name + "' overlap", "cities.vicinity_radius");
    }
  }
}

}  // namespace slimenet
