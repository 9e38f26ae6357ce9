#pragma once

// City connectivity from a particle configuration.
//
// Cities a and b are joined when an 8-connected path of occupied cells runs
// from a cell in a's vicinity to a cell in b's vicinity without entering the
// vicinity of any third city. One breadth-first search per city finds all
// partners at once: cells in another city's vicinity are terminal, so the
// search records that city and does not continue through it.

#include <cstdint>
#include <deque>
#include <vector>

#include "slimenet/graph.hpp"
#include "slimenet/habitat.hpp"
#include "slimenet/plasmodium.hpp"

namespace slimenet {

/// Boolean particle-presence lattice; occupied cells are always habitable.
struct OccupancyField {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> cells;

  OccupancyField() = default;
  OccupancyField(int w, int h) : width(w), height(h), cells(static_cast<std::size_t>(w) * h, 0) {}

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
  bool at(int x, int y) const { return cells[index(x, y)] != 0; }
  void set(int x, int y, bool v = true) { cells[index(x, y)] = v ? 1 : 0; }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto c : cells) n += c;
    return n;
  }
};

inline OccupancyField occupancy_field(const SimState& s) {
  OccupancyField f(s.width, s.height);
  for (const auto& p : s.particles) f.set(p.cell.x, p.cell.y);
  return f;
}

/// Square (Chebyshev) dilation by `radius` cells, clipped to habitable cells.
inline OccupancyField dilate(const OccupancyField& in, const HabitatMap& habitat, int radius) {
  if (radius < 0) throw ValidationError("must be non-negative", "dilation");
  if (radius == 0) return in;
  const int w = in.width, h = in.height;
  OccupancyField rows(w, h), out(w, h);
  // Separable: a cell is set if any occupied cell lies within radius along
  // the row, then along the column of the row result. Sliding counts.
  for (int y = 0; y < h; ++y) {
    int count = 0;
    for (int x = 0; x < std::min(w, radius); ++x) count += in.at(x, y);
    for (int x = 0; x < w; ++x) {
      if (x + radius < w) count += in.at(x + radius, y);
      if (x - radius - 1 >= 0) count -= in.at(x - radius - 1, y);
      rows.set(x, y, count > 0);
    }
  }
  for (int x = 0; x < w; ++x) {
    int count = 0;
    for (int y = 0; y < std::min(h, radius); ++y) count += rows.at(x, y);
    for (int y = 0; y < h; ++y) {
      if (y + radius < h) count += rows.at(x, y + radius);
      if (y - radius - 1 >= 0) count -= rows.at(x, y - radius - 1);
      out.set(x, y, count > 0 && habitat.at(x, y) == CellClass::Habitable);
    }
  }
  return out;
}

/// Lattice of vicinity owners: city index, or -1 outside every vicinity.
inline std::vector<int> vicinity_owners(const CitySet& cities, const HabitatMap& habitat) {
  std::vector<int> owner(habitat.size(), -1);
  for (std::size_t i = 0; i < cities.size(); ++i)
    for (const auto& c : vicinity_cells(cities, i, habitat)) owner[habitat.index(c.x, c.y)] = static_cast<int>(i);
  return owner;
}

inline CityGraph extract_edges(const OccupancyField& occ, const CitySet& cities, const HabitatMap& habitat) {
  if (occ.width != habitat.width() || occ.height != habitat.height())
    throw ValidationError("occupancy and habitat dimensions differ", "occupancy");
  CityGraph g(cities.names());
  const auto owner = vicinity_owners(cities, habitat);
  const int w = occ.width, h = occ.height;
  std::vector<std::uint32_t> seen(occ.cells.size(), 0);
  std::deque<std::size_t> queue;

  for (std::size_t a = 0; a < cities.size(); ++a) {
    const auto stamp = static_cast<std::uint32_t>(a + 1);
    queue.clear();
    for (const auto& c : vicinity_cells(cities, a, habitat)) {
      const auto i = occ.index(c.x, c.y);
      if (occ.cells[i]) {
        seen[i] = stamp;
        queue.push_back(i);
      }
    }
    while (!queue.empty()) {
      const auto i = queue.front();
      queue.pop_front();
      const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if ((!dx && !dy) || nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const auto j = occ.index(nx, ny);
          if (!occ.cells[j] || seen[j] == stamp) continue;
          seen[j] = stamp;
          const int o = owner[j];
          if (o >= 0 && static_cast<std::size_t>(o) != a) {
            g.add_edge(cities.cities[a].name, cities.cities[o].name);
            continue;
          }
          queue.push_back(j);
        }
      }
    }
  }
  return g;
}

inline CityGraph extract_edges(const SimState& s, const CitySet& cities, const HabitatMap& habitat) {
  return extract_edges(occupancy_field(s), cities, habitat);
}

inline CityGraph extract_with_dilation(const SimState& s, const CitySet& cities, const HabitatMap& habitat,
                                       int dilation) {
  return extract_edges(dilate(occupancy_field(s), habitat, dilation), cities, habitat);
}

}  // namespace slimenet
