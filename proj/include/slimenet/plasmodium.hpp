#pragma once

// Particle model of a Physarum plasmodium on a habitat lattice.
//
// One scheduler step runs, in order:
//   1. sensory stage over all particles in a fresh random order
//   2. motor stage over all particles in a fresh random order
//   3. synchronous 3x3 mean diffusion of the chemoattractant, damped
//   4. projection of the nutrient stimulus at every city centre
//   5. growth then shrinkage, on every `adaptation_interval`-th step
//
// Coordinates follow raster convention: x to the right, y down. A heading of
// 0 degrees points along +x and positive rotation turns clockwise on screen,
// so FR (heading + SA) is the right-hand sensor.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "slimenet/error.hpp"
#include "slimenet/habitat.hpp"
#include "slimenet/rng.hpp"
#include "slimenet/scenario.hpp"

namespace slimenet {

struct Particle {
  Cell cell;           ///< lattice cell; always the rounding of (x, y)
  double x = 0;
  double y = 0;
  double heading = 0;  ///< degrees in [0, 360)
  bool moved = false;  ///< outcome of the most recent motor stage
};

inline constexpr std::int32_t kVacant = -1;

struct SimState {
  int width = 0;
  int height = 0;
  std::vector<Particle> particles;
  std::vector<double> chemo;            ///< row-major, width * height
  std::vector<std::int32_t> occupancy;  ///< particle index or kVacant
  std::int64_t step = 0;
  Rng rng;

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
  std::size_t index(const Cell& c) const { return index(c.x, c.y); }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  bool occupied(int x, int y) const { return in_bounds(x, y) && occupancy[index(x, y)] != kVacant; }
};

/// Empty lattice (no particles, zero chemo) matching the habitat.
inline SimState empty_state(const HabitatMap& habitat, std::uint64_t seed) {
  SimState s;
  s.width = habitat.width();
  s.height = habitat.height();
  s.chemo.assign(habitat.size(), 0.0);
  s.occupancy.assign(habitat.size(), kVacant);
  s.rng = Rng(seed);
  return s;
}

namespace detail {

inline int round_coord(double v) { return static_cast<int>(std::floor(v + 0.5)); }

inline double wrap_degrees(double h) {
  h = std::fmod(h, 360.0);
  if (h < 0) h += 360.0;
  return h >= 360.0 ? 0.0 : h;
}

inline double to_radians(double deg) { return deg * (std::numbers::pi / 180.0); }

}  // namespace detail

/// Places a particle at the centre of cell `c`. Throws if the cell is not
/// vacant and habitable.
inline void add_particle(SimState& s, const HabitatMap& habitat, Cell c, double heading) {
  if (!habitat.habitable(c.x, c.y)) throw ValidationError("particle cell is not habitable", "particle");
  auto& occ = s.occupancy[s.index(c)];
  if (occ != kVacant) throw ValidationError("particle cell is already occupied", "particle");
  occ = static_cast<std::int32_t>(s.particles.size());
  s.particles.push_back({c, double(c.x), double(c.y), detail::wrap_degrees(heading), false});
}

/// floor(coverage * habitable) particles on distinct habitable cells chosen
/// uniformly at random, headings uniform in [0, 360), chemo zeroed.
inline SimState init_population(const HabitatMap& habitat, const ModelParams& params, std::uint64_t seed) {
  if (!(params.coverage > 0 && params.coverage <= 1)) throw ValidationError("must be in (0, 1]", "params.coverage");
  const auto n = static_cast<std::size_t>(std::floor(params.coverage * double(habitat.habitable_count())));
  if (n < 1) throw ValidationError("coverage leaves no particles to place", "params.coverage");

  SimState s = empty_state(habitat, seed);
  std::vector<Cell> free;
  free.reserve(habitat.habitable_count());
  for (int y = 0; y < habitat.height(); ++y)
    for (int x = 0; x < habitat.width(); ++x)
      if (habitat.at(x, y) == CellClass::Habitable) free.push_back({x, y});

  // Partial Fisher-Yates: the first n entries become a uniform sample.
  for (std::size_t i = 0; i < n; ++i) std::swap(free[i], free[i + s.rng.below(free.size() - i)]);
  s.particles.reserve(n);
  for (std::size_t i = 0; i < n; ++i) add_particle(s, habitat, free[i], s.rng.uniform(0.0, 360.0));
  return s;
}

inline SimState init_population(const Scenario& sc, std::uint64_t seed) {
  return init_population(sc.habitat, sc.params, seed);
}

// ---------------------------------------------------------------------------
// Sensory stage

enum class Turn { Keep, Left, Right };

/// The sensory rule on three sensor readings. Ties between FL and FR when F
/// is the strict minimum are broken by a coin flip.
inline Turn sensory_rule(double f, double fl, double fr, Rng& rng) {
  if (f > fl && f > fr) return Turn::Keep;
  if (f < fl && f < fr) {
    if (fl < fr) return Turn::Right;
    if (fr < fl) return Turn::Left;
    return rng.coin() ? Turn::Right : Turn::Left;
  }
  if (fl < fr) return Turn::Right;
  if (fr < fl) return Turn::Left;
  return Turn::Keep;
}

/// Chemo at the rounded sensor position; 0 off-lattice or on non-habitable cells.
inline double sample_sensor(const SimState& s, const Particle& p, double offset_deg, double distance) {
  const double a = detail::to_radians(p.heading + offset_deg);
  const int x = detail::round_coord(p.x + distance * std::cos(a));
  const int y = detail::round_coord(p.y + distance * std::sin(a));
  return s.in_bounds(x, y) ? s.chemo[s.index(x, y)] : 0.0;
}

inline Turn sense(SimState& s, std::size_t i, const ModelParams& params) {
  auto& p = s.particles[i];
  const double f = sample_sensor(s, p, 0.0, params.sensor_offset);
  const double fl = sample_sensor(s, p, -params.sensor_angle, params.sensor_offset);
  const double fr = sample_sensor(s, p, params.sensor_angle, params.sensor_offset);
  const Turn t = sensory_rule(f, fl, fr, s.rng);
  if (t == Turn::Right) p.heading = detail::wrap_degrees(p.heading + params.rotation_angle);
  else if (t == Turn::Left) p.heading = detail::wrap_degrees(p.heading - params.rotation_angle);
  return t;
}

// ---------------------------------------------------------------------------
// Motor stage

/// Advances particle `i` one unit along its heading. On success deposits at
/// the new cell. On failure (target occupied, non-habitable or off-lattice)
/// the particle stays put and draws a fresh uniform heading.
inline bool move(SimState& s, std::size_t i, const HabitatMap& habitat, const ModelParams& params) {
  auto& p = s.particles[i];
  const double a = detail::to_radians(p.heading);
  const double nx = p.x + std::cos(a);
  const double ny = p.y + std::sin(a);
  const Cell target{detail::round_coord(nx), detail::round_coord(ny)};

  // Rounding can leave the particle in its own cell; it then moves within it.
  const bool own = target == p.cell;
  if (!own && (!habitat.habitable(target.x, target.y) || s.occupancy[s.index(target)] != kVacant)) {
    p.heading = s.rng.uniform(0.0, 360.0);
    p.moved = false;
    return false;
  }
  if (!own) {
    s.occupancy[s.index(p.cell)] = kVacant;
    s.occupancy[s.index(target)] = static_cast<std::int32_t>(i);
    p.cell = target;
  }
  p.x = nx;
  p.y = ny;
  s.chemo[s.index(target)] += params.deposit;
  p.moved = true;
  return true;
}

// ---------------------------------------------------------------------------
// Environment

/// Synchronous damped 3x3 mean filter. Non-habitable and off-lattice cells
/// contribute zero and stay zero.
inline void diffuse(SimState& s, const HabitatMap& habitat, double damping, std::vector<double>& scratch) {
  const int w = s.width, h = s.height;
  scratch.assign(s.chemo.size(), 0.0);
  // Horizontal 3-sums into scratch, then vertical 3-sums back into chemo.
  for (int y = 0; y < h; ++y) {
    const double* row = s.chemo.data() + static_cast<std::size_t>(y) * w;
    double* out = scratch.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      double sum = row[x];
      if (x > 0) sum += row[x - 1];
      if (x + 1 < w) sum += row[x + 1];
      out[x] = sum;
    }
  }
  const auto& cells = habitat.cells();
  for (int y = 0; y < h; ++y) {
    const double* mid = scratch.data() + static_cast<std::size_t>(y) * w;
    const double* up = y > 0 ? mid - w : nullptr;
    const double* down = y + 1 < h ? mid + w : nullptr;
    double* out = s.chemo.data() + static_cast<std::size_t>(y) * w;
    const CellClass* cls = cells.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      if (cls[x] != CellClass::Habitable) {
        out[x] = 0.0;
        continue;
      }
      double sum = mid[x];
      if (up) sum += up[x];
      if (down) sum += down[x];
      out[x] = damping * (sum / 9.0);
    }
  }
}

inline void diffuse(SimState& s, const HabitatMap& habitat, double damping) {
  std::vector<double> scratch;
  diffuse(s, habitat, damping, scratch);
}

/// Pins every city centre cell to `stimulus`.
inline void project_stimuli(SimState& s, const CitySet& cities, double stimulus) {
  for (const auto& c : cities.cities) s.chemo[s.index(c.x, c.y)] = stimulus;
}

// ---------------------------------------------------------------------------
// Population adaptation

/// Particles inside the `window` x `window` square centred on `c`.
inline int count_in_window(const SimState& s, Cell c, int window) {
  const int r = window / 2;
  const int x0 = std::max(0, c.x - r), x1 = std::min(s.width - 1, c.x + r);
  const int y0 = std::max(0, c.y - r), y1 = std::min(s.height - 1, c.y + r);
  int n = 0;
  for (int y = y0; y <= y1; ++y) {
    const std::int32_t* row = s.occupancy.data() + static_cast<std::size_t>(y) * s.width;
    for (int x = x0; x <= x1; ++x) n += row[x] != kVacant;
  }
  return n;
}

struct AdaptStats {
  std::size_t born = 0;
  std::size_t died = 0;
};

/// Growth then shrinkage, each over the particles present at entry in a
/// fresh random order. Counts are taken live, so earlier births and deaths
/// in the same pass are visible to later particles. Newborns take no part
/// until the next step.
///
/// Growth: a particle whose last move succeeded and that sees between
/// growth_min and growth_max others in its growth window splits into a
/// uniformly chosen vacant habitable cell of its 3x3 neighbourhood.
/// Shrinkage: a particle is removed when its shrink-window count exceeds
/// shrink_max (count includes itself unless configured otherwise).
inline AdaptStats adapt_population(SimState& s, const HabitatMap& habitat, const ModelParams& params) {
  AdaptStats stats;
  const std::size_t n0 = s.particles.size();
  std::vector<std::uint32_t> order(n0);
  for (std::size_t i = 0; i < n0; ++i) order[i] = static_cast<std::uint32_t>(i);

  s.rng.shuffle(order);
  Cell vacant[8];
  for (auto i : order) {
    const Particle& p = s.particles[i];
    if (!p.moved) continue;
    const int others = count_in_window(s, p.cell, params.growth_window) - 1;
    if (others < params.growth_min || others > params.growth_max) continue;
    int nv = 0;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int x = p.cell.x + dx, y = p.cell.y + dy;
        if ((dx || dy) && habitat.habitable(x, y) && s.occupancy[s.index(x, y)] == kVacant) vacant[nv++] = {x, y};
      }
    if (nv == 0) continue;
    const Cell c = vacant[s.rng.below(static_cast<std::uint64_t>(nv))];
    add_particle(s, habitat, c, s.rng.uniform(0.0, 360.0));
    ++stats.born;
  }

  s.rng.shuffle(order);
  std::vector<bool> dead(s.particles.size(), false);
  const int self = params.shrink_count_includes_self ? 0 : 1;
  for (auto i : order) {
    const Particle& p = s.particles[i];
    if (count_in_window(s, p.cell, params.shrink_window) - self > params.shrink_max) {
      s.occupancy[s.index(p.cell)] = kVacant;
      dead[i] = true;
      ++stats.died;
    }
  }

  if (stats.died > 0) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < s.particles.size(); ++i) {
      if (dead[i]) continue;
      s.particles[out] = s.particles[i];
      s.occupancy[s.index(s.particles[out].cell)] = static_cast<std::int32_t>(out);
      ++out;
    }
    s.particles.resize(out);
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Scheduler

/// Reusable buffers for step(); keeps the hot loop allocation-free.
struct StepScratch {
  std::vector<std::uint32_t> order;
  std::vector<double> lattice;
};

inline void step(SimState& s, const Scenario& sc, StepScratch& scratch) {
  const auto& params = sc.params;
  auto& order = scratch.order;
  order.resize(s.particles.size());

  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
  s.rng.shuffle(order);
  for (auto i : order) sense(s, i, params);

  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
  s.rng.shuffle(order);
  for (auto i : order) move(s, i, sc.habitat, params);

  diffuse(s, sc.habitat, params.damping, scratch.lattice);
  project_stimuli(s, sc.cities, sc.stimulus());

  // The step being executed is number s.step + 1.
  if ((s.step + 1) % params.adaptation_interval == 0) adapt_population(s, sc.habitat, params);
  ++s.step;
}

inline void step(SimState& s, const Scenario& sc) {
  StepScratch scratch;
  step(s, sc, scratch);
}

// ---------------------------------------------------------------------------
// Replay digest

/// Digest of an empty state (no particles, 0x0 lattice).
inline constexpr const char* kEmptyStateDigest = "88201fb960ff6465";

/// FNV-1a 64 over the particle multiset (sorted by cell) and the chemo
/// lattice, as 16 lowercase hex digits. Independent of particle list order,
/// step counter and RNG state.
inline std::string state_digest(const SimState& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&](std::uint64_t v, int bytes) {
    for (int b = 0; b < bytes; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 0x00000100000001b3ull;
    }
  };
  auto mix_double = [&](double d) { mix(std::bit_cast<std::uint64_t>(d), 8); };

  std::vector<const Particle*> sorted;
  sorted.reserve(s.particles.size());
  for (const auto& p : s.particles) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](const Particle* a, const Particle* b) {
    return std::tie(a->cell.y, a->cell.x) < std::tie(b->cell.y, b->cell.x);
  });
  mix(sorted.size(), 8);
  for (const auto* p : sorted) {
    mix(static_cast<std::uint32_t>(p->cell.x), 4);
    mix(static_cast<std::uint32_t>(p->cell.y), 4);
    mix_double(p->x);
    mix_double(p->y);
    mix_double(p->heading);
    mix(p->moved ? 1 : 0, 1);
  }
  mix(static_cast<std::uint32_t>(s.width), 4);
  mix(static_cast<std::uint32_t>(s.height), 4);
  for (double c : s.chemo) mix_double(c);

  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Invariant checks (used by tests and debug runs)

/// Empty string when consistent, otherwise a description of the first
/// violated invariant.
inline std::string check_invariants(const SimState& s, const HabitatMap& habitat) {
  std::size_t occupied = 0;
  for (std::size_t i = 0; i < s.occupancy.size(); ++i) {
    if (s.occupancy[i] == kVacant) continue;
    ++occupied;
    const auto idx = static_cast<std::size_t>(s.occupancy[i]);
    if (idx >= s.particles.size() || s.index(s.particles[idx].cell) != i) return "occupancy points at wrong particle";
  }
  if (occupied != s.particles.size()) return "occupied cell count differs from particle count";
  for (const auto& p : s.particles) {
    if (!habitat.habitable(p.cell.x, p.cell.y)) return "particle on non-habitable cell";
    if (detail::round_coord(p.x) != p.cell.x || detail::round_coord(p.y) != p.cell.y) return "cell is not the rounded position";
    if (!(p.heading >= 0 && p.heading < 360)) return "heading out of range";
  }
  for (std::size_t i = 0; i < s.chemo.size(); ++i) {
    if (!(s.chemo[i] >= 0)) return "negative chemo";
    if (habitat.at(i) != CellClass::Habitable && s.chemo[i] != 0) return "chemo on non-habitable cell";
  }
  return {};
}

inline double total_chemo(const SimState& s) {
  double t = 0;
  for (double c : s.chemo) t += c;
  return t;
}

}  // namespace slimenet
