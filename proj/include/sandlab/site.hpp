#pragma once

// Lattice geometry: sites of Z^d and axis-aligned boxes (volumes), d <= 3.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace sandlab {

using Coord = std::int32_t;

// A site of Z^d. Unused coordinates stay zero; the ambient dimension
// travels with the Volume (or is passed explicitly where needed).
struct Site {
  std::array<Coord, 3> c{0, 0, 0};

  Coord& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  Coord operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  friend bool operator==(const Site&, const Site&) = default;

  static Site of(Coord x) { return Site{{x, 0, 0}}; }
  static Site of(Coord x, Coord y) { return Site{{x, y, 0}}; }
  static Site of(Coord x, Coord y, Coord z) { return Site{{x, y, z}}; }

  std::string str(int d) const;
};

// Directions are numbered 0..2d-1: axis = dir >> 1, step = +1 for even
// dir, -1 for odd.
inline Site neighbor_site(Site x, int dir) {
  x[dir >> 1] += (dir & 1) ? -1 : 1;
  return x;
}

// The 2d nearest neighbors of x.
std::vector<Site> neighbors(const Site& x, int d);

// Inclusive axis-aligned box [lo, hi] in Z^d.
struct Volume {
  Site lo, hi;
  int d = 0;

  static Volume box(const Site& lo, const Site& hi, int d);
  static Volume interval(Coord a, Coord b);             // d = 1
  static Volume centered(int d, Coord half);            // [-half, half]^d
  // Box of the given side length per axis, centered at the origin
  // (for even sides the origin sits just right of center).
  static Volume centered_box(int d, std::int64_t side);

  std::int64_t extent(int axis) const {
    return static_cast<std::int64_t>(hi[axis]) - lo[axis] + 1;
  }
  std::int64_t size() const;
  bool contains(const Site& s) const;
  bool contains(const Volume& w) const;  // nesting, inclusive
  // Row-major flat index, last axis fastest.
  std::int64_t index(const Site& s) const;
  Site site(std::int64_t idx) const;
  bool on_boundary(const Site& s) const;

  friend bool operator==(const Volume&, const Volume&) = default;
  std::string str() const;
};

// lambda_V(x): number of neighbors of x outside V. Throws if x is not in V.
int lacking_neighbors(const Site& x, const Volume& V);

}  // namespace sandlab
