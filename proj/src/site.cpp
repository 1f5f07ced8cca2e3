#include "sandlab/site.hpp"

#include <sstream>
#include <stdexcept>

namespace sandlab {

std::string Site::str(int d) const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < d; ++i) os << (i ? "," : "") << c[std::size_t(i)];
  os << ')';
  return os.str();
}

std::vector<Site> neighbors(const Site& x, int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("neighbors: d must be 1..3");
  std::vector<Site> out;
  out.reserve(std::size_t(2 * d));
  for (int dir = 0; dir < 2 * d; ++dir) out.push_back(neighbor_site(x, dir));
  return out;
}

Volume Volume::box(const Site& lo, const Site& hi, int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("Volume: d must be 1..3");
  for (int i = 0; i < d; ++i)
    if (lo[i] > hi[i]) throw std::invalid_argument("Volume: lo > hi on axis " + std::to_string(i));
  Volume v;
  v.lo = lo;
  v.hi = hi;
  v.d = d;
  return v;
}

Volume Volume::interval(Coord a, Coord b) { return box(Site::of(a), Site::of(b), 1); }

Volume Volume::centered(int d, Coord half) {
  if (half < 0) throw std::invalid_argument("Volume::centered: half < 0");
  Site lo, hi;
  for (int i = 0; i < d; ++i) {
    lo[i] = -half;
    hi[i] = half;
  }
  return box(lo, hi, d);
}

Volume Volume::centered_box(int d, std::int64_t side) {
  if (side < 1) throw std::invalid_argument("Volume::centered_box: side < 1");
  Site lo, hi;
  for (int i = 0; i < d; ++i) {
    lo[i] = static_cast<Coord>(-(side / 2));
    hi[i] = static_cast<Coord>(side - side / 2 - 1);
  }
  return box(lo, hi, d);
}

std::int64_t Volume::size() const {
  std::int64_t n = 1;
  for (int i = 0; i < d; ++i) n *= extent(i);
  return n;
}

bool Volume::contains(const Site& s) const {
  for (int i = 0; i < d; ++i)
    if (s[i] < lo[i] || s[i] > hi[i]) return false;
  return true;
}

bool Volume::contains(const Volume& w) const {
  if (w.d != d) return false;
  return contains(w.lo) && contains(w.hi);
}

std::int64_t Volume::index(const Site& s) const {
  std::int64_t idx = 0;
  for (int i = 0; i < d; ++i)
    idx = idx * extent(i) + (static_cast<std::int64_t>(s[i]) - lo[i]);
  return idx;
}

Site Volume::site(std::int64_t idx) const {
  Site s;
  for (int i = d - 1; i >= 0; --i) {
    const std::int64_t e = extent(i);
    s[i] = static_cast<Coord>(lo[i] + idx % e);
    idx /= e;
  }
  return s;
}

bool Volume::on_boundary(const Site& s) const {
  for (int i = 0; i < d; ++i)
    if (s[i] == lo[i] || s[i] == hi[i]) return true;
  return false;
}

std::string Volume::str() const {
  std::ostringstream os;
  for (int i = 0; i < d; ++i) os << (i ? "x" : "") << extent(i);
  os << "@" << lo.str(d);
  return os.str();
}

int lacking_neighbors(const Site& x, const Volume& V) {
  if (!V.contains(x))
    throw std::invalid_argument("lacking_neighbors: site " + x.str(V.d) +
                                " outside " + V.str());
  int count = 0;
  for (int dir = 0; dir < 2 * V.d; ++dir)
    if (!V.contains(neighbor_site(x, dir))) ++count;
  return count;
}

}  // namespace sandlab
