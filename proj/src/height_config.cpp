#include "sandlab/height_config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace sandlab {

HeightConfig::HeightConfig(Volume v, std::vector<std::int64_t> h)
    : volume(v), heights(std::move(h)) {
  if (static_cast<std::int64_t>(heights.size()) != volume.size())
    throw std::invalid_argument("HeightConfig: size mismatch");
}

HeightConfig HeightConfig::constant(const Volume& v, std::int64_t value) {
  return HeightConfig(v, std::vector<std::int64_t>(std::size_t(v.size()), value));
}

std::int64_t HeightConfig::at(const Site& s) const {
  if (!volume.contains(s))
    throw std::out_of_range("HeightConfig::at: site outside volume");
  return heights[std::size_t(volume.index(s))];
}

std::int64_t& HeightConfig::at(const Site& s) {
  if (!volume.contains(s))
    throw std::out_of_range("HeightConfig::at: site outside volume");
  return heights[std::size_t(volume.index(s))];
}

bool HeightConfig::is_stable() const {
  const std::int64_t cap = 2 * volume.d;
  return std::all_of(heights.begin(), heights.end(),
                     [cap](std::int64_t h) { return h <= cap; });
}

std::int64_t HeightConfig::total_mass() const {
  std::int64_t sum = 0;
  for (std::int64_t h : heights) sum += h;
  return sum;
}

std::int64_t HeightConfig::max_height() const {
  return *std::max_element(heights.begin(), heights.end());
}

std::int64_t HeightConfig::min_height() const {
  return *std::min_element(heights.begin(), heights.end());
}

HeightConfig restrict_to(const HeightConfig& eta, const Volume& w) {
  if (!eta.volume.contains(w))
    throw std::invalid_argument("restrict_to: " + w.str() + " not inside " +
                                eta.volume.str());
  HeightConfig out = HeightConfig::zeros(w);
  for (std::int64_t i = 0; i < w.size(); ++i)
    out.heights[std::size_t(i)] =
        eta.heights[std::size_t(eta.volume.index(w.site(i)))];
  return out;
}

HeightConfig operator+(const HeightConfig& a, const HeightConfig& b) {
  if (!(a.volume == b.volume))
    throw std::invalid_argument("HeightConfig+: volume mismatch");
  HeightConfig out = a;
  for (std::size_t i = 0; i < out.heights.size(); ++i)
    out.heights[i] += b.heights[i];
  return out;
}

// --- JSON -----------------------------------------------------------------

std::string config_to_json_string(const HeightConfig& c, int indent) {
  nlohmann::json j;
  j["d"] = c.volume.d;
  j["lo"] = std::vector<Coord>(c.volume.lo.c.begin(),
                               c.volume.lo.c.begin() + c.volume.d);
  j["hi"] = std::vector<Coord>(c.volume.hi.c.begin(),
                               c.volume.hi.c.begin() + c.volume.d);
  j["heights"] = c.heights;
  return j.dump(indent);
}

HeightConfig config_from_json_string(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const int d = j.at("d").get<int>();
  if (d < 1 || d > 3) throw std::invalid_argument("config json: d must be 1..3");
  const auto lo = j.at("lo").get<std::vector<Coord>>();
  const auto hi = j.at("hi").get<std::vector<Coord>>();
  if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d)
    throw std::invalid_argument("config json: lo/hi length != d");
  Site slo, shi;
  for (int i = 0; i < d; ++i) {
    slo[i] = lo[std::size_t(i)];
    shi[i] = hi[std::size_t(i)];
  }
  return HeightConfig(Volume::box(slo, shi, d),
                      j.at("heights").get<std::vector<std::int64_t>>());
}

// --- Binary ----------------------------------------------------------------

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("binary config: truncated stream");
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
         (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

}  // namespace

void write_binary(const HeightConfig& c, std::ostream& out) {
  out.write("ASM1", 4);
  put_u32(out, static_cast<std::uint32_t>(c.volume.d));
  for (int i = 0; i < c.volume.d; ++i) {
    put_u32(out, static_cast<std::uint32_t>(c.volume.lo[i]));
    put_u32(out, static_cast<std::uint32_t>(c.volume.extent(i)));
  }
  for (std::int64_t h : c.heights) {
    if (h < 0 || h > std::numeric_limits<std::uint32_t>::max())
      throw std::invalid_argument("binary config: height out of u32 range");
    put_u32(out, static_cast<std::uint32_t>(h));
  }
}

HeightConfig read_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "ASM1")
    throw std::runtime_error("binary config: bad magic");
  const int d = static_cast<int>(get_u32(in));
  if (d < 1 || d > 3) throw std::runtime_error("binary config: d must be 1..3");
  Site lo, hi;
  for (int i = 0; i < d; ++i) {
    lo[i] = static_cast<Coord>(get_u32(in));
    const std::int64_t ext = get_u32(in);
    if (ext < 1) throw std::runtime_error("binary config: empty extent");
    hi[i] = static_cast<Coord>(lo[i] + ext - 1);
  }
  const Volume v = Volume::box(lo, hi, d);
  std::vector<std::int64_t> h(std::size_t(v.size()));
  for (auto& x : h) x = get_u32(in);
  return HeightConfig(v, std::move(h));
}

void save_config(const HeightConfig& c, const std::string& path) {
  const bool json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  std::ofstream out(path, json ? std::ios::out : std::ios::out | std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  if (json)
    out << config_to_json_string(c) << "\n";
  else
    write_binary(c, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

HeightConfig load_config(const std::string& path) {
  const bool json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  std::ifstream in(path, json ? std::ios::in : std::ios::in | std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  if (json) {
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return config_from_json_string(text);
  }
  return read_binary(in);
}

}  // namespace sandlab
