#pragma once

// Integer height field on a finite box: the central state object.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sandlab/site.hpp"

namespace sandlab {

struct HeightConfig {
  Volume volume;
  std::vector<std::int64_t> heights;  // row-major, last axis fastest

  HeightConfig() = default;
  HeightConfig(Volume v, std::vector<std::int64_t> h);

  static HeightConfig constant(const Volume& v, std::int64_t value);
  static HeightConfig zeros(const Volume& v) { return constant(v, 0); }

  std::int64_t at(const Site& s) const;
  std::int64_t& at(const Site& s);

  // Stable means every height <= 2d. Heights may be negative or huge in
  // intermediate states; those are never stable.
  bool is_stable() const;
  std::int64_t total_mass() const;
  std::int64_t max_height() const;
  std::int64_t min_height() const;

  friend bool operator==(const HeightConfig&, const HeightConfig&) = default;
};

// Restriction of a configuration to a sub-box W of its volume.
HeightConfig restrict_to(const HeightConfig& eta, const Volume& w);

// Pointwise sum; volumes must match.
HeightConfig operator+(const HeightConfig& a, const HeightConfig& b);

// --- Serialization ------------------------------------------------------
// JSON object: {"d": d, "lo": [...], "hi": [...], "heights": [...]}
std::string config_to_json_string(const HeightConfig& c, int indent = -1);
HeightConfig config_from_json_string(const std::string& text);

// Compact binary format for large grids:
//   magic "ASM1", then little-endian u32 d, then per axis i32 lo and
//   u32 extent, then size() heights as u32 (row-major, last axis fastest).
// Heights outside [0, 2^32) are refused.
void write_binary(const HeightConfig& c, std::ostream& out);
HeightConfig read_binary(std::istream& in);
void save_config(const HeightConfig& c, const std::string& path);  // by extension: .json or binary
HeightConfig load_config(const std::string& path);

}  // namespace sandlab
