#pragma once

// Finite-volume stabilization: repeated legal topplings of unstable sites
// (height > 2d) until every height is <= 2d. The per-site toppling counts
// form the minimal solution m of eta - Delta_V m = xi, independent of the
// toppling order (abelianness).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sandlab/height_config.hpp"

namespace sandlab {

enum class OrderPolicy { queue, scanline, random, stack, parallel_sweep };
OrderPolicy order_policy_from_string(const std::string& name);
const char* to_string(OrderPolicy p);

enum class StabilizeStatus { done, cap_exceeded };

struct StabilizeOptions {
  // Per-site toppling budget. Exceeding it yields a cap_exceeded result
  // (a distinguished outcome, not an error): probes drive runs toward
  // divergence on purpose.
  std::int64_t per_site_cap = 10'000'000;
  // d=1 intervals at or above this size get a closed-form warm start
  // (exact integer lower bound on the odometer from the interval Green
  // function) before the legal toppling loop finishes the job. The result
  // is bit-identical to the plain loop; 0 disables.
  std::int64_t d1_fast_min_sites = 1024;
};

struct TopplingVector {
  Volume volume;
  std::vector<std::int64_t> counts;

  std::int64_t at(const Site& s) const;
  std::int64_t total() const;
  friend bool operator==(const TopplingVector&, const TopplingVector&) = default;
};

struct StabilizationResult {
  HeightConfig xi;       // final configuration (stable iff status == done)
  TopplingVector m;      // per-site topplings
  std::int64_t total_topplings = 0;
  std::int64_t grains_lost = 0;  // sum over x of m(x) * lambda_V(x)
  std::optional<std::int64_t> waves;
  StabilizeStatus status = StabilizeStatus::done;

  bool ok() const { return status == StabilizeStatus::done; }
};

// Reusable per-volume workspace: neighbor table, boundary weights and
// scratch buffers. One engine per thread; stabilizations of distinct
// configurations may run on distinct engines concurrently.
class TopplingEngine {
 public:
  explicit TopplingEngine(const Volume& v, StabilizeOptions opt = {});

  const Volume& volume() const { return volume_; }
  const StabilizeOptions& options() const { return opt_; }

  StabilizationResult stabilize(const HeightConfig& eta);
  StabilizationResult stabilize(const HeightConfig& eta, OrderPolicy policy,
                                std::uint64_t seed);

  // Single-addition relaxation in place, used by chain samplers: adds k
  // grains at flat index `at` and relaxes legally. Returns the number of
  // topplings, or nullopt if the per-site cap was hit.
  std::optional<std::int64_t> add_and_relax(std::vector<std::int64_t>& heights,
                                            std::int64_t at, std::int64_t k);

  int lambda_at(std::int64_t idx) const { return lambda_[std::size_t(idx)]; }
  // Flat index of the neighbor of `idx` in direction `dir`, or -1 outside V.
  std::int64_t neighbor_index(std::int64_t idx, int dir) const {
    return nbr_[std::size_t(idx) * std::size_t(2 * volume_.d) + std::size_t(dir)];
  }

 private:
  friend struct WaveRunner;

  StabilizeStatus run_queue(std::vector<std::int64_t>& h,
                            std::vector<std::int64_t>& m);
  StabilizeStatus run_stack(std::vector<std::int64_t>& h,
                            std::vector<std::int64_t>& m);
  StabilizeStatus run_scanline(std::vector<std::int64_t>& h,
                               std::vector<std::int64_t>& m);
  StabilizeStatus run_random(std::vector<std::int64_t>& h,
                             std::vector<std::int64_t>& m, std::uint64_t seed);
  StabilizeStatus run_parallel_sweep(std::vector<std::int64_t>& h,
                                     std::vector<std::int64_t>& m);
  bool d1_warm_start(std::vector<std::int64_t>& h, std::vector<std::int64_t>& m);
  StabilizationResult finish(const HeightConfig& eta,
                             std::vector<std::int64_t>&& h,
                             std::vector<std::int64_t>&& m,
                             StabilizeStatus status) const;

  Volume volume_;
  StabilizeOptions opt_;
  std::int64_t n_ = 0;
  int two_d_ = 0;
  std::vector<std::int64_t> nbr_;   // n * 2d, -1 outside
  std::vector<std::int32_t> lambda_;
  // scratch
  std::vector<std::int64_t> fifo_;
  std::vector<std::uint8_t> flag_;
};

StabilizationResult stabilize(const HeightConfig& eta,
                              const StabilizeOptions& opt = {});
StabilizationResult stabilize_with_order(const HeightConfig& eta,
                                         OrderPolicy policy,
                                         std::uint64_t seed = 0,
                                         const StabilizeOptions& opt = {});

// Copy of eta with k extra grains at x (k >= 0).
HeightConfig add(const HeightConfig& eta, const Site& x, std::int64_t k);

// The addition field x -> lambda_V(x): nonzero only on the boundary.
HeightConfig special_boundary_addition(const Volume& v);

// Stabilize eta + special_boundary_addition. For recurrent eta every site
// topples exactly once and the configuration is reproduced; `holds`
// reports whether that happened.
struct RectangleIdentityReport {
  bool holds = false;
  bool m_all_one = false;
  bool unchanged = false;
  StabilizationResult result;
};
RectangleIdentityReport rectangle_identity_check(const HeightConfig& eta,
                                                 const StabilizeOptions& opt = {});

}  // namespace sandlab
