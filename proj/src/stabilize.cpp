#include "sandlab/stabilize.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

#include "sandlab/rng.hpp"

namespace sandlab {

OrderPolicy order_policy_from_string(const std::string& name) {
  if (name == "queue") return OrderPolicy::queue;
  if (name == "scanline") return OrderPolicy::scanline;
  if (name == "random") return OrderPolicy::random;
  if (name == "stack") return OrderPolicy::stack;
  if (name == "parallel-sweep" || name == "parallel_sweep")
    return OrderPolicy::parallel_sweep;
  throw std::invalid_argument("unknown order policy: " + name);
}

const char* to_string(OrderPolicy p) {
  switch (p) {
    case OrderPolicy::queue: return "queue";
    case OrderPolicy::scanline: return "scanline";
    case OrderPolicy::random: return "random";
    case OrderPolicy::stack: return "stack";
    case OrderPolicy::parallel_sweep: return "parallel-sweep";
  }
  return "?";
}

std::int64_t TopplingVector::at(const Site& s) const {
  if (!volume.contains(s))
    throw std::out_of_range("TopplingVector::at: site outside volume");
  return counts[std::size_t(volume.index(s))];
}

std::int64_t TopplingVector::total() const {
  std::int64_t sum = 0;
  for (std::int64_t c : counts) sum += c;
  return sum;
}

TopplingEngine::TopplingEngine(const Volume& v, StabilizeOptions opt)
    : volume_(v), opt_(opt), n_(v.size()), two_d_(2 * v.d) {
  nbr_.resize(std::size_t(n_) * std::size_t(two_d_));
  lambda_.resize(std::size_t(n_));
  for (std::int64_t i = 0; i < n_; ++i) {
    const Site s = volume_.site(i);
    int lack = 0;
    for (int dir = 0; dir < two_d_; ++dir) {
      const Site nb = neighbor_site(s, dir);
      if (volume_.contains(nb)) {
        nbr_[std::size_t(i) * std::size_t(two_d_) + std::size_t(dir)] =
            volume_.index(nb);
      } else {
        nbr_[std::size_t(i) * std::size_t(two_d_) + std::size_t(dir)] = -1;
        ++lack;
      }
    }
    lambda_[std::size_t(i)] = lack;
  }
}

// Bulk toppling count for height h > 2d: the largest k with
// h - 2d*k >= 1, i.e. the number of topplings a legal scheduler would
// perform at this site before it can possibly go stable.
static inline std::int64_t bulk_count(std::int64_t h, int two_d) {
  return (h - two_d - 1) / two_d + 1;
}

StabilizeStatus TopplingEngine::run_queue(std::vector<std::int64_t>& h,
                                          std::vector<std::int64_t>& m) {
  fifo_.resize(std::size_t(n_));
  flag_.assign(std::size_t(n_), 0);
  std::size_t head = 0, tail = 0, count = 0;
  const std::size_t cap = std::size_t(n_);
  auto push = [&](std::int64_t i) {
    fifo_[tail] = i;
    tail = (tail + 1) % cap;
    ++count;
    flag_[std::size_t(i)] = 1;
  };
  for (std::int64_t i = 0; i < n_; ++i)
    if (h[std::size_t(i)] > two_d_) push(i);
  while (count > 0) {
    const std::int64_t i = fifo_[head];
    head = (head + 1) % cap;
    --count;
    flag_[std::size_t(i)] = 0;
    const std::int64_t hi = h[std::size_t(i)];
    if (hi <= two_d_) continue;
    const std::int64_t k = bulk_count(hi, two_d_);
    if (m[std::size_t(i)] > opt_.per_site_cap - k) return StabilizeStatus::cap_exceeded;
    m[std::size_t(i)] += k;
    h[std::size_t(i)] = hi - std::int64_t(two_d_) * k;
    const std::int64_t* nb = &nbr_[std::size_t(i) * std::size_t(two_d_)];
    for (int dir = 0; dir < two_d_; ++dir) {
      const std::int64_t j = nb[dir];
      if (j < 0) continue;
      if ((h[std::size_t(j)] += k) > two_d_ && !flag_[std::size_t(j)]) push(j);
    }
  }
  return StabilizeStatus::done;
}

StabilizeStatus TopplingEngine::run_stack(std::vector<std::int64_t>& h,
                                          std::vector<std::int64_t>& m) {
  std::vector<std::int64_t> stack;
  flag_.assign(std::size_t(n_), 0);
  for (std::int64_t i = 0; i < n_; ++i)
    if (h[std::size_t(i)] > two_d_) {
      stack.push_back(i);
      flag_[std::size_t(i)] = 1;
    }
  while (!stack.empty()) {
    const std::int64_t i = stack.back();
    stack.pop_back();
    flag_[std::size_t(i)] = 0;
    const std::int64_t hi = h[std::size_t(i)];
    if (hi <= two_d_) continue;
    const std::int64_t k = bulk_count(hi, two_d_);
    if (m[std::size_t(i)] > opt_.per_site_cap - k) return StabilizeStatus::cap_exceeded;
    m[std::size_t(i)] += k;
    h[std::size_t(i)] = hi - std::int64_t(two_d_) * k;
    const std::int64_t* nb = &nbr_[std::size_t(i) * std::size_t(two_d_)];
    for (int dir = 0; dir < two_d_; ++dir) {
      const std::int64_t j = nb[dir];
      if (j < 0) continue;
      if ((h[std::size_t(j)] += k) > two_d_ && !flag_[std::size_t(j)]) {
        stack.push_back(j);
        flag_[std::size_t(j)] = 1;
      }
    }
  }
  return StabilizeStatus::done;
}

StabilizeStatus TopplingEngine::run_scanline(std::vector<std::int64_t>& h,
                                             std::vector<std::int64_t>& m) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::int64_t i = 0; i < n_; ++i) {
      const std::int64_t hi = h[std::size_t(i)];
      if (hi <= two_d_) continue;
      const std::int64_t k = bulk_count(hi, two_d_);
      if (m[std::size_t(i)] > opt_.per_site_cap - k)
        return StabilizeStatus::cap_exceeded;
      m[std::size_t(i)] += k;
      h[std::size_t(i)] = hi - std::int64_t(two_d_) * k;
      const std::int64_t* nb = &nbr_[std::size_t(i) * std::size_t(two_d_)];
      for (int dir = 0; dir < two_d_; ++dir)
        if (nb[dir] >= 0) h[std::size_t(nb[dir])] += k;
      changed = true;
    }
  }
  return StabilizeStatus::done;
}

StabilizeStatus TopplingEngine::run_random(std::vector<std::int64_t>& h,
                                           std::vector<std::int64_t>& m,
                                           std::uint64_t seed) {
  rng::Counter rng(rng::derive(seed, 0x72616e64));  // "rand"
  std::vector<std::int64_t> active;
  flag_.assign(std::size_t(n_), 0);
  for (std::int64_t i = 0; i < n_; ++i)
    if (h[std::size_t(i)] > two_d_) {
      active.push_back(i);
      flag_[std::size_t(i)] = 1;
    }
  while (!active.empty()) {
    const std::size_t pos = std::size_t(rng.next_below(active.size()));
    const std::int64_t i = active[pos];
    const std::int64_t hi = h[std::size_t(i)];
    if (hi <= two_d_) {
      active[pos] = active.back();
      active.pop_back();
      flag_[std::size_t(i)] = 0;
      continue;
    }
    // one toppling at a time: exercises an order genuinely different
    // from the bulk policies
    if (m[std::size_t(i)] >= opt_.per_site_cap) return StabilizeStatus::cap_exceeded;
    ++m[std::size_t(i)];
    h[std::size_t(i)] = hi - two_d_;
    const std::int64_t* nb = &nbr_[std::size_t(i) * std::size_t(two_d_)];
    for (int dir = 0; dir < two_d_; ++dir) {
      const std::int64_t j = nb[dir];
      if (j < 0) continue;
      if (++h[std::size_t(j)] > two_d_ && !flag_[std::size_t(j)]) {
        active.push_back(j);
        flag_[std::size_t(j)] = 1;
      }
    }
    if (h[std::size_t(i)] <= two_d_) {
      active[pos] = active.back();
      active.pop_back();
      flag_[std::size_t(i)] = 0;
    }
  }
  return StabilizeStatus::done;
}

StabilizeStatus TopplingEngine::run_parallel_sweep(std::vector<std::int64_t>& h,
                                                   std::vector<std::int64_t>& m) {
  // Synchronous sweeps: every unstable site fires its bulk count computed
  // from the same snapshot. The update is a pure function of the snapshot,
  // so splitting rows across threads cannot change the result.
  std::vector<std::int64_t> k(std::size_t(n_), 0);
  const unsigned hw = std::thread::hardware_concurrency();
  const int n_threads = (n_ >= 1 << 16 && hw > 1) ? int(std::min(hw, 8u)) : 1;
  for (;;) {
    bool any = false;
    for (std::int64_t i = 0; i < n_; ++i) {
      const std::int64_t hi = h[std::size_t(i)];
      if (hi > two_d_) {
        k[std::size_t(i)] = bulk_count(hi, two_d_);
        any = true;
      } else {
        k[std::size_t(i)] = 0;
      }
    }
    if (!any) return StabilizeStatus::done;
    for (std::int64_t i = 0; i < n_; ++i)
      if (k[std::size_t(i)] > 0 &&
          m[std::size_t(i)] > opt_.per_site_cap - k[std::size_t(i)])
        return StabilizeStatus::cap_exceeded;
    auto apply = [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t i = begin; i < end; ++i) {
        std::int64_t delta = -std::int64_t(two_d_) * k[std::size_t(i)];
        const std::int64_t* nb = &nbr_[std::size_t(i) * std::size_t(two_d_)];
        for (int dir = 0; dir < two_d_; ++dir)
          if (nb[dir] >= 0) delta += k[std::size_t(nb[dir])];
        h[std::size_t(i)] += delta;
        m[std::size_t(i)] += k[std::size_t(i)];
      }
    };
    if (n_threads == 1) {
      apply(0, n_);
    } else {
      std::vector<std::thread> pool;
      const std::int64_t chunk = (n_ + n_threads - 1) / n_threads;
      for (int t = 0; t < n_threads; ++t)
        pool.emplace_back(apply, t * chunk, std::min(n_, (t + 1) * chunk));
      for (auto& th : pool) th.join();
    }
  }
}

// Exact warm start for long d=1 intervals. The interval Green function is
// G(i,j) = min(i,j) * (n+1-max(i,j)) / (n+1) in 1-based positions, with
// G >= 0 entrywise, so for any stabilizing vector m and stable xi <= 2:
//   m = G (eta - xi) >= G (eta - 2)  componentwise.
// Hence u = max(0, ceil(G (eta-2))) is a pointwise lower bound on the
// odometer, and finishing eta - Delta u with legal topplings lands exactly
// on the minimal solution (if v <= m_min then m_min = v + odometer of
// eta - Delta v; both inequalities follow from minimality).
// Returns 0 = nothing to do, 1 = applied, 2 = lower bound already beats the
// per-site cap (u clamped and applied; caller must report cap_exceeded).
int TopplingEngine::d1_warm_start(std::vector<std::int64_t>& h,
                                  std::vector<std::int64_t>& m) {
  const std::int64_t n = n_;
  using Big = __int128;
  std::vector<std::int64_t> u(std::size_t(n), 0);
  // prefix[i] = sum_{pos<=i} pos * r(pos), suffix analogous; positions 1-based
  Big prefix = 0;
  std::vector<Big> pre(std::size_t(n));
  for (std::int64_t i = 0; i < n; ++i) {
    prefix += Big(i + 1) * (h[std::size_t(i)] - 2);
    pre[std::size_t(i)] = prefix;
  }
  Big suffix = 0;
  bool any = false, capped = false;
  for (std::int64_t i = n - 1; i >= 0; --i) {
    const Big numer = Big(n - i) * pre[std::size_t(i)] + Big(i + 1) * suffix;
    if (numer > 0) {
      const Big div = n + 1;
      Big q = (numer + div - 1) / div;  // ceil, numer > 0
      if (q > opt_.per_site_cap) {
        q = opt_.per_site_cap;  // still a valid lower bound
        capped = true;
      }
      u[std::size_t(i)] = std::int64_t(q);
      any = true;
    }
    suffix += Big(n - i) * (h[std::size_t(i)] - 2);
  }
  if (!any) return 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t left = i > 0 ? u[std::size_t(i - 1)] : 0;
    const std::int64_t right = i + 1 < n ? u[std::size_t(i + 1)] : 0;
    h[std::size_t(i)] += left + right - 2 * u[std::size_t(i)];
    m[std::size_t(i)] = u[std::size_t(i)];
  }
  return capped ? 2 : 1;
}

StabilizationResult TopplingEngine::finish(std::vector<std::int64_t>&& h,
                                           std::vector<std::int64_t>&& m,
                                           StabilizeStatus status) const {
  StabilizationResult r;
  r.status = status;
  r.xi = HeightConfig(volume_, std::move(h));
  std::int64_t total = 0, lost = 0;
  for (std::int64_t i = 0; i < n_; ++i) {
    total += m[std::size_t(i)];
    lost += m[std::size_t(i)] * lambda_[std::size_t(i)];
  }
  r.m = TopplingVector{volume_, std::move(m)};
  r.total_topplings = total;
  r.grains_lost = lost;
  return r;
}

StabilizationResult TopplingEngine::stabilize(const HeightConfig& eta) {
  if (!(eta.volume == volume_))
    throw std::invalid_argument("stabilize: configuration volume mismatch");
  std::vector<std::int64_t> h = eta.heights;
  std::vector<std::int64_t> m(std::size_t(n_), 0);
  int warm = 0;
  if (volume_.d == 1 && opt_.d1_fast_min_sites > 0 &&
      n_ >= opt_.d1_fast_min_sites)
    warm = d1_warm_start(h, m);
  const StabilizeStatus st =
      warm == 2 ? StabilizeStatus::cap_exceeded : run_queue(h, m);
  return finish(std::move(h), std::move(m), st);
}

StabilizationResult TopplingEngine::stabilize(const HeightConfig& eta,
                                              OrderPolicy policy,
                                              std::uint64_t seed) {
  if (!(eta.volume == volume_))
    throw std::invalid_argument("stabilize: configuration volume mismatch");
  std::vector<std::int64_t> h = eta.heights;
  std::vector<std::int64_t> m(std::size_t(n_), 0);
  StabilizeStatus st = StabilizeStatus::done;
  switch (policy) {
    case OrderPolicy::queue: st = run_queue(h, m); break;
    case OrderPolicy::stack: st = run_stack(h, m); break;
    case OrderPolicy::scanline: st = run_scanline(h, m); break;
    case OrderPolicy::random: st = run_random(h, m, seed); break;
    case OrderPolicy::parallel_sweep: st = run_parallel_sweep(h, m); break;
  }
  return finish(eta, std::move(h), std::move(m), st);
}

std::optional<std::int64_t> TopplingEngine::add_and_relax(
    std::vector<std::int64_t>& heights, std::int64_t at, std::int64_t k) {
  heights[std::size_t(at)] += k;
  if (heights[std::size_t(at)] <= two_d_) return 0;
  fifo_.resize(std::size_t(n_));
  flag_.assign(std::size_t(n_), 0);
  std::size_t head = 0, tail = 0, count = 0;
  const std::size_t cap = std::size_t(n_);
  auto push = [&](std::int64_t i) {
    fifo_[tail] = i;
    tail = (tail + 1) % cap;
    ++count;
    flag_[std::size_t(i)] = 1;
  };
  push(at);
  std::int64_t total = 0;
  while (count > 0) {
    const std::int64_t i = fifo_[head];
    head = (head + 1) % cap;
    --count;
    flag_[std::size_t(i)] = 0;
    const std::int64_t hi = heights[std::size_t(i)];
    if (hi <= two_d_) continue;
    const std::int64_t t = bulk_count(hi, two_d_);
    total += t;
    if (total > opt_.per_site_cap) return std::nullopt;
    heights[std::size_t(i)] = hi - std::int64_t(two_d_) * t;
    const std::int64_t* nb = &nbr_[std::size_t(i) * std::size_t(two_d_)];
    for (int dir = 0; dir < two_d_; ++dir) {
      const std::int64_t j = nb[dir];
      if (j < 0) continue;
      if ((heights[std::size_t(j)] += t) > two_d_ && !flag_[std::size_t(j)])
        push(j);
    }
  }
  return total;
}

StabilizationResult stabilize(const HeightConfig& eta,
                              const StabilizeOptions& opt) {
  TopplingEngine engine(eta.volume, opt);
  return engine.stabilize(eta);
}

StabilizationResult stabilize_with_order(const HeightConfig& eta,
                                         OrderPolicy policy,
                                         std::uint64_t seed,
                                         const StabilizeOptions& opt) {
  TopplingEngine engine(eta.volume, opt);
  return engine.stabilize(eta, policy, seed);
}

HeightConfig add(const HeightConfig& eta, const Site& x, std::int64_t k) {
  if (k < 0) throw std::invalid_argument("add: k must be >= 0");
  HeightConfig out = eta;
  out.at(x) += k;
  return out;
}

HeightConfig special_boundary_addition(const Volume& v) {
  HeightConfig out = HeightConfig::zeros(v);
  for (std::int64_t i = 0; i < v.size(); ++i)
    out.heights[std::size_t(i)] = lacking_neighbors(v.site(i), v);
  return out;
}

RectangleIdentityReport rectangle_identity_check(const HeightConfig& eta,
                                                 const StabilizeOptions& opt) {
  RectangleIdentityReport rep;
  rep.result = stabilize(eta + special_boundary_addition(eta.volume), opt);
  rep.m_all_one =
      rep.result.ok() &&
      std::all_of(rep.result.m.counts.begin(), rep.result.m.counts.end(),
                  [](std::int64_t c) { return c == 1; });
  rep.unchanged = rep.result.ok() && rep.result.xi == eta;
  rep.holds = rep.m_all_one && rep.unchanged;
  return rep;
}

}  // namespace sandlab
