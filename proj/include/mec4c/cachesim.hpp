#ifndef MEC4C_CACHESIM_HPP_
#define MEC4C_CACHESIM_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mec4c/costmodel.hpp"
#include "mec4c/decision.hpp"
#include "mec4c/errors.hpp"
#include "mec4c/random.hpp"
#include "mec4c/scenario.hpp"

namespace mec4c
{

// One station's cache under LFU replacement. Victims are chosen by lowest hit
// count, then earliest insertion epoch, then insertion order.
class LfuCache
{
public:
  struct Entry
  {
    double size_bits = 0.0;
    std::uint64_t hits = 0;
    std::int64_t epoch = 0;
    std::uint64_t seq = 0;
  };

  LfuCache() = default;
  explicit LfuCache(double capacity_bits)
  : capacity_(capacity_bits)
  {
    if (!(capacity_bits >= 0.0)) {throw ParameterError("cache capacity must be >= 0");}
  }

  double capacity() const {return capacity_;}
  double occupancy() const {return occupancy_;}
  double free_bits() const {return capacity_ - occupancy_;}
  std::size_t size() const {return entries_.size();}
  bool contains(ContentId c) const {return entries_.count(c) != 0;}
  const std::map<ContentId, Entry> & entries() const {return entries_;}

  // Inserts `c`, evicting as needed; returns the evicted ids in order.
  // Re-inserting a present item changes nothing.
  std::vector<ContentId> insert(ContentId c, double size_bits, std::int64_t epoch)
  {
    if (!(size_bits >= 0.0)) {throw ParameterError("content size must be >= 0");}
    if (size_bits > capacity_) {
      throw CacheItemTooLarge("content " + std::to_string(c) + " does not fit the cache");
    }
    std::vector<ContentId> evicted;
    if (contains(c)) {return evicted;}
    while (occupancy_ + size_bits > capacity_) {
      auto victim = std::min_element(
        entries_.begin(), entries_.end(), [](const auto & a, const auto & b) {
          const Entry & x = a.second;
          const Entry & y = b.second;
          if (x.hits != y.hits) {return x.hits < y.hits;}
          if (x.epoch != y.epoch) {return x.epoch < y.epoch;}
          return x.seq < y.seq;
        });
      occupancy_ -= victim->second.size_bits;
      evicted.push_back(victim->first);
      entries_.erase(victim);
    }
    entries_[c] = Entry{size_bits, 0, epoch, next_seq_++};
    occupancy_ += size_bits;
    return evicted;
  }

  // Records a hit; false when the item is absent.
  bool touch(ContentId c)
  {
    auto it = entries_.find(c);
    if (it == entries_.end()) {return false;}
    ++it->second.hits;
    return true;
  }

private:
  double capacity_ = 0.0;
  double occupancy_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::map<ContentId, Entry> entries_;
};

struct CacheState
{
  std::vector<LfuCache> caches;  // by station index
};

inline CacheState make_cache_state(const Scenario & sc)
{
  CacheState st;
  for (const auto & bs : sc.stations) {st.caches.emplace_back(bs.cache_bits);}
  return st;
}

enum class Outcome { hit_local, hit_neighbor, miss };

struct ServeResult
{
  Outcome outcome = Outcome::miss;
  std::size_t server = 0;  // station index for hits
};

// Collaborating stations of m ordered by X2 transfer delay (fastest link
// first, ties by id).
inline std::vector<std::size_t> neighbor_order(const Scenario & sc, std::size_t m)
{
  std::vector<std::size_t> out = sc.neighbors.at(m);
  std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
      const double ca = sc.x2_capacity(m, a);
      const double cb = sc.x2_capacity(m, b);
      if (ca != cb) {return ca > cb;}
      return sc.stations[a].id < sc.stations[b].id;
    });
  return out;
}

inline ServeResult serve_request(
  CacheState & state, std::size_t bs, ContentId c, const std::vector<std::size_t> & collaboration)
{
  if (state.caches.at(bs).touch(c)) {return {Outcome::hit_local, bs};}
  for (std::size_t n : collaboration) {
    if (state.caches.at(n).touch(c)) {return {Outcome::hit_neighbor, n};}
  }
  return {Outcome::miss, 0};
}

struct HitRecord
{
  std::int64_t epoch = 0;
  std::size_t bs = 0;
  ContentId content = 0;
  ServeResult result;
};

struct HitCounters
{
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
};

inline double hit_ratio(const HitCounters & c)
{
  const std::uint64_t n = c.hits + c.misses;
  return n == 0 ? 0.0 : static_cast<double>(c.hits) / static_cast<double>(n);
}

inline double hit_ratio(std::uint64_t hits, std::uint64_t misses) {return hit_ratio(HitCounters{hits, misses});}

// Backhaul bits avoided: one content transfer per hit.
inline double realized_bandwidth_saving(const std::vector<HitRecord> & trace, const std::vector<double> & sizes)
{
  double bits = 0.0;
  for (const auto & r : trace) {
    if (r.result.outcome != Outcome::miss) {bits += sizes.at(r.content);}
  }
  return bits;
}

// ---------------------------------------------------------------------------
// Resource allocation table

struct RatSnapshot
{
  StationId station = 0;
  double free_compute_hz = 0.0;
  double free_cache_bits = 0.0;
  double free_spectrum = 0.0;
  std::int64_t epoch = 0;

  bool operator==(const RatSnapshot &) const = default;
};

// Ground-truth free resources per station. Compute and spectrum come from the
// binary decision, cache from the live occupancy.
inline std::vector<RatSnapshot> local_rat(
  const Scenario & sc, const CacheState & state, const StationLoads & loads, std::int64_t epoch)
{
  std::vector<RatSnapshot> out;
  for (std::size_t m = 0; m < sc.stations.size(); ++m) {
    const auto & bs = sc.stations[m];
    out.push_back(RatSnapshot{
        bs.id,
        std::clamp(bs.compute_hz - loads.compute[m], 0.0, bs.compute_hz),
        std::clamp(state.caches[m].free_bits(), 0.0, bs.cache_bits),
        std::clamp(1.0 - loads.spectrum[m], 0.0, 1.0),
        epoch});
  }
  return out;
}

// Every station's view after the exchange: a copy of the snapshot of itself
// and of each station it shares a space with.
inline std::vector<std::map<StationId, RatSnapshot>> rat_exchange(
  const Scenario & sc, const CacheState & state, const StationLoads & loads, std::int64_t epoch)
{
  const auto truth = local_rat(sc, state, loads, epoch);
  std::vector<std::map<StationId, RatSnapshot>> views(sc.stations.size());
  for (const auto & sp : sc.spaces) {
    for (StationId a : sp.member_ids) {
      const std::size_t ia = sc.station_index(a);
      for (StationId b : sp.member_ids) {views[ia][b] = truth[sc.station_index(b)];}
    }
  }
  for (std::size_t m = 0; m < sc.stations.size(); ++m) {views[m][sc.stations[m].id] = truth[m];}
  return views;
}

// ---------------------------------------------------------------------------
// Epoch simulation

struct SimParams
{
  int epochs = 10;
  std::uint64_t seed = 1;
  bool keep_trace = true;
};

struct SimResult
{
  HitCounters total;
  std::vector<HitCounters> per_epoch;
  std::vector<double> saving_per_epoch;
  double saving_bits = 0.0;
  std::vector<HitRecord> trace;
  std::vector<std::map<StationId, RatSnapshot>> rat;   // after the last epoch
  std::uint64_t too_large = 0;                         // items that could not be cached
};

// Applies cache placements as prefetch at the start of every epoch, then
// replays a freshly sampled request stream; a miss fills the home cache.
inline SimResult simulate_caching(const Scenario & sc, const DecisionVector & binary, const AllocationView & av, const SimParams & p)
{
  if (p.epochs < 0) {throw ParameterError("epochs must be >= 0");}
  check_shape(sc, binary);
  CacheState state = make_cache_state(sc);
  const StationLoads loads = station_loads(sc, binary, av);
  std::vector<std::vector<std::size_t>> order(sc.stations.size());
  for (std::size_t m = 0; m < sc.stations.size(); ++m) {order[m] = neighbor_order(sc, m);}

  // Prefetch list sorted by descending home demand.
  struct Placement { std::size_t bs; ContentId c; double rate; std::size_t task; };
  std::vector<Placement> prefetch;
  for (std::size_t k = 0; k < sc.tasks.size(); ++k) {
    const auto & td = binary.tasks[k];
    if (td.x != 1.0) {continue;}
    for (std::size_t r = 0; r < td.w.size(); ++r) {
      if (td.w[r] == 1.0 && td.y[r] == 1.0) {
        const ContentId c = sc.tasks[k].content_id;
        prefetch.push_back({route_station(sc, k, r), c, sc.demand.rate(sc.task_home[k], c), k});
      }
    }
  }
  std::stable_sort(prefetch.begin(), prefetch.end(), [](const Placement & a, const Placement & b) {
      return a.rate > b.rate;
    });

  const auto pop = zipf_popularity(sc.demand.zipf_a, sc.content_bits.size());
  const auto total = static_cast<std::uint64_t>(std::llround(sc.demand.total()));

  SimResult res;
  auto try_insert = [&](std::size_t m, ContentId c, std::int64_t epoch) {
      if (sc.content_bits[c] > state.caches[m].capacity()) {
        ++res.too_large;
        return;
      }
      state.caches[m].insert(c, sc.content_bits[c], epoch);
    };

  for (int e = 0; e < p.epochs; ++e) {
    for (const auto & pl : prefetch) {try_insert(pl.bs, pl.c, e);}
    const DemandMatrix dm = generate_demands(
      pop, total, sc.stations.size(), mix_seed(p.seed, static_cast<std::uint64_t>(e) + 1), sc.demand.zipf_a);
    std::vector<std::pair<std::size_t, ContentId>> stream;
    stream.reserve(total);
    for (std::size_t m = 0; m < dm.n_stations; ++m) {
      for (ContentId c = 0; c < dm.n_contents; ++c) {
        const auto n = static_cast<std::uint64_t>(dm.rate(m, c));
        for (std::uint64_t i = 0; i < n; ++i) {stream.emplace_back(m, c);}
      }
    }
    Rng rng(mix_seed(p.seed, 0x5eedull + static_cast<std::uint64_t>(e)));
    std::shuffle(stream.begin(), stream.end(), rng);

    HitCounters ec;
    double saved = 0.0;
    for (const auto & [m, c] : stream) {
      const ServeResult sr = serve_request(state, m, c, order[m]);
      if (sr.outcome == Outcome::miss) {
        ++ec.misses;
        try_insert(m, c, e);
      } else {
        ++ec.hits;
        saved += sc.content_bits[c];
      }
      if (p.keep_trace) {res.trace.push_back(HitRecord{e, m, c, sr});}
    }
    res.per_epoch.push_back(ec);
    res.saving_per_epoch.push_back(saved);
    res.total.hits += ec.hits;
    res.total.misses += ec.misses;
    res.saving_bits += saved;
    res.rat = rat_exchange(sc, state, loads, e);
  }
  return res;
}

inline std::string outcome_label(const Scenario & sc, const ServeResult & r)
{
  switch (r.outcome) {
    case Outcome::hit_local: return "hit_local";
    case Outcome::hit_neighbor: return "hit_neighbor(" + std::to_string(sc.stations[r.server].id) + ")";
    case Outcome::miss: return "miss";
  }
  return "?";
}

inline std::string hits_csv(const Scenario & sc, const std::vector<HitRecord> & trace)
{
  std::ostringstream os;
  os << "epoch,bs,content,outcome\n";
  for (const auto & r : trace) {
    os << r.epoch << ',' << sc.stations[r.bs].id << ',' << r.content << ',' << outcome_label(sc, r.result) << '\n';
  }
  return os.str();
}

}  // namespace mec4c

#endif  // MEC4C_CACHESIM_HPP_
