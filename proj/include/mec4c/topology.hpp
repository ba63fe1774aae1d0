#ifndef MEC4C_TOPOLOGY_HPP_
#define MEC4C_TOPOLOGY_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "mec4c/errors.hpp"
#include "mec4c/random.hpp"
#include "mec4c/units.hpp"

namespace mec4c
{

struct Point2
{
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) {return {a.x + b.x, a.y + b.y};}
  friend Point2 operator-(Point2 a, Point2 b) {return {a.x - b.x, a.y - b.y};}
  friend Point2 operator*(double s, Point2 a) {return {s * a.x, s * a.y};}
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double squared_norm(Point2 p) {return p.x * p.x + p.y * p.y;}
inline double distance(Point2 a, Point2 b) {return std::sqrt(squared_norm(a - b));}

using StationId = std::int64_t;

struct BaseStation
{
  StationId id = 0;
  Point2 position;
  double bandwidth_hz = 0.0;                   // B_m
  double compute_hz = 0.0;                     // P_m, cycles/s
  double cache_bits = 0.0;                     // C_m
  std::map<StationId, double> x2_capacity_bps; // neighbor -> X2 capacity
  double dc_capacity_bps = 0.0;                // backhaul to the data center
};

inline void validate_station(const BaseStation & bs)
{
  const std::string who = "station " + std::to_string(bs.id);
  if (!(bs.bandwidth_hz > 0.0)) {throw ParameterError(who + ": bandwidth must be > 0");}
  if (!(bs.compute_hz > 0.0)) {throw ParameterError(who + ": compute capacity must be > 0");}
  if (!(bs.cache_bits >= 0.0)) {throw ParameterError(who + ": cache capacity must be >= 0");}
  for (const auto & [n, cap] : bs.x2_capacity_bps) {
    if (n == bs.id) {throw ParameterError(who + ": X2 link to itself");}
    if (!(cap >= 0.0)) {throw ParameterError(who + ": negative X2 capacity");}
  }
}

// Links must be present in both directions.
inline void validate_stations(std::span<const BaseStation> stations)
{
  std::unordered_map<StationId, const BaseStation *> by_id;
  for (const auto & bs : stations) {
    validate_station(bs);
    if (!by_id.emplace(bs.id, &bs).second) {
      throw ParameterError("duplicate station id " + std::to_string(bs.id));
    }
  }
  for (const auto & bs : stations) {
    for (const auto & [n, cap] : bs.x2_capacity_bps) {
      auto it = by_id.find(n);
      if (it == by_id.end()) {
        throw ParameterError("station " + std::to_string(bs.id) + ": X2 link to unknown station " +
                std::to_string(n));
      }
      if (!it->second->x2_capacity_bps.contains(bs.id)) {
        throw ParameterError("X2 link " + std::to_string(bs.id) + "->" + std::to_string(n) +
                " has no reverse link");
      }
    }
  }
}

struct CollaborationSpace
{
  std::vector<StationId> member_ids;  // sorted ascending
  Point2 centroid;
};

// ---------------------------------------------------------------------------
// Overlapping k-means for collaboration spaces
// ---------------------------------------------------------------------------

// Squared distance between a point and the mean of a centroid subset.
inline double assignment_cost(
  Point2 p, std::span<const Point2> centroids,
  std::span<const std::size_t> subset)
{
  Point2 sum{};
  for (std::size_t i : subset) {
    sum = sum + centroids[i];
  }
  return squared_norm(p - (1.0 / static_cast<double>(subset.size())) * sum);
}

// Centroid indices sorted by distance to p; ties by lower index.
inline std::vector<std::size_t> centroids_by_distance(Point2 p, std::span<const Point2> centroids)
{
  std::vector<std::size_t> order(centroids.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(
    order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return squared_norm(p - centroids[a]) < squared_norm(p - centroids[b]);
    });
  return order;
}

// Greedy OKM assignment: start from the nearest centroid and keep appending the
// next nearest while the distance to the centroid mean strictly decreases.
inline std::vector<std::size_t> greedy_multi_assign(Point2 p, std::span<const Point2> centroids)
{
  if (centroids.empty()) {
    throw ParameterError("multi_assign: no centroids");
  }
  const auto order = centroids_by_distance(p, centroids);
  std::vector<std::size_t> chosen{order.front()};
  Point2 sum = centroids[order.front()];
  double best = squared_norm(p - sum);
  for (std::size_t j = 1; j < order.size(); ++j) {
    const Point2 cand_sum = sum + centroids[order[j]];
    const double cost = squared_norm(p - (1.0 / static_cast<double>(chosen.size() + 1)) * cand_sum);
    if (!(cost < best)) {
      break;
    }
    chosen.push_back(order[j]);
    sum = cand_sum;
    best = cost;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

// Up to this many centroids the assignment is found by enumerating subsets.
inline constexpr std::size_t kExactAssignLimit = 12;

// Exhaustive subset search. Ties prefer fewer centroids, then the
// lexicographically smaller index set.
inline std::vector<std::size_t> exact_multi_assign(Point2 p, std::span<const Point2> centroids)
{
  const std::size_t r = centroids.size();
  if (r == 0) {
    throw ParameterError("multi_assign: no centroids");
  }
  if (r > 20) {
    throw SizeError("exact_multi_assign: too many centroids for enumeration");
  }
  std::uint32_t best_mask = 0;
  double best = std::numeric_limits<double>::infinity();
  int best_count = 0;
  auto lex_less = [](std::uint32_t a, std::uint32_t b) {
      // Lower index set first: compare by lowest differing bit.
      const std::uint32_t diff = a ^ b;
      const std::uint32_t low = diff & (~diff + 1);
      return (a & low) != 0;
    };
  for (std::uint32_t mask = 1; mask < (1u << r); ++mask) {
    Point2 sum{};
    int count = 0;
    for (std::size_t i = 0; i < r; ++i) {
      if (mask & (1u << i)) {
        sum = sum + centroids[i];
        ++count;
      }
    }
    const double cost = squared_norm(p - (1.0 / count) * sum);
    bool better = cost < best;
    if (!better && cost == best) {
      better = count < best_count || (count == best_count && lex_less(mask, best_mask));
    }
    if (better) {
      best = cost;
      best_mask = mask;
      best_count = count;
    }
  }
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < r; ++i) {
    if (best_mask & (1u << i)) {chosen.push_back(i);}
  }
  return chosen;
}

inline std::vector<std::size_t> multi_assign(Point2 p, std::span<const Point2> centroids)
{
  if (centroids.size() <= kExactAssignLimit) {
    return exact_multi_assign(p, centroids);
  }
  return greedy_multi_assign(p, centroids);
}

inline std::vector<std::size_t> multi_assign(const BaseStation & bs, std::span<const Point2> centroids)
{
  return multi_assign(bs.position, centroids);
}

// Sum over stations of the squared distance to the mean of the centroids of
// every space the station belongs to. Each station contributes once.
inline double okm_objective(
  std::span<const CollaborationSpace> spaces,
  std::span<const BaseStation> stations)
{
  std::unordered_map<StationId, std::pair<Point2, int>> acc;
  for (const auto & sp : spaces) {
    for (StationId id : sp.member_ids) {
      auto & [sum, n] = acc[id];
      sum = sum + sp.centroid;
      ++n;
    }
  }
  double total = 0.0;
  for (const auto & bs : stations) {
    auto it = acc.find(bs.id);
    if (it == acc.end()) {
      throw CoverageError("station " + std::to_string(bs.id) + " belongs to no collaboration space");
    }
    const auto & [sum, n] = it->second;
    total += squared_norm(bs.position - (1.0 / n) * sum);
  }
  return total;
}

struct OkmResult
{
  std::vector<CollaborationSpace> spaces;
  std::vector<double> objective_trace;  // entry 0 is the initial assignment
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail
{

inline double okm_cost(
  std::span<const BaseStation> stations,
  std::span<const Point2> centroids,
  const std::vector<std::vector<std::size_t>> & assign)
{
  double total = 0.0;
  for (std::size_t m = 0; m < stations.size(); ++m) {
    total += assignment_cost(stations[m].position, centroids, assign[m]);
  }
  return total;
}

// Exact minimizer of the objective in one centroid with all others fixed.
// Reduces to the arithmetic mean of members that belong to this space only.
inline void update_centroids(
  std::span<const BaseStation> stations,
  std::vector<Point2> & centroids,
  const std::vector<std::vector<std::size_t>> & assign)
{
  const std::size_t r = centroids.size();
  for (std::size_t c = 0; c < r; ++c) {
    Point2 num{};
    double den = 0.0;
    for (std::size_t m = 0; m < stations.size(); ++m) {
      const auto & a = assign[m];
      if (!std::binary_search(a.begin(), a.end(), c)) {
        continue;
      }
      const double n = static_cast<double>(a.size());
      Point2 others{};
      for (std::size_t j : a) {
        if (j != c) {others = others + centroids[j];}
      }
      const double wt = 1.0 / (n * n);
      num = num + wt * (n * stations[m].position - others);
      den += wt;
    }
    if (den > 0.0) {
      centroids[c] = (1.0 / den) * num;
    }
  }
}

inline std::vector<CollaborationSpace> make_spaces(
  std::span<const BaseStation> stations,
  std::span<const Point2> centroids,
  const std::vector<std::vector<std::size_t>> & assign)
{
  std::vector<CollaborationSpace> spaces(centroids.size());
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    spaces[c].centroid = centroids[c];
  }
  for (std::size_t m = 0; m < stations.size(); ++m) {
    for (std::size_t c : assign[m]) {
      spaces[c].member_ids.push_back(stations[m].id);
    }
  }
  std::erase_if(spaces, [](const CollaborationSpace & s) {return s.member_ids.empty();});
  for (auto & s : spaces) {
    std::sort(s.member_ids.begin(), s.member_ids.end());
  }
  return spaces;
}

}  // namespace detail

inline OkmResult run_okm_cs(
  std::span<const BaseStation> stations, std::size_t r,
  std::size_t t_max, double epsilon, std::uint64_t seed)
{
  if (stations.empty()) {throw ParameterError("run_okm_cs: no stations");}
  if (r < 1 || r > stations.size()) {
    throw ParameterError("run_okm_cs: r = " + std::to_string(r) + " outside [1, " +
            std::to_string(stations.size()) + "]");
  }
  if (!(epsilon > 0.0)) {throw ParameterError("run_okm_cs: epsilon must be > 0");}
  if (t_max < 1) {throw ParameterError("run_okm_cs: t_max must be >= 1");}

  // Seeded sampling without replacement of initial centroids.
  Rng rng(seed);
  std::vector<std::size_t> idx(stations.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < r; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<Point2> centroids(r);
  for (std::size_t i = 0; i < r; ++i) {
    centroids[i] = stations[idx[i]].position;
  }

  std::vector<std::vector<std::size_t>> assign(stations.size());
  for (std::size_t m = 0; m < stations.size(); ++m) {
    assign[m] = multi_assign(stations[m].position, centroids);
  }

  OkmResult result;
  double prev = detail::okm_cost(stations, centroids, assign);
  result.objective_trace.push_back(prev);
  for (std::size_t t = 0; t < t_max; ++t) {
    detail::update_centroids(stations, centroids, assign);
    for (std::size_t m = 0; m < stations.size(); ++m) {
      auto cand = multi_assign(stations[m].position, centroids);
      // The greedy rule is not guaranteed to beat the previous assignment.
      if (assignment_cost(stations[m].position, centroids, cand) <=
        assignment_cost(stations[m].position, centroids, assign[m]))
      {
        assign[m] = std::move(cand);
      }
    }
    const double cur = detail::okm_cost(stations, centroids, assign);
    result.objective_trace.push_back(cur);
    result.iterations = t + 1;
    if (prev - cur < epsilon) {
      result.converged = true;
      break;
    }
    prev = cur;
  }
  result.spaces = detail::make_spaces(stations, centroids, assign);
  return result;
}

// Ids of every station sharing at least one space with `id`, excluding itself.
inline std::vector<StationId> collaborators(std::span<const CollaborationSpace> spaces, StationId id)
{
  std::set<StationId> out;
  for (const auto & sp : spaces) {
    if (std::binary_search(sp.member_ids.begin(), sp.member_ids.end(), id)) {
      out.insert(sp.member_ids.begin(), sp.member_ids.end());
    }
  }
  out.erase(id);
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// Station sources
// ---------------------------------------------------------------------------

// Capacity ranges for synthetic topologies; also the fallback for imports.
struct StationRanges
{
  Range bandwidth_hz{25e6, 32e6};
  Range compute_hz{2.0e9, 2.5e9};
  Range cache_bits{100.0 * 8e12, 500.0 * 8e12};
  Range dc_capacity_bps{50e6, 120e6};
  Range x2_capacity_bps{20e6, 25e6};

  void validate() const
  {
    bandwidth_hz.validate("station bandwidth");
    compute_hz.validate("station compute");
    cache_bits.validate("station cache");
    dc_capacity_bps.validate("station DC capacity");
    x2_capacity_bps.validate("station X2 capacity");
  }
};

// Values filled in when an imported CSV omits capacity columns.
struct StationDefaults
{
  double bandwidth_hz = 25e6;
  double compute_hz = 2.0e9;
  double cache_bits = 100.0 * 8e12;
  double dc_capacity_bps = 50e6;
};

inline std::vector<BaseStation> synthetic_stations(
  std::size_t n, double area_m, const StationRanges & ranges, std::uint64_t seed)
{
  ranges.validate();
  Rng rng(seed);
  std::uniform_real_distribution<double> coord(0.0, area_m);
  std::vector<BaseStation> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto & bs = out[i];
    bs.id = static_cast<StationId>(i);
    bs.position = {coord(rng), coord(rng)};
    bs.bandwidth_hz = ranges.bandwidth_hz.draw(rng);
    bs.compute_hz = ranges.compute_hz.draw(rng);
    bs.cache_bits = ranges.cache_bits.draw(rng);
    bs.dc_capacity_bps = ranges.dc_capacity_bps.draw(rng);
  }
  return out;
}

// Creates symmetric X2 links between every pair of stations that share a space.
inline void attach_x2_links(
  std::vector<BaseStation> & stations, std::span<const CollaborationSpace> spaces,
  Range capacity_bps, std::uint64_t seed)
{
  capacity_bps.validate("X2 capacity");
  std::unordered_map<StationId, std::size_t> index;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    stations[i].x2_capacity_bps.clear();
    index[stations[i].id] = i;
  }
  std::set<std::pair<StationId, StationId>> pairs;
  for (const auto & sp : spaces) {
    for (std::size_t a = 0; a < sp.member_ids.size(); ++a) {
      for (std::size_t b = a + 1; b < sp.member_ids.size(); ++b) {
        pairs.emplace(sp.member_ids[a], sp.member_ids[b]);
      }
    }
  }
  Rng rng(seed);
  for (const auto & [a, b] : pairs) {
    const double cap = capacity_bps.draw(rng);
    stations.at(index.at(a)).x2_capacity_bps[b] = cap;
    stations.at(index.at(b)).x2_capacity_bps[a] = cap;
  }
}

namespace detail
{

inline std::vector<std::string> split_csv(const std::string & line)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    out.emplace_back(trim(field));
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

inline bool parse_number(const std::string & s, double & out)
{
  if (s.empty()) {return false;}
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (const std::exception &) {
    return false;
  }
  return pos == s.size() && std::isfinite(out);
}

}  // namespace detail

// Reads `id,x,y[,B_hz,P_hz,C_bytes]` rows. A header line naming the columns is
// optional; empty or missing capacity fields take the defaults.
inline std::vector<BaseStation> import_stations(std::istream & in, const StationDefaults & defaults = {})
{
  std::vector<std::string> columns{"id", "x", "y", "B_hz", "P_hz", "C_bytes"};
  std::vector<BaseStation> out;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {line.pop_back();}
    if (detail::trim(line).empty() || line.front() == '#') {continue;}
    auto fields = detail::split_csv(line);
    double probe = 0.0;
    if (first && !detail::parse_number(fields.front(), probe)) {
      columns = fields;
      first = false;
      for (const char * need : {"id", "x", "y"}) {
        if (std::find(columns.begin(), columns.end(), need) == columns.end()) {
          throw ParseError(lineno, std::string("header lacks column '") + need + "'");
        }
      }
      continue;
    }
    first = false;
    if (fields.size() < 3) {
      throw ParseError(lineno, "expected at least id,x,y");
    }
    if (fields.size() > columns.size()) {
      throw ParseError(lineno, "too many fields");
    }
    BaseStation bs;
    bs.bandwidth_hz = defaults.bandwidth_hz;
    bs.compute_hz = defaults.compute_hz;
    bs.cache_bits = defaults.cache_bits;
    bs.dc_capacity_bps = defaults.dc_capacity_bps;
    bool has_id = false, has_x = false, has_y = false;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const std::string & col = columns[i];
      double v = 0.0;
      const bool optional = col != "id" && col != "x" && col != "y";
      if (fields[i].empty() && optional) {continue;}
      if (!detail::parse_number(fields[i], v)) {
        throw ParseError(lineno, "non-numeric value '" + fields[i] + "' in column '" + col + "'");
      }
      if (col == "id") {
        if (v != std::floor(v)) {throw ParseError(lineno, "id must be an integer");}
        bs.id = static_cast<StationId>(v);
        has_id = true;
      } else if (col == "x") {
        bs.position.x = v;
        has_x = true;
      } else if (col == "y") {
        bs.position.y = v;
        has_y = true;
      } else if (col == "B_hz") {
        bs.bandwidth_hz = v;
      } else if (col == "P_hz") {
        bs.compute_hz = v;
      } else if (col == "C_bytes") {
        bs.cache_bits = v * kBitsPerByte;
      } else if (col == "Omega_bps") {
        bs.dc_capacity_bps = v;
      }
    }
    if (!has_id || !has_x || !has_y) {
      throw ParseError(lineno, "missing id, x or y");
    }
    try {
      validate_station(bs);
    } catch (const ParameterError & e) {
      throw ParseError(lineno, e.what());
    }
    out.push_back(std::move(bs));
  }
  return out;
}

inline std::vector<BaseStation> import_stations(const std::string & path, const StationDefaults & defaults = {})
{
  std::ifstream in(path);
  if (!in) {
    throw ParameterError("cannot open station file '" + path + "'");
  }
  return import_stations(in, defaults);
}

inline nlohmann::json spaces_to_json(std::span<const CollaborationSpace> spaces)
{
  nlohmann::json arr = nlohmann::json::array();
  for (const auto & sp : spaces) {
    arr.push_back({{"members", sp.member_ids}, {"centroid", {sp.centroid.x, sp.centroid.y}}});
  }
  return arr;
}

}  // namespace mec4c

#endif  // MEC4C_TOPOLOGY_HPP_
