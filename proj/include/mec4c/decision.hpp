#ifndef MEC4C_DECISION_HPP_
#define MEC4C_DECISION_HPP_

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "mec4c/errors.hpp"
#include "mec4c/scenario.hpp"

namespace mec4c
{

enum class DecisionMode { relaxed, binary };

// Routing and caching decision for one task.
//
// `y` holds the execution location given that the task is offloaded:
// y[0] home station, y[1..n] X2 neighbors of the home station (in the
// scenario's neighbor order), y[n+1] the data center. `w` holds cache
// placement at the same stations (home, then neighbors); `w_dc` marks content
// that is left to the data center.
struct TaskDecision
{
  double x = 0.0;
  std::vector<double> y;
  std::vector<double> w;
  double w_dc = 0.0;

  std::size_t route_count() const {return y.size();}
  std::size_t dc_route() const {return y.size() - 1;}
  double y_local() const {return y.front();}
  double y_dc() const {return y.back();}
  double y_fwd(std::size_t j) const {return y.at(1 + j);}
};

struct DecisionVector
{
  DecisionMode mode = DecisionMode::relaxed;
  std::vector<TaskDecision> tasks;
};

inline constexpr std::size_t kDataCenter = std::numeric_limits<std::size_t>::max();

// Station index served by route `r` of task `k`, or kDataCenter.
inline std::size_t route_station(const Scenario & sc, std::size_t k, std::size_t r)
{
  const std::size_t home = sc.task_home[k];
  const auto & nbrs = sc.neighbors[home];
  if (r == 0) {return home;}
  if (r <= nbrs.size()) {return nbrs[r - 1];}
  if (r == nbrs.size() + 1) {return kDataCenter;}
  throw ParameterError("route index out of range");
}

inline std::size_t route_count(const Scenario & sc, std::size_t k)
{
  return sc.neighbors[sc.task_home[k]].size() + 2;
}

// All-zero decision shaped for the scenario.
inline DecisionVector make_decision(const Scenario & sc, DecisionMode mode = DecisionMode::relaxed)
{
  DecisionVector dv;
  dv.mode = mode;
  dv.tasks.resize(sc.tasks.size());
  for (std::size_t k = 0; k < sc.tasks.size(); ++k) {
    const std::size_t n = route_count(sc, k);
    dv.tasks[k].y.assign(n, 0.0);
    dv.tasks[k].w.assign(n - 1, 0.0);
  }
  return dv;
}

// Cache decision of task k at station `m` (zero where the task has no slot).
inline double w_at(const Scenario & sc, const DecisionVector & dv, std::size_t k, std::size_t m)
{
  const auto & td = dv.tasks.at(k);
  for (std::size_t r = 0; r + 1 < td.y.size(); ++r) {
    if (route_station(sc, k, r) == m) {return td.w[r];}
  }
  return 0.0;
}

inline void check_shape(const Scenario & sc, const DecisionVector & dv)
{
  if (dv.tasks.size() != sc.tasks.size()) {
    throw ParameterError("decision vector has wrong number of tasks");
  }
  for (std::size_t k = 0; k < dv.tasks.size(); ++k) {
    const std::size_t n = route_count(sc, k);
    if (dv.tasks[k].y.size() != n || dv.tasks[k].w.size() != n - 1) {
      throw ParameterError("decision vector has wrong shape for task " + std::to_string(k));
    }
  }
}

// Entries in [0,1]; binary mode additionally requires {0,1}.
inline bool entries_valid(const DecisionVector & dv)
{
  auto ok = [&](double v) {
      if (!(v >= 0.0 && v <= 1.0)) {return false;}
      return dv.mode == DecisionMode::relaxed || v == 0.0 || v == 1.0;
    };
  for (const auto & td : dv.tasks) {
    if (!ok(td.x) || !ok(td.w_dc)) {return false;}
    if (!std::all_of(td.y.begin(), td.y.end(), ok)) {return false;}
    if (!std::all_of(td.w.begin(), td.w.end(), ok)) {return false;}
  }
  return true;
}

}  // namespace mec4c

#endif  // MEC4C_DECISION_HPP_
