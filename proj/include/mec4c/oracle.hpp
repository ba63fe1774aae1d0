#ifndef MEC4C_ORACLE_HPP_
#define MEC4C_ORACLE_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "mec4c/costmodel.hpp"
#include "mec4c/errors.hpp"
#include "mec4c/rounding.hpp"

namespace mec4c
{

struct OracleLimits
{
  std::size_t max_tasks = 6;
  std::size_t max_stations = 3;
  std::size_t max_contents = 4;
  double max_enumeration = 1e7;
};

struct OracleResult
{
  bool feasible = false;
  DecisionVector best;
  double objective = 0.0;
  double enumerated = 0.0;   // size of the option space
};

// Exhaustive search over binary decisions that satisfy every hard
// constraint. Options per task are visited as: local, then each route without
// and with caching; the first minimum found wins.
inline OracleResult brute_force_solve(const Problem & pb, const OracleLimits & lim = {})
{
  const Scenario & sc = *pb.scenario;
  if (pb.size() > lim.max_tasks || sc.stations.size() > lim.max_stations ||
    sc.content_bits.size() > lim.max_contents)
  {
    throw SizeError(
      "instance too large for exhaustive search (" + std::to_string(pb.size()) + " tasks, " +
      std::to_string(sc.stations.size()) + " stations, " + std::to_string(sc.content_bits.size()) +
      " contents)");
  }
  std::vector<std::vector<TaskOption>> options(pb.size());
  OracleResult res;
  res.enumerated = 1.0;
  for (std::size_t k = 0; k < pb.size(); ++k) {
    options[k] = task_options(pb.terms[k]);
    res.enumerated *= static_cast<double>(std::max<std::size_t>(options[k].size(), 1));
  }
  if (res.enumerated > lim.max_enumeration) {throw SizeError("enumeration bound exceeded");}

  detail::LoadBook book(pb);
  std::vector<std::size_t> pick(pb.size(), 0), best_pick;
  double best = kInf;

  auto fits = [&](std::size_t k, const TaskOption & o) {
      if (!o.offload) {return true;}
      const TaskTerms & tt = pb.terms[k];
      const auto & home = sc.stations[tt.home];
      if (capacity_excess(book.spectrum[tt.home], 1.0) > 0.0) {return false;}
      if (capacity_excess(book.compute[tt.home], home.compute_hz) > 0.0) {return false;}
      if (o.cache) {
        const std::size_t m = tt.route_bs[o.route];
        if (capacity_excess(book.cache[m], sc.stations[m].cache_bits) > 0.0) {return false;}
      }
      return true;
    };

  auto dfs = [&](auto && self, std::size_t k, double acc) -> void {
      if (k == pb.size()) {
        if (acc < best) {best = acc; best_pick = pick;}
        return;
      }
      for (std::size_t i = 0; i < options[k].size(); ++i) {
        const TaskOption & o = options[k][i];
        book.add(k, o, 1.0);
        if (fits(k, o)) {
          pick[k] = i;
          self(self, k + 1, acc + option_value(pb.terms[k], pb.eta, o));
        }
        book.add(k, o, -1.0);
      }
    };
  dfs(dfs, 0, 0.0);

  res.best = make_decision(sc, DecisionMode::binary);
  if (best_pick.size() != pb.size()) {return res;}
  res.feasible = true;
  res.objective = best;
  for (std::size_t k = 0; k < pb.size(); ++k) {apply_option(options[k][best_pick[k]], res.best.tasks[k]);}
  return res;
}

}  // namespace mec4c

#endif  // MEC4C_ORACLE_HPP_
