// Walks one small scenario through every stage by hand.
// Usage: quickstart [config.json]

#include <iostream>

#include "mec4c/mec4c.hpp"

int main(int argc, char ** argv)
{
  using namespace mec4c;
  const std::string path = argc > 1 ? argv[1] : MEC4C_SOURCE_DIR "/configs/tiny.json";
  try {
    const ScenarioConfig cfg = load_config(path);

    // Stations, collaboration spaces, users and demand.
    const BuiltScenario built = build_scenario(cfg, cfg.seed);
    const Scenario & sc = built.scenario;
    std::cout << sc.stations.size() << " stations in " << sc.spaces.size() << " spaces, "
              << sc.tasks.size() << " tasks, eta " << sc.eta << "\n";
    for (const auto & sp : sc.spaces) {
      std::cout << "  space:";
      for (StationId id : sp.member_ids) {std::cout << ' ' << id;}
      std::cout << "\n";
    }

    // Relaxed solve, rounding, re-solve.
    const Problem pb = build_problem(sc);
    const SolveReport rep = solve(pb, cfg.solver, cfg.theta, cfg.xi);
    std::cout << "BSUM " << rep.trace.iterations << " iterations, relaxed " << rep.relaxed_objective
              << ", final " << rep.final_objective << "\n";
    for (std::size_t k = 0; k < pb.size(); ++k) {
      const auto o = option_of(rep.decisions.tasks[k]);
      std::cout << "  task " << k << ": ";
      if (!o.offload) {
        std::cout << "local\n";
        continue;
      }
      const std::size_t st = route_station(sc, k, o.route);
      std::cout << (st == kDataCenter ? std::string("data center") : "station " + std::to_string(sc.stations[st].id))
                << (o.cache ? ", cached" : "") << "\n";
    }

    // Replay requests against LFU caches seeded by the placement.
    SimParams sp;
    sp.epochs = cfg.epochs;
    sp.seed = cfg.seed;
    const SimResult sim = simulate_caching(sc, rep.decisions, pb.alloc, sp);
    std::cout << "hit ratio " << hit_ratio(sim.total) << " over " << sim.total.hits + sim.total.misses
              << " requests, saved " << sim.saving_bits / kBitsPerByte / 1e3 << " KB\n";
  } catch (const Error & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
