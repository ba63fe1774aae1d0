#ifndef MEC4C_SOLVER_HPP_
#define MEC4C_SOLVER_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mec4c/costmodel.hpp"
#include "mec4c/decision.hpp"
#include "mec4c/errors.hpp"
#include "mec4c/random.hpp"

namespace mec4c
{

enum class Block { x, y, w };
enum class Rule { cyclic, gauss_southwell, randomized };

inline const char * to_string(Block b)
{
  switch (b) {
    case Block::x: return "x";
    case Block::y: return "y";
    case Block::w: return "w";
  }
  return "?";
}

inline const char * to_string(Rule r)
{
  switch (r) {
    case Rule::cyclic: return "cyclic";
    case Rule::gauss_southwell: return "gs";
    case Rule::randomized: return "random";
  }
  return "?";
}

inline Rule parse_rule(std::string_view s)
{
  if (s == "cyclic") {return Rule::cyclic;}
  if (s == "gs" || s == "gauss_southwell" || s == "gauss-southwell") {return Rule::gauss_southwell;}
  if (s == "random" || s == "randomized") {return Rule::randomized;}
  throw ParameterError("unknown block rule '" + std::string(s) + "'");
}

struct SolverParams
{
  double rho = 1.0;
  double epsilon = 1e-4;
  int max_iters = 500;
  Rule rule = Rule::cyclic;
  std::uint64_t seed = 1;
  int subproblem_iters = 50;
  double subproblem_tol = 1e-12;

  void validate() const
  {
    if (!(rho >= 0.2 && rho <= 100.0)) {throw ParameterError("rho must lie in [0.2, 100]");}
    if (!(epsilon > 0.0)) {throw ParameterError("epsilon must be > 0");}
    if (max_iters < 1) {throw ParameterError("max_iters must be >= 1");}
    if (subproblem_iters < 1) {throw ParameterError("subproblem_iters must be >= 1");}
    if (!(subproblem_tol > 0.0)) {throw ParameterError("subproblem_tol must be > 0");}
  }
};

struct SolveTrace
{
  std::vector<double> objective_per_iter;   // B at each iterate, index 0 = start
  std::vector<double> proximal_per_iter;    // B_j at each iterate
  std::vector<Block> blocks;                // block updated to reach iterate t (t >= 1)
  int iterations = 0;
  bool converged = false;
  Rule rule_used = Rule::cyclic;
};

// ---------------------------------------------------------------------------
// Projections

// Euclidean projection of v onto the probability simplex.
inline std::vector<double> project_simplex(const std::vector<double> & v)
{
  if (v.empty()) {return {};}
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, tau = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {tau = t;}
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {out[i] = std::max(0.0, v[i] - tau);}
  return out;
}

inline void sync_w_dc(TaskDecision & td)
{
  const double wmax = td.w.empty() ? 0.0 : *std::max_element(td.w.begin(), td.w.end());
  td.w_dc = 1.0 - wmax;
}

// Projects one block of `dv` onto its feasible set.
inline void project_block(const Problem & pb, Block b, DecisionVector & dv)
{
  for (std::size_t k = 0; k < pb.size(); ++k) {
    const TaskTerms & tt = pb.terms[k];
    TaskDecision & td = dv.tasks[k];
    switch (b) {
      case Block::x:
        td.x = std::clamp(td.x, tt.x_lo, tt.x_hi);
        break;
      case Block::y: {
        std::vector<double> free;
        for (std::size_t r = 0; r < tt.routes(); ++r) {
          if (tt.route_allowed[r]) {free.push_back(td.y[r]);}
        }
        const auto proj = project_simplex(free);
        std::size_t i = 0;
        for (std::size_t r = 0; r < tt.routes(); ++r) {
          td.y[r] = tt.route_allowed[r] ? proj[i++] : 0.0;
        }
        break;
      }
      case Block::w:
        for (std::size_t r = 0; r < td.w.size(); ++r) {
          td.w[r] = tt.route_allowed[r] ? std::clamp(td.w[r], 0.0, 1.0) : 0.0;
        }
        sync_w_dc(td);
        break;
    }
  }
}

// ---------------------------------------------------------------------------
// Block arithmetic

inline double block_sq_distance(Block b, const DecisionVector & p, const DecisionVector & q)
{
  double s = 0.0;
  for (std::size_t k = 0; k < p.tasks.size(); ++k) {
    const auto & a = p.tasks[k];
    const auto & c = q.tasks[k];
    switch (b) {
      case Block::x: s += (a.x - c.x) * (a.x - c.x); break;
      case Block::y:
        for (std::size_t r = 0; r < a.y.size(); ++r) {s += (a.y[r] - c.y[r]) * (a.y[r] - c.y[r]);}
        break;
      case Block::w:
        for (std::size_t r = 0; r < a.w.size(); ++r) {s += (a.w[r] - c.w[r]) * (a.w[r] - c.w[r]);}
        break;
    }
  }
  return s;
}

inline double sq_distance(const DecisionVector & p, const DecisionVector & q)
{
  return block_sq_distance(Block::x, p, q) + block_sq_distance(Block::y, p, q) +
         block_sq_distance(Block::w, p, q);
}

// p <- p + step * g on one block.
inline void block_axpy(Block b, DecisionVector & p, double step, const DecisionVector & g)
{
  for (std::size_t k = 0; k < p.tasks.size(); ++k) {
    auto & a = p.tasks[k];
    const auto & d = g.tasks[k];
    switch (b) {
      case Block::x: a.x += step * d.x; break;
      case Block::y: for (std::size_t r = 0; r < a.y.size(); ++r) {a.y[r] += step * d.y[r];} break;
      case Block::w: for (std::size_t r = 0; r < a.w.size(); ++r) {a.w[r] += step * d.w[r];} break;
    }
  }
}

inline double block_sq_norm(Block b, const DecisionVector & g)
{
  DecisionVector zero = g;
  for (auto & td : zero.tasks) {
    td.x = 0.0;
    std::fill(td.y.begin(), td.y.end(), 0.0);
    std::fill(td.w.begin(), td.w.end(), 0.0);
  }
  return block_sq_distance(b, g, zero);
}

// ---------------------------------------------------------------------------
// BSUM steps

inline double proximal_value(
  const DecisionVector & candidate, const DecisionVector & anchor, double rho, const Problem & pb)
{
  return evaluate(pb, candidate) + 0.5 * rho * sq_distance(candidate, anchor);
}

// Minimizes the proximal upper bound over one block by projected gradient
// with step 1/rho (the objective is affine in each block).
inline DecisionVector solve_block(Block b, const DecisionVector & iterate, const SolverParams & params, const Problem & pb)
{
  const double before = proximal_value(iterate, iterate, params.rho, pb);
  DecisionVector z = iterate;
  for (int i = 0; i < params.subproblem_iters; ++i) {
    DecisionVector g = gradient(pb, z);
    // Gradient of the proximal term: rho * (z - anchor).
    for (std::size_t k = 0; k < z.tasks.size(); ++k) {
      g.tasks[k].x += params.rho * (z.tasks[k].x - iterate.tasks[k].x);
      for (std::size_t r = 0; r < z.tasks[k].y.size(); ++r) {
        g.tasks[k].y[r] += params.rho * (z.tasks[k].y[r] - iterate.tasks[k].y[r]);
      }
      for (std::size_t r = 0; r < z.tasks[k].w.size(); ++r) {
        g.tasks[k].w[r] += params.rho * (z.tasks[k].w[r] - iterate.tasks[k].w[r]);
      }
    }
    DecisionVector next = z;
    block_axpy(b, next, -1.0 / params.rho, g);
    project_block(pb, b, next);
    const double moved = block_sq_distance(b, next, z);
    z = std::move(next);
    if (moved <= params.subproblem_tol * params.subproblem_tol) {break;}
  }
  const double after = proximal_value(z, iterate, params.rho, pb);
  const double slack = 1e-9 * std::max(1.0, std::abs(before));
  if (!(after <= before + slack)) {
    std::ostringstream os;
    os << "block " << to_string(b) << " subproblem increased the proximal value from "
       << before << " to " << after;
    throw SolverError(os.str());
  }
  return z;
}

// Norm of the projected gradient step on one block (how far a unit proximal
// step would move it).
inline double block_progress(Block b, const DecisionVector & iterate, const DecisionVector & g, const Problem & pb, double rho)
{
  DecisionVector next = iterate;
  block_axpy(b, next, -1.0 / rho, g);
  project_block(pb, b, next);
  return rho * std::sqrt(block_sq_distance(b, next, iterate));
}

inline Block select_block(Rule rule, const DecisionVector & iterate, int t, Rng & rng, const Problem & pb, double rho = 1.0)
{
  static constexpr Block order[3] = {Block::x, Block::y, Block::w};
  switch (rule) {
    case Rule::cyclic:
      return order[t % 3];
    case Rule::randomized:
      return order[std::uniform_int_distribution<int>(0, 2)(rng)];
    case Rule::gauss_southwell: {
      const DecisionVector g = gradient(pb, iterate);
      Block best = Block::x;
      double best_v = -1.0;
      for (Block b : order) {
        const double v = block_progress(b, iterate, g, pb, rho);
        if (v > best_v) {best_v = v; best = b;}
      }
      return best;
    }
  }
  return Block::x;
}

// ---------------------------------------------------------------------------
// Initial point

// Greedy feasible start: tasks that can stay local do; the rest take the
// cheapest allowed route with room, caching where the route's station has
// space. Tasks forced off the device with few allowed routes go first so
// they keep the home server; the rest by descending reward density.
inline DecisionVector initial_point(const Problem & pb)
{
  const Scenario & sc = *pb.scenario;
  DecisionVector dv = make_decision(sc, DecisionMode::relaxed);
  std::vector<double> cache_left(sc.stations.size()), compute_used(sc.stations.size(), 0.0);
  for (std::size_t m = 0; m < sc.stations.size(); ++m) {cache_left[m] = sc.stations[m].cache_bits;}

  std::vector<std::size_t> order(pb.size());
  std::iota(order.begin(), order.end(), 0);
  auto choices = [&](const TaskTerms & tt) {
      if (tt.alpha == 1 && tt.x_lo == 0.0) {return std::numeric_limits<std::size_t>::max();}
      return static_cast<std::size_t>(std::count(tt.route_allowed.begin(), tt.route_allowed.end(), true));
    };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto & ta = pb.terms[a];
      const auto & tb = pb.terms[b];
      const std::size_t ca = choices(ta), cb = choices(tb);
      if (ca != cb) {return ca < cb;}
      return ta.reward / ta.size_bits > tb.reward / tb.size_bits;
    });

  for (std::size_t k : order) {
    const TaskTerms & tt = pb.terms[k];
    TaskDecision & td = dv.tasks[k];
    if (tt.alpha == 0 && tt.x_hi == 0.0 && !tt.cache_only) {
      throw InfeasibleError(k, "task " + std::to_string(k) + " cannot run locally and has no usable route");
    }
    td.x = (tt.alpha == 1 && tt.x_lo == 0.0) ? 0.0 : tt.x_hi;
    const bool offload = td.x > 0.0;
    std::size_t best = tt.routes();
    double best_score = kInf;
    bool best_caches = false;
    for (std::size_t r = 0; r < tt.routes(); ++r) {
      if (!tt.route_allowed[r]) {continue;}
      const std::size_t st = tt.route_bs[r];
      if (offload && r == 0 &&
        capacity_excess(compute_used[st] + pb.alloc.p[k][0], sc.stations[st].compute_hz) > 0.0)
      {
        continue;
      }
      const bool caches = st != kDataCenter && cache_left[st] >= pb.alloc.c[k];
      const double score = tt.route_delay[r] - (caches ? pb.eta * tt.reward : 0.0);
      if (score < best_score) {best_score = score; best = r; best_caches = caches;}
    }
    if (best == tt.routes()) {
      // Only the DC can be left out by the compute check.
      const std::size_t dc = tt.routes() - 1;
      if (tt.route_allowed[dc]) {best = dc;}
    }
    if (best == tt.routes()) {
      if (offload) {
        throw InfeasibleError(k, "task " + std::to_string(k) + " has no feasible initial route");
      }
      sync_w_dc(td);
      continue;
    }
    td.y[best] = 1.0;
    if (best_caches) {
      td.w[best] = 1.0;
      if (offload) {cache_left[tt.route_bs[best]] -= pb.alloc.c[k];}
    }
    if (offload && best == 0) {compute_used[tt.home] += pb.alloc.p[k][0];}
    sync_w_dc(td);
  }
  return dv;
}

// ---------------------------------------------------------------------------
// Main loop

struct BsumResult
{
  DecisionVector iterate;
  SolveTrace trace;
};

inline BsumResult run_bsum(const Problem & pb, const SolverParams & params)
{
  params.validate();
  BsumResult res;
  res.iterate = initial_point(pb);
  res.trace.rule_used = params.rule;
  Rng rng(mix_seed(params.seed, 0xb5u));

  const double b0 = evaluate(pb, res.iterate);
  res.trace.objective_per_iter.push_back(b0);
  res.trace.proximal_per_iter.push_back(b0);

  // Blocks seen quiet since the last step that made real progress.
  bool quiet[3] = {false, false, false};
  for (int t = 0; t < params.max_iters; ++t) {
    const Block b = select_block(params.rule, res.iterate, t, rng, pb, params.rho);
    DecisionVector next = solve_block(b, res.iterate, params, pb);
    const double bj_prev = res.trace.proximal_per_iter.back();
    const double obj = evaluate(pb, next);
    const double bj = obj + 0.5 * params.rho * sq_distance(next, res.iterate);
    res.iterate = std::move(next);
    res.trace.objective_per_iter.push_back(obj);
    res.trace.proximal_per_iter.push_back(bj);
    res.trace.blocks.push_back(b);
    res.trace.iterations = t + 1;

    const double rel = std::abs(bj_prev - bj) / std::max(std::abs(bj_prev), 1e-12);
    if (rel <= params.epsilon) {
      quiet[static_cast<int>(b)] = true;
    } else {
      quiet[0] = quiet[1] = quiet[2] = false;
    }
    const bool done = params.rule == Rule::gauss_southwell ? rel <= params.epsilon
                                                           : (quiet[0] && quiet[1] && quiet[2]);
    if (done) {
      res.trace.converged = true;
      break;
    }
  }
  return res;
}

inline std::string trace_csv(const SolveTrace & tr)
{
  std::ostringstream os;
  os.precision(17);
  os << "iter,block,B,B_j\n";
  for (std::size_t i = 0; i < tr.objective_per_iter.size(); ++i) {
    os << i << ',' << (i == 0 ? "init" : to_string(tr.blocks[i - 1])) << ','
       << tr.objective_per_iter[i] << ',' << tr.proximal_per_iter[i] << '\n';
  }
  return os.str();
}

}  // namespace mec4c

#endif  // MEC4C_SOLVER_HPP_
