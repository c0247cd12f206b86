#include "winkler/idr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace winkler {

namespace {

// ---------------------------------------------------------------------------
// Dinic max-flow. Capacities are doubles but the hot path feeds exact
// integer values (indicator counts), so cuts are decided exactly.
// ---------------------------------------------------------------------------

constexpr double kCapEps = 1e-13;

class Dinic {
 public:
  void init(std::size_t n) {
    adj_.assign(n, {});
    level_.assign(n, -1);
    iter_.assign(n, 0);
  }

  void add_edge(std::uint32_t a, std::uint32_t b, double cap) {
    adj_[a].push_back({b, cap, static_cast<std::uint32_t>(adj_[b].size())});
    adj_[b].push_back({a, 0.0, static_cast<std::uint32_t>(adj_[a].size() - 1)});
  }

  double max_flow(std::uint32_t s, std::uint32_t t) {
    double flow = 0.0;
    while (bfs(s, t)) {
      std::fill(iter_.begin(), iter_.end(), 0);
      while (true) {
        const double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (f <= 0.0) break;
        flow += f;
      }
    }
    return flow;
  }

  // Nodes reachable from s in the residual graph (the minimal optimal
  // closure after max_flow).
  void source_side(std::uint32_t s, std::vector<char>& mark) const {
    mark.assign(adj_.size(), 0);
    std::vector<std::uint32_t> stack{s};
    mark[s] = 1;
    while (!stack.empty()) {
      const std::uint32_t v = stack.back();
      stack.pop_back();
      for (const Edge& e : adj_[v]) {
        if (e.cap > kCapEps && !mark[e.to]) {
          mark[e.to] = 1;
          stack.push_back(e.to);
        }
      }
    }
  }

 private:
  struct Edge {
    std::uint32_t to;
    double cap;
    std::uint32_t rev;
  };

  bool bfs(std::uint32_t s, std::uint32_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<std::uint32_t> queue{s};
    level_[s] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::uint32_t v = queue[head];
      for (const Edge& e : adj_[v]) {
        if (e.cap > kCapEps && level_[e.to] < 0) {
          level_[e.to] = level_[v] + 1;
          queue.push_back(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(std::uint32_t v, std::uint32_t t, double f) {
    if (v == t) return f;
    for (std::size_t& i = iter_[v]; i < adj_[v].size(); ++i) {
      Edge& e = adj_[v][i];
      if (e.cap > kCapEps && level_[v] < level_[e.to]) {
        const double d = dfs(e.to, t, std::min(f, e.cap));
        if (d > 0.0) {
          e.cap -= d;
          adj_[e.to][e.rev].cap += d;
          return d;
        }
      }
    }
    return 0.0;
  }

  std::vector<std::vector<Edge>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
};

// ---------------------------------------------------------------------------
// Antitonic least squares on a DAG block via recursive partitioning.
// Each step finds the lower set L maximizing the scaled residual sum
// (a max-closure problem); no improving lower set means the block is
// fitted at its weighted mean.
// ---------------------------------------------------------------------------

struct BlockTask {
  std::vector<std::uint32_t> nodes;                            // class ids
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // local idx
};

void solve_antitonic_block(BlockTask root, std::span<const double> num,
                           std::span<const double> den, bool integral,
                           std::span<double> out) {
  std::vector<BlockTask> stack;
  stack.push_back(std::move(root));
  Dinic flow;
  std::vector<double> closure;
  std::vector<char> mark;
  std::vector<std::uint32_t> local_of;

  while (!stack.empty()) {
    BlockTask blk = std::move(stack.back());
    stack.pop_back();
    const std::size_t m = blk.nodes.size();
    if (m == 0) continue;

    double sum_num = 0.0, sum_den = 0.0;
    for (std::uint32_t c : blk.nodes) {
      sum_num += num[c];
      sum_den += den[c];
    }
    const double block_mean = sum_num / sum_den;
    if (m == 1) {
      out[blk.nodes[0]] = num[blk.nodes[0]] / den[blk.nodes[0]];
      continue;
    }

    // Scaled residuals: positive entries want to sit above the mean.
    closure.resize(m);
    double positive = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::uint32_t c = blk.nodes[i];
      closure[i] = num[c] * sum_den - sum_num * den[c];
      scale += std::abs(closure[i]);
      if (closure[i] > 0.0) positive += closure[i];
    }
    const double tol = integral ? 0.5 : 1e-11 * scale;
    if (positive <= tol) {
      for (std::uint32_t c : blk.nodes) out[c] = block_mean;
      continue;
    }

    const std::uint32_t src = static_cast<std::uint32_t>(m);
    const std::uint32_t snk = static_cast<std::uint32_t>(m + 1);
    flow.init(m + 2);
    for (std::size_t i = 0; i < m; ++i) {
      if (closure[i] > 0.0) {
        flow.add_edge(src, static_cast<std::uint32_t>(i), closure[i]);
      } else if (closure[i] < 0.0) {
        flow.add_edge(static_cast<std::uint32_t>(i), snk, -closure[i]);
      }
    }
    const double inf = positive + 1.0;
    // Lower-set closure: b in L forces every predecessor a into L.
    for (const auto& [a, b] : blk.edges) {
      flow.add_edge(b, a, inf);
    }
    const double gain = positive - flow.max_flow(src, snk);
    if (gain <= tol) {
      for (std::uint32_t c : blk.nodes) out[c] = block_mean;
      continue;
    }

    flow.source_side(src, mark);
    BlockTask low, high;
    local_of.assign(m, 0);
    std::uint32_t n_low = 0, n_high = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mark[i]) {
        local_of[i] = n_low++;
        low.nodes.push_back(blk.nodes[i]);
      } else {
        local_of[i] = n_high++;
        high.nodes.push_back(blk.nodes[i]);
      }
    }
    if (low.nodes.empty() || high.nodes.empty()) {
      throw internal_error("isotonic partition produced a trivial split");
    }
    for (const auto& [a, b] : blk.edges) {
      if (mark[a] && mark[b]) {
        low.edges.emplace_back(local_of[a], local_of[b]);
      } else if (!mark[a] && !mark[b]) {
        high.edges.emplace_back(local_of[a], local_of[b]);
      }
      // A cut edge always points from the low side to the high side.
    }
    stack.push_back(std::move(low));
    stack.push_back(std::move(high));
  }
}

// Antitonic PAVA on a chain of classes in ascending order. Pooled
// numerators/denominators stay exact for integral inputs; block value
// comparisons use cross-multiplication to avoid rounding.
void solve_antitonic_chain(std::span<const double> num,
                           std::span<const double> den,
                           std::span<double> out) {
  const std::size_t k = num.size();
  std::vector<double> bnum, bden;
  std::vector<std::size_t> bstart;
  bnum.reserve(k);
  bden.reserve(k);
  bstart.reserve(k);
  for (std::size_t c = 0; c < k; ++c) {
    bnum.push_back(num[c]);
    bden.push_back(den[c]);
    bstart.push_back(c);
    // Non-increasing fit: merge while the previous block value is
    // smaller than the current one.
    while (bnum.size() >= 2) {
      const std::size_t top = bnum.size() - 1;
      if (bnum[top - 1] * bden[top] < bnum[top] * bden[top - 1]) {
        bnum[top - 1] += bnum[top];
        bden[top - 1] += bden[top];
        bnum.pop_back();
        bden.pop_back();
        bstart.pop_back();
      } else {
        break;
      }
    }
  }
  for (std::size_t b = 0; b < bnum.size(); ++b) {
    const std::size_t end = (b + 1 < bnum.size()) ? bstart[b + 1] : k;
    const double value = bnum[b] / bden[b];
    for (std::size_t c = bstart[b]; c < end; ++c) {
      out[c] = value;
    }
  }
}

struct Adjacency {
  std::vector<std::uint32_t> pred_offset, pred_data;
  std::vector<std::uint32_t> succ_offset, succ_data;
};

Adjacency build_adjacency(const OrderDag& dag) {
  const std::size_t k = dag.n_classes();
  Adjacency adj;
  adj.pred_offset.assign(k + 1, 0);
  adj.succ_offset.assign(k + 1, 0);
  for (const auto& [a, b] : dag.edges) {
    ++adj.pred_offset[b + 1];
    ++adj.succ_offset[a + 1];
  }
  for (std::size_t c = 0; c < k; ++c) {
    adj.pred_offset[c + 1] += adj.pred_offset[c];
    adj.succ_offset[c + 1] += adj.succ_offset[c];
  }
  adj.pred_data.resize(dag.edges.size());
  adj.succ_data.resize(dag.edges.size());
  std::vector<std::uint32_t> pfill(adj.pred_offset.begin(), adj.pred_offset.end() - 1);
  std::vector<std::uint32_t> sfill(adj.succ_offset.begin(), adj.succ_offset.end() - 1);
  for (const auto& [a, b] : dag.edges) {
    adj.pred_data[pfill[b]++] = a;
    adj.succ_data[sfill[a]++] = b;
  }
  return adj;
}

// Solves one threshold column. `counts[c]` is the number of outcomes in
// class c at or below the threshold (exact integers stored as doubles).
void solve_column(const OrderDag& dag, const Adjacency& adj,
                  std::span<const double> counts,
                  std::span<const double> sizes, std::span<double> col) {
  const std::size_t k = dag.n_classes();
  if (dag.is_chain) {
    solve_antitonic_chain(counts, sizes, col);
    return;
  }

  // Already antitonic along the reduction edges (hence along all paths):
  // the indicators themselves are the fit.
  bool violated = false;
  for (const auto& [a, b] : dag.edges) {
    if (counts[a] * sizes[b] < counts[b] * sizes[a]) {
      violated = true;
      break;
    }
  }
  if (!violated) {
    for (std::size_t c = 0; c < k; ++c) col[c] = counts[c] / sizes[c];
    return;
  }

  bool binary = true;
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] != 0.0 && counts[c] != sizes[c]) {
      binary = false;
      break;
    }
  }

  BlockTask root;
  if (binary) {
    // The fit can move away from the data only inside the violation
    // closure: ones with a zero somewhere below, zeros with a one
    // somewhere above. That set is order-convex, so its induced
    // reduction edges carry the full order restricted to it.
    std::vector<char> zero_below(k, 0), one_above(k, 0);
    for (std::size_t c = 0; c < k; ++c) {
      char flag = 0;
      for (std::uint32_t e = adj.pred_offset[c]; e < adj.pred_offset[c + 1]; ++e) {
        const std::uint32_t p = adj.pred_data[e];
        if (counts[p] == 0.0 || zero_below[p]) {
          flag = 1;
          break;
        }
      }
      zero_below[c] = flag;
    }
    for (std::size_t ci = k; ci-- > 0;) {
      char flag = 0;
      for (std::uint32_t e = adj.succ_offset[ci]; e < adj.succ_offset[ci + 1]; ++e) {
        const std::uint32_t s = adj.succ_data[e];
        if (counts[s] == sizes[s] || one_above[s]) {
          flag = 1;
          break;
        }
      }
      one_above[ci] = flag;
    }
    std::vector<std::uint32_t> local(k, std::numeric_limits<std::uint32_t>::max());
    for (std::size_t c = 0; c < k; ++c) {
      const bool is_one = counts[c] == sizes[c];
      const bool in_violation = is_one ? zero_below[c] != 0 : one_above[c] != 0;
      if (in_violation) {
        local[c] = static_cast<std::uint32_t>(root.nodes.size());
        root.nodes.push_back(static_cast<std::uint32_t>(c));
      } else {
        col[c] = is_one ? 1.0 : 0.0;
      }
    }
    for (const auto& [a, b] : dag.edges) {
      if (local[a] != std::numeric_limits<std::uint32_t>::max() &&
          local[b] != std::numeric_limits<std::uint32_t>::max()) {
        root.edges.emplace_back(local[a], local[b]);
      }
    }
  } else {
    root.nodes.resize(k);
    std::iota(root.nodes.begin(), root.nodes.end(), 0u);
    root.edges = dag.edges;
  }
  solve_antitonic_block(std::move(root), counts, sizes, /*integral=*/true, col);
}

}  // namespace

std::vector<double> isotonic_binary_fit(const OrderDag& dag,
                                        std::span<const double> values,
                                        std::span<const double> weights) {
  const std::size_t k = dag.n_classes();
  if (values.size() != k || weights.size() != k) {
    throw validation_error("values/weights length must match the class count");
  }
  std::vector<double> num(k), den(k);
  bool integral = true;
  for (std::size_t c = 0; c < k; ++c) {
    if (!std::isfinite(values[c]) || values[c] < 0.0 || values[c] > 1.0) {
      throw validation_error("isotonic fit values must lie in [0, 1]");
    }
    if (!std::isfinite(weights[c]) || weights[c] <= 0.0) {
      throw validation_error("isotonic fit weights must be positive");
    }
    num[c] = values[c] * weights[c];
    den[c] = weights[c];
    if (num[c] != std::floor(num[c]) || den[c] != std::floor(den[c]) ||
        den[c] > 67108864.0) {
      integral = false;
    }
  }
  std::vector<double> out(k, 0.0);
  if (dag.is_chain) {
    solve_antitonic_chain(num, den, out);
  } else {
    BlockTask root;
    root.nodes.resize(k);
    std::iota(root.nodes.begin(), root.nodes.end(), 0u);
    root.edges = dag.edges;
    solve_antitonic_block(std::move(root), num, den, integral, out);
  }
  return out;
}

IdrFit idr_fit_dag(const OrderDag& dag, std::span<const double> y,
                   Execution exec, std::vector<std::string>* warnings,
                   const IdrConfig& config) {
  const std::size_t n = y.size();
  if (n != dag.n_cases) {
    throw validation_error("outcome count must match the covariate count");
  }
  if (n < 2) {
    throw validation_error("IDR needs at least two cases");
  }
  if (n > config.max_cases) {
    throw validation_error(
        "input exceeds the IDR size cap (" + std::to_string(config.max_cases) +
        " cases); evaluate on a subset or raise IdrConfig::max_cases");
  }
  for (double v : y) {
    if (!std::isfinite(v)) {
      throw validation_error("outcomes must be finite");
    }
  }
  if (warnings != nullptr && n < config.small_sample) {
    warnings->push_back("small sample: n = " + std::to_string(n) + " < " +
                        std::to_string(config.small_sample) +
                        "; decomposition terms may be unreliable");
  }

  IdrFit fit;
  fit.n_cases = n;
  fit.n_classes = dag.n_classes();
  fit.class_of = dag.class_of;
  fit.thresholds.assign(y.begin(), y.end());
  std::sort(fit.thresholds.begin(), fit.thresholds.end());
  fit.thresholds.erase(std::unique(fit.thresholds.begin(), fit.thresholds.end()),
                       fit.thresholds.end());

  const std::size_t k = fit.n_classes;
  const std::size_t t_count = fit.thresholds.size();

  // Outcomes bucketed by class, sorted, so per-threshold counts are a
  // binary search away.
  std::vector<std::vector<double>> by_class(k);
  for (std::size_t c = 0; c < k; ++c) {
    by_class[c].reserve(dag.class_size[c]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    by_class[dag.class_of[i]].push_back(y[i]);
  }
  for (auto& bucket : by_class) {
    std::sort(bucket.begin(), bucket.end());
  }
  std::vector<double> sizes(k);
  for (std::size_t c = 0; c < k; ++c) {
    sizes[c] = static_cast<double>(dag.class_size[c]);
  }

  const Adjacency adj = build_adjacency(dag);
  fit.cdf.assign(k * t_count, 0.0);

  // Exceptions may not unwind across the parallel region; failures are
  // flagged and rethrown afterwards.
  bool failed = false;
#pragma omp parallel if (exec == Execution::Parallel) shared(failed)
  {
    std::vector<double> counts(k), col(k);
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(t_count); ++t) {
      bool skip;
#pragma omp atomic read
      skip = failed;
      if (skip) continue;
      bool ok = true;
      const double z = fit.thresholds[static_cast<std::size_t>(t)];
      for (std::size_t c = 0; c < k; ++c) {
        const auto& bucket = by_class[c];
        counts[c] = static_cast<double>(
            std::upper_bound(bucket.begin(), bucket.end(), z) - bucket.begin());
      }
      try {
        solve_column(dag, adj, counts, sizes, col);
      } catch (const std::exception&) {
        ok = false;
      }
      if (ok) {
        for (std::size_t c = 0; c < k; ++c) {
          double v = col[c];
          if (v < -1e-10 || v > 1.0 + 1e-10) {
            ok = false;
            break;
          }
          v = std::min(1.0, std::max(0.0, v));
          fit.cdf[c * t_count + static_cast<std::size_t>(t)] = v;
        }
      }
      if (!ok) {
#pragma omp atomic write
        failed = true;
      }
    }
  }
  if (failed) {
    throw internal_error("IDR threshold solve failed");
  }

  // Theorems of the construction; a violation beyond tolerance is a bug.
  for (std::size_t c = 0; c < k; ++c) {
    const double* row = fit.cdf.data() + c * t_count;
    for (std::size_t t = 1; t < t_count; ++t) {
      if (row[t] < row[t - 1] - 1e-10) {
        throw internal_error("IDR cdf row is not monotone across thresholds");
      }
    }
    if (row[t_count - 1] != 1.0) {
      throw internal_error("IDR cdf row does not terminate at 1");
    }
  }
  for (std::size_t t = 0; t < t_count; ++t) {
    for (const auto& [a, b] : dag.edges) {
      if (fit.cdf[a * t_count + t] < fit.cdf[b * t_count + t] - 1e-10) {
        throw internal_error("IDR cdf violates the covariate order");
      }
    }
  }
  return fit;
}

IdrFit idr_fit(std::span<const Interval> ivs, std::span<const double> y,
               OrderKind kind, Execution exec,
               std::vector<std::string>* warnings, const IdrConfig& config) {
  const OrderDag dag = build_dag(ivs, kind);
  return idr_fit_dag(dag, y, exec, warnings, config);
}

double idr_lower_quantile(const IdrFit& fit, std::size_t case_index,
                          double beta) {
  if (case_index >= fit.n_cases) {
    throw validation_error("case index out of range");
  }
  if (!std::isfinite(beta) || beta <= 0.0 || beta >= 1.0) {
    throw validation_error("quantile level must lie strictly between 0 and 1");
  }
  const std::size_t t_count = fit.n_thresholds();
  const std::uint32_t cls = fit.class_of[case_index];
  const double* row = fit.cdf.data() + cls * t_count;
  // Absorbs float dust so exact rank ties resolve like the empirical
  // quantile convention.
  const double target = beta - 1e-9 / static_cast<double>(fit.n_cases);
  const double* pos = std::lower_bound(row, row + t_count, target);
  if (pos == row + t_count) {
    throw internal_error("IDR cdf never reaches the requested level");
  }
  return fit.thresholds[static_cast<std::size_t>(pos - row)];
}

double empirical_lower_quantile(std::span<const double> y, double beta) {
  if (y.empty()) {
    throw validation_error("empirical quantile of an empty sample is undefined");
  }
  if (!std::isfinite(beta) || beta <= 0.0 || beta >= 1.0) {
    throw validation_error("quantile level must lie strictly between 0 and 1");
  }
  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double k = std::ceil(n * beta - 1e-9);
  if (k < 1.0) k = 1.0;
  if (k > n) k = n;
  return sorted[static_cast<std::size_t>(k) - 1];
}

}  // namespace winkler
