#include "winkler/ordering.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>

namespace winkler {

OrderRelation compare(const Interval& a, const Interval& b, OrderKind kind) {
  validate_interval(a, /*allow_degenerate=*/true);
  validate_interval(b, /*allow_degenerate=*/true);
  if (kind == OrderKind::Midpoint) {
    const double ma = 0.5 * (a.lower + a.upper);
    const double mb = 0.5 * (b.lower + b.upper);
    if (ma < mb) return OrderRelation::Less;
    if (ma > mb) return OrderRelation::Greater;
    return OrderRelation::Equal;
  }
  if (a.lower == b.lower && a.upper == b.upper) return OrderRelation::Equal;
  if (a.lower <= b.lower && a.upper <= b.upper) return OrderRelation::Less;
  if (b.lower <= a.lower && b.upper <= a.upper) return OrderRelation::Greater;
  return OrderRelation::Incomparable;
}

double comparability_fraction(std::span<const Interval> ivs, OrderKind kind,
                              Execution exec) {
  const std::int64_t n = static_cast<std::int64_t>(ivs.size());
  if (n < 2) {
    throw validation_error("comparability fraction needs at least two intervals");
  }
  for (const Interval& iv : ivs) {
    validate_interval(iv, /*allow_degenerate=*/true);
  }
  if (kind == OrderKind::Midpoint) {
    return 1.0;  // total order
  }
  std::int64_t incomparable = 0;
#pragma omp parallel for reduction(+ : incomparable) schedule(static) if (exec == Execution::Parallel)
  for (std::int64_t i = 0; i < n - 1; ++i) {
    const Interval& a = ivs[static_cast<std::size_t>(i)];
    std::int64_t local = 0;
    for (std::int64_t j = i + 1; j < n; ++j) {
      const Interval& b = ivs[static_cast<std::size_t>(j)];
      const bool a_le_b = a.lower <= b.lower && a.upper <= b.upper;
      const bool b_le_a = b.lower <= a.lower && b.upper <= a.upper;
      if (!a_le_b && !b_le_a) {
        ++local;
      }
    }
    incomparable += local;
  }
  const std::int64_t total = n * (n - 1) / 2;
  return static_cast<double>(total - incomparable) / static_cast<double>(total);
}

namespace {

// Immediate predecessors under componentwise dominance, given classes in
// lexicographic (lower, upper) order. Backward scan per target: a scanned
// candidate is dominated by an already accepted one iff its upper bound
// does not exceed the running maximum.
void componentwise_reduction(const std::vector<Interval>& cls,
                             std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  const std::size_t k = cls.size();
  std::vector<std::vector<std::uint32_t>> preds(k);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t j = 1; j < static_cast<std::int64_t>(k); ++j) {
    double max_u = -std::numeric_limits<double>::infinity();
    auto& out = preds[static_cast<std::size_t>(j)];
    const double uj = cls[static_cast<std::size_t>(j)].upper;
    for (std::int64_t i = j - 1; i >= 0; --i) {
      const double ui = cls[static_cast<std::size_t>(i)].upper;
      if (ui > uj) continue;
      if (ui > max_u) {
        out.push_back(static_cast<std::uint32_t>(i));
        max_u = ui;
        if (max_u >= uj) break;  // everything earlier is dominated
      }
    }
    std::reverse(out.begin(), out.end());
  }
  for (std::size_t j = 0; j < k; ++j) {
    for (std::uint32_t i : preds[j]) {
      edges.emplace_back(i, static_cast<std::uint32_t>(j));
    }
  }
}

}  // namespace

OrderDag build_dag(std::span<const Interval> ivs, OrderKind kind) {
  OrderDag dag;
  dag.n_cases = ivs.size();
  dag.kind = kind;
  if (ivs.empty()) {
    dag.is_chain = true;
    return dag;
  }
  for (const Interval& iv : ivs) {
    validate_interval(iv, /*allow_degenerate=*/true);
  }

  // Class key: the full interval for the componentwise order, the
  // midpoint (as a degenerate interval) for the midpoint order, since
  // midpoint ties are Equal by definition.
  std::vector<Interval> keys(ivs.size());
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    if (kind == OrderKind::Midpoint) {
      const double m = 0.5 * (ivs[i].lower + ivs[i].upper);
      keys[i] = {m, m};
    } else {
      keys[i] = ivs[i];
    }
  }

  std::vector<std::uint32_t> order(ivs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (keys[a].lower != keys[b].lower) return keys[a].lower < keys[b].lower;
    if (keys[a].upper != keys[b].upper) return keys[a].upper < keys[b].upper;
    return a < b;  // stable, deterministic
  });

  dag.class_of.resize(ivs.size());
  for (std::uint32_t idx : order) {
    const Interval& key = keys[idx];
    if (dag.class_rep.empty() || dag.class_rep.back().lower != key.lower ||
        dag.class_rep.back().upper != key.upper) {
      dag.class_rep.push_back(key);
      dag.class_size.push_back(0);
    }
    dag.class_of[idx] = static_cast<std::uint32_t>(dag.class_rep.size() - 1);
    ++dag.class_size.back();
  }

  const std::size_t k = dag.class_rep.size();
  if (kind == OrderKind::Midpoint) {
    dag.is_chain = true;
  } else {
    dag.is_chain = true;
    for (std::size_t c = 1; c < k; ++c) {
      // lex order guarantees lower[c-1] <= lower[c]
      if (dag.class_rep[c - 1].upper > dag.class_rep[c].upper) {
        dag.is_chain = false;
        break;
      }
    }
  }

  if (dag.is_chain) {
    dag.edges.reserve(k > 0 ? k - 1 : 0);
    for (std::size_t c = 1; c < k; ++c) {
      dag.edges.emplace_back(static_cast<std::uint32_t>(c - 1),
                             static_cast<std::uint32_t>(c));
    }
  } else {
    componentwise_reduction(dag.class_rep, dag.edges);
  }
  return dag;
}

bool dag_reachable(const OrderDag& dag, std::uint32_t from, std::uint32_t to) {
  if (from == to) return true;
  std::vector<char> seen(dag.n_classes(), 0);
  std::queue<std::uint32_t> frontier;
  frontier.push(from);
  seen[from] = 1;
  while (!frontier.empty()) {
    const std::uint32_t cur = frontier.front();
    frontier.pop();
    for (const auto& [a, b] : dag.edges) {
      if (a == cur && !seen[b]) {
        if (b == to) return true;
        seen[b] = 1;
        frontier.push(b);
      }
    }
  }
  return false;
}

}  // namespace winkler
