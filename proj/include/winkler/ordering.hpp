#ifndef WINKLER_ORDERING_HPP
#define WINKLER_ORDERING_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "winkler/scoring.hpp"

namespace winkler {

enum class OrderRelation { Less, Equal, Greater, Incomparable };

/// Componentwise is the partial order the decomposition guarantees are
/// proven for. Midpoint is a total order kept only to demonstrate its
/// failure mode; every consumer treats it as unsafe.
enum class OrderKind { Componentwise, Midpoint };

/// Componentwise: Less iff both bounds are <= with at least one strict;
/// Equal iff both bounds coincide; nested intervals are Incomparable.
/// Midpoint: total order on (lower + upper) / 2 with ties Equal.
OrderRelation compare(const Interval& a, const Interval& b, OrderKind kind);

/// Fraction of unordered case pairs {i, j} whose relation is not
/// Incomparable. Equal pairs count as comparable. Requires n >= 2.
double comparability_fraction(std::span<const Interval> ivs,
                              OrderKind kind = OrderKind::Componentwise,
                              Execution exec = Execution::Parallel);

/// The deduplicated partial order materialized for IDR. Equal intervals
/// are merged into classes; `edges` is the transitive reduction of the
/// order on classes, listed as (smaller, larger) pairs. Class numbering
/// is deterministic: classes are sorted by (lower, upper).
struct OrderDag {
  std::size_t n_cases = 0;
  OrderKind kind = OrderKind::Componentwise;
  std::vector<Interval> class_rep;          // representative per class
  std::vector<std::uint32_t> class_of;      // case index -> class index
  std::vector<std::uint32_t> class_size;    // cases per class
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  bool is_chain = false;                    // classes totally ordered

  std::size_t n_classes() const { return class_rep.size(); }
};

OrderDag build_dag(std::span<const Interval> ivs, OrderKind kind);

/// Reachability of `to` from `from` along DAG edges (for tests and the
/// small-instance oracles; linear scan per query).
bool dag_reachable(const OrderDag& dag, std::uint32_t from, std::uint32_t to);

}  // namespace winkler

#endif  // WINKLER_ORDERING_HPP
