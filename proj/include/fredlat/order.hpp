#pragma once

// Finite complete lattices together with brute-force verification of the
// Knaster-Tarski facts: a monotone self-map has a non-empty fixed-point
// set, that set is a complete sublattice, and the extremal fixed points
// are inf{x : f(x) <= x} and sup{x : x <= f(x)}.  Everything here is
// exhaustive or seeded-random, sized for lattices of at most a few dozen
// elements; it exists to falsify implementations, not to scale.

#include <bit>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fredlat {

/// A finite lattice over elements 0..size-1 with explicit order and
/// meet/join tables.  Construction validates the poset axioms and that
/// every pair has a least upper and greatest lower bound.
class FiniteLattice {
public:
  /// The chain 0 < 1 < ... < n-1.
  static FiniteLattice chain(int n) {
    if (n < 1) throw std::invalid_argument("chain needs at least one element");
    std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) leq[i][j] = true;
    return FiniteLattice(std::move(leq));
  }

  /// Componentwise order on pairs; element (i,j) has id i*y.size()+j.
  static FiniteLattice product(const FiniteLattice& x, const FiniteLattice& y) {
    const int nx = x.size(), ny = y.size(), n = nx * ny;
    std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        leq[a][b] = x.leq(a / ny, b / ny) && y.leq(a % ny, b % ny);
    return FiniteLattice(std::move(leq));
  }

  explicit FiniteLattice(std::vector<std::vector<bool>> leq) : leq_(std::move(leq)) {
    validate_poset();
    build_tables();
  }

  int size() const { return static_cast<int>(leq_.size()); }

  bool leq(int x, int y) const { return leq_[check(x)][check(y)]; }
  int join(int x, int y) const { return join_[check(x)][check(y)]; }
  int meet(int x, int y) const { return meet_[check(x)][check(y)]; }
  int bottom() const { return bottom_; }
  int top() const { return top_; }

  /// Supremum of an arbitrary subset; the empty set yields bottom.
  int sup(std::span<const int> xs) const {
    int acc = bottom_;
    for (int x : xs) acc = join(acc, x);
    return acc;
  }

  /// Infimum of an arbitrary subset; the empty set yields top.
  int inf(std::span<const int> xs) const {
    int acc = top_;
    for (int x : xs) acc = meet(acc, x);
    return acc;
  }

private:
  int check(int x) const {
    if (x < 0 || x >= size()) throw std::out_of_range("element id out of range");
    return x;
  }

  void validate_poset() const {
    const int n = size();
    if (n == 0) throw std::invalid_argument("lattice must be non-empty");
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(leq_[i].size()) != n)
        throw std::invalid_argument("order table is not square");
      if (!leq_[i][i]) throw std::invalid_argument("order is not reflexive");
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i != j && leq_[i][j] && leq_[j][i])
          throw std::invalid_argument("order is not antisymmetric");
        if (leq_[i][j])
          for (int k = 0; k < n; ++k)
            if (leq_[j][k] && !leq_[i][k])
              throw std::invalid_argument("order is not transitive");
      }
  }

  void build_tables() {
    const int n = size();
    join_.assign(n, std::vector<int>(n, -1));
    meet_.assign(n, std::vector<int>(n, -1));
    for (int x = 0; x < n; ++x)
      for (int y = x; y < n; ++y) {
        int lub = -1, glb = -1;
        for (int z = 0; z < n; ++z) {
          if (leq_[x][z] && leq_[y][z] && (lub < 0 || leq_[z][lub])) lub = z;
          if (leq_[z][x] && leq_[z][y] && (glb < 0 || leq_[glb][z])) glb = z;
        }
        if (lub < 0) throw std::invalid_argument("pair has no upper bound");
        if (glb < 0) throw std::invalid_argument("pair has no lower bound");
        // The candidates above are minimal/maximal only if they compare
        // against every other bound; confirm, otherwise it is no lattice.
        for (int z = 0; z < n; ++z) {
          if (leq_[x][z] && leq_[y][z] && !leq_[lub][z])
            throw std::invalid_argument("pair has no least upper bound");
          if (leq_[z][x] && leq_[z][y] && !leq_[z][glb])
            throw std::invalid_argument("pair has no greatest lower bound");
        }
        join_[x][y] = join_[y][x] = lub;
        meet_[x][y] = meet_[y][x] = glb;
      }
    bottom_ = 0;
    top_ = 0;
    for (int x = 0; x < n; ++x) {
      bottom_ = meet_[bottom_][x];
      top_ = join_[top_][x];
    }
  }

  std::vector<std::vector<bool>> leq_;
  std::vector<std::vector<int>> join_, meet_;
  int bottom_ = 0, top_ = 0;
};

/// A self-map given by its value table; monotonicity is checked, never
/// assumed.
struct MonotoneMap {
  std::vector<int> table;

  int operator()(int x) const { return table[static_cast<std::size_t>(x)]; }
};

inline void require_total(const MonotoneMap& map, const FiniteLattice& L) {
  if (static_cast<int>(map.table.size()) != L.size())
    throw std::invalid_argument("map is not total on the lattice");
  for (int v : map.table)
    if (v < 0 || v >= L.size())
      throw std::invalid_argument("map value outside the lattice");
}

/// True iff x <= y implies map(x) <= map(y) for every pair.
inline bool check_monotone(const MonotoneMap& map, const FiniteLattice& L) {
  require_total(map, L);
  for (int x = 0; x < L.size(); ++x)
    for (int y = 0; y < L.size(); ++y)
      if (L.leq(x, y) && !L.leq(map(x), map(y))) return false;
  return true;
}

/// All fixed points of a monotone map, ascending by element id.
/// Refuses non-monotone maps: without monotonicity there is no guarantee
/// the set is non-empty, let alone a sublattice.
inline std::vector<int> fixed_point_set(const MonotoneMap& map, const FiniteLattice& L) {
  if (!check_monotone(map, L))
    throw std::invalid_argument("map is not order-preserving");
  std::vector<int> fixed;
  for (int x = 0; x < L.size(); ++x)
    if (map(x) == x) fixed.push_back(x);
  return fixed;
}

/// (min, max) fixed point via inf of pre-fixed points and sup of
/// post-fixed points, cross-checked against the enumerated fixed-point
/// set.
inline std::pair<int, int> extremal_fixed_points(const MonotoneMap& map,
                                                 const FiniteLattice& L) {
  const std::vector<int> fixed = fixed_point_set(map, L);
  std::vector<int> pre, post;
  for (int x = 0; x < L.size(); ++x) {
    if (L.leq(map(x), x)) pre.push_back(x);
    if (L.leq(x, map(x))) post.push_back(x);
  }
  const int min_fp = L.inf(pre);
  const int max_fp = L.sup(post);
  for (int f : fixed)
    if (!L.leq(min_fp, f) || !L.leq(f, max_fp))
      throw std::logic_error("extremal formulas disagree with the enumerated fixed points");
  if (map(min_fp) != min_fp || map(max_fp) != max_fp)
    throw std::logic_error("extremal formulas did not land on fixed points");
  return {min_fp, max_fp};
}

/// True iff sup and inf of every non-empty subset of S stay inside S.
/// Exhaustive up to |S| = 20; larger sets are probed with `samples`
/// seeded-random subsets.
inline bool verify_complete_sublattice(std::span<const int> S, const FiniteLattice& L,
                                       std::uint64_t seed = 20240811,
                                       int samples = 10000) {
  if (S.empty()) throw std::invalid_argument("sublattice check needs a non-empty set");
  std::vector<char> in_set(static_cast<std::size_t>(L.size()), 0);
  for (int x : S) {
    if (x < 0 || x >= L.size()) throw std::out_of_range("element id out of range");
    in_set[static_cast<std::size_t>(x)] = 1;
  }
  const int k = static_cast<int>(S.size());
  if (k <= 20) {
    const std::uint32_t full = (1u << k) - 1u;
    std::vector<int> sup_of(full + 1), inf_of(full + 1);
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      const int low = std::countr_zero(mask);
      const std::uint32_t rest = mask & (mask - 1);
      if (rest == 0) {
        sup_of[mask] = S[low];
        inf_of[mask] = S[low];
      } else {
        sup_of[mask] = L.join(S[low], sup_of[rest]);
        inf_of[mask] = L.meet(S[low], inf_of[rest]);
      }
      if (!in_set[static_cast<std::size_t>(sup_of[mask])] ||
          !in_set[static_cast<std::size_t>(inf_of[mask])])
        return false;
    }
    return true;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> pick(0, k - 1);
  for (int it = 0; it < samples; ++it) {
    int sup = -1, inf = -1;
    bool any = false;
    for (int i = 0; i < k; ++i) {
      if (!coin(rng)) continue;
      sup = any ? L.join(sup, S[i]) : S[i];
      inf = any ? L.meet(inf, S[i]) : S[i];
      any = true;
    }
    if (!any) {
      const int x = S[pick(rng)];
      sup = inf = x;
    }
    if (!in_set[static_cast<std::size_t>(sup)] || !in_set[static_cast<std::size_t>(inf)])
      return false;
  }
  return true;
}

struct KleeneRun {
  int fixed_point;
  int steps;
};

/// Iterates the map from bottom (resp. top); for a monotone map this
/// ascends (descends) to the least (greatest) fixed point in at most
/// |L| steps.
inline KleeneRun kleene_from_bottom(const MonotoneMap& map, const FiniteLattice& L) {
  require_total(map, L);
  int x = L.bottom();
  for (int step = 0; step <= L.size(); ++step) {
    const int next = map(x);
    if (next == x) return {x, step};
    x = next;
  }
  throw std::logic_error("iteration from bottom did not stabilize in |L| steps");
}

inline KleeneRun kleene_from_top(const MonotoneMap& map, const FiniteLattice& L) {
  require_total(map, L);
  int x = L.top();
  for (int step = 0; step <= L.size(); ++step) {
    const int next = map(x);
    if (next == x) return {x, step};
    x = next;
  }
  throw std::logic_error("iteration from top did not stabilize in |L| steps");
}

// ---------------------------------------------------------------------------
// Seeded random cases for the self-test: chains and products of chains
// (meet/join tables trivially correct), and monotone maps built by
// monotone closure of an arbitrary table.

inline FiniteLattice random_chain_or_product(std::mt19937_64& rng, int max_elements = 64) {
  std::uniform_int_distribution<int> shape(0, 2);
  switch (shape(rng)) {
    case 0: {
      std::uniform_int_distribution<int> len(1, max_elements);
      return FiniteLattice::chain(len(rng));
    }
    case 1: {
      std::uniform_int_distribution<int> len(2, 8);
      const int a = len(rng);
      std::uniform_int_distribution<int> len2(2, max_elements / a);
      return FiniteLattice::product(FiniteLattice::chain(a),
                                    FiniteLattice::chain(len2(rng)));
    }
    default: {
      std::uniform_int_distribution<int> len(2, 4);
      const int a = len(rng), b = len(rng);
      std::uniform_int_distribution<int> len3(2, std::max(2, max_elements / (a * b)));
      return FiniteLattice::product(
          FiniteLattice::product(FiniteLattice::chain(a), FiniteLattice::chain(b)),
          FiniteLattice::chain(len3(rng)));
    }
  }
}

inline MonotoneMap random_monotone_map(const FiniteLattice& L, std::mt19937_64& rng) {
  const int n = L.size();
  std::uniform_int_distribution<int> elem(0, n - 1);
  std::uniform_int_distribution<int> kind(0, 9);
  MonotoneMap m;
  m.table.resize(static_cast<std::size_t>(n));
  switch (kind(rng)) {
    case 0:  // identity
      for (int x = 0; x < n; ++x) m.table[x] = x;
      return m;
    case 1: {  // constant
      const int c = elem(rng);
      for (int x = 0; x < n; ++x) m.table[x] = c;
      return m;
    }
    case 2: {  // round up to c
      const int c = elem(rng);
      for (int x = 0; x < n; ++x) m.table[x] = L.join(x, c);
      return m;
    }
    case 3: {  // truncate at c
      const int c = elem(rng);
      for (int x = 0; x < n; ++x) m.table[x] = L.meet(x, c);
      return m;
    }
    default: {
      // Monotone closure of an arbitrary table g: f(x) = sup{g(y) : y <= x}.
      std::vector<int> g(static_cast<std::size_t>(n));
      for (int& v : g) v = elem(rng);
      for (int x = 0; x < n; ++x) {
        int acc = L.bottom();
        for (int y = 0; y < n; ++y)
          if (L.leq(y, x)) acc = L.join(acc, g[y]);
        m.table[x] = acc;
      }
      return m;
    }
  }
}

struct LatticeSelftestResult {
  int cases = 0;
  int failures = 0;
  std::vector<std::string> messages;

  bool ok() const { return failures == 0; }
};

/// Generates `cases` random (lattice, monotone map) pairs and checks the
/// full fixed-point battery on each: non-empty fixed set, complete
/// sublattice, extremal formulas agreeing with the enumerated min/max,
/// and Kleene iteration from bottom/top landing on them within |L| steps.
inline LatticeSelftestResult run_lattice_selftest(std::uint64_t seed, int cases) {
  LatticeSelftestResult result;
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c) {
    ++result.cases;
    const std::string tag = "case " + std::to_string(c) + ": ";
    try {
      const FiniteLattice L = random_chain_or_product(rng);
      const MonotoneMap map = random_monotone_map(L, rng);
      if (!check_monotone(map, L)) {
        ++result.failures;
        result.messages.push_back(tag + "generated map is not monotone");
        continue;
      }
      const std::vector<int> fixed = fixed_point_set(map, L);
      if (fixed.empty()) {
        ++result.failures;
        result.messages.push_back(tag + "fixed-point set is empty");
        continue;
      }
      if (!verify_complete_sublattice(fixed, L, seed ^ (static_cast<std::uint64_t>(c) + 1))) {
        ++result.failures;
        result.messages.push_back(tag + "fixed-point set is not a complete sublattice");
        continue;
      }
      const auto [min_fp, max_fp] = extremal_fixed_points(map, L);
      int lo = fixed.front(), hi = fixed.front();
      for (int f : fixed) {
        lo = L.meet(lo, f);
        hi = L.join(hi, f);
      }
      if (min_fp != lo || max_fp != hi) {
        ++result.failures;
        result.messages.push_back(tag + "extremal formulas disagree with enumeration");
        continue;
      }
      const KleeneRun up = kleene_from_bottom(map, L);
      const KleeneRun down = kleene_from_top(map, L);
      if (up.fixed_point != min_fp || down.fixed_point != max_fp) {
        ++result.failures;
        result.messages.push_back(tag + "iteration from bottom/top missed the extremal fixed points");
        continue;
      }
      if (up.steps > L.size() || down.steps > L.size()) {
        ++result.failures;
        result.messages.push_back(tag + "iteration took more than |L| steps");
      }
    } catch (const std::exception& e) {
      ++result.failures;
      result.messages.push_back(tag + e.what());
    }
  }
  return result;
}

}  // namespace fredlat
