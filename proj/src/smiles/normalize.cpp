#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include "cdn/smiles/smiles.hpp"

namespace cdn::smiles {

namespace {

std::vector<std::vector<std::pair<int, int>>> adjacency(const MolGraph& g) {
  std::vector<std::vector<std::pair<int, int>>> adj(g.atoms.size());
  for (const Bond& b : g.bonds) {
    adj[b.a].push_back({b.b, b.half_order});
    adj[b.b].push_back({b.a, b.half_order});
  }
  return adj;
}

// Morgan-style iterative invariant refinement. Base invariant is
// (element, charge, degree) plus aromaticity and H annotation; each round
// extends an atom's invariant with the sorted (bond, neighbor-rank) multiset.
// Atoms left tied after stabilization are treated as interchangeable.
std::vector<int> canonical_ranks(const MolGraph& g) {
  int n = static_cast<int>(g.atoms.size());
  auto adj = adjacency(g);

  using Key = std::vector<int>;
  std::vector<Key> keys(n);
  for (int i = 0; i < n; ++i) {
    const Atom& a = g.atoms[i];
    Key k;
    for (char c : a.element) k.push_back(c);
    k.push_back(a.formal_charge);
    k.push_back(static_cast<int>(adj[i].size()));
    k.push_back(a.aromatic ? 1 : 0);
    k.push_back(a.explicit_h.value_or(-1));
    keys[i] = std::move(k);
  }

  auto rank_of = [&](const std::vector<Key>& ks) {
    std::vector<Key> sorted = ks;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> r(n);
    for (int i = 0; i < n; ++i)
      r[i] = static_cast<int>(
          std::lower_bound(sorted.begin(), sorted.end(), ks[i]) - sorted.begin());
    return std::pair(r, static_cast<int>(sorted.size()));
  };

  auto [ranks, classes] = rank_of(keys);
  for (int round = 0; round < n; ++round) {
    std::vector<Key> next(n);
    for (int i = 0; i < n; ++i) {
      Key k{ranks[i]};
      std::vector<std::pair<int, int>> nb;
      for (auto [j, order] : adj[i]) nb.push_back({order, ranks[j]});
      std::sort(nb.begin(), nb.end());
      for (auto [order, r] : nb) {
        k.push_back(order);
        k.push_back(r);
      }
      next[i] = std::move(k);
    }
    auto [r2, c2] = rank_of(next);
    if (c2 == classes) break;
    ranks = std::move(r2);
    classes = c2;
  }
  return ranks;
}

struct Writer {
  const MolGraph& g;
  const std::vector<int>& ranks;
  std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbor, order)
  std::vector<bool> visited;
  std::vector<int> preorder;
  std::vector<std::vector<int>> children;
  struct Closure {
    int open_atom, close_atom, order, digit = -1;
  };
  std::vector<Closure> closures;
  std::set<std::pair<int, int>> closed_edges;
  std::string out;

  explicit Writer(const MolGraph& graph, const std::vector<int>& r)
      : g(graph), ranks(r), adj(adjacency(graph)),
        visited(graph.atoms.size(), false),
        preorder(graph.atoms.size(), -1),
        children(graph.atoms.size()) {}

  void dfs(int u, int& counter) {
    visited[u] = true;
    preorder[u] = counter++;
    auto nb = adj[u];
    std::sort(nb.begin(), nb.end(), [&](auto x, auto y) {
      return std::tuple(ranks[x.first], x.second, x.first) <
             std::tuple(ranks[y.first], y.second, y.first);
    });
    for (auto [v, order] : nb) {
      auto edge = std::minmax(u, v);
      std::pair<int, int> key{edge.first, edge.second};
      if (visited[v]) {
        if (!closed_edges.count(key)) {
          closed_edges.insert(key);
          closures.push_back({v, u, order});
        }
      } else {
        children[u].push_back(v);
        closed_edges.insert(key);
        dfs(v, counter);
      }
    }
  }

  void assign_digits() {
    std::sort(closures.begin(), closures.end(), [&](const auto& x, const auto& y) {
      return preorder[x.open_atom] < preorder[y.open_atom];
    });
    // Interval coloring over [open, close] preorder spans with digits 0-9.
    std::vector<int> digit_busy_until(10, -1);
    for (auto& c : closures) {
      for (int d = 1; d <= 9; ++d) {
        if (digit_busy_until[d] < preorder[c.open_atom]) {
          c.digit = d;
          digit_busy_until[d] = preorder[c.close_atom];
          break;
        }
      }
      if (c.digit < 0) throw NotValid("more than 9 simultaneously open rings");
    }
  }

  std::string bond_symbol(int order, int u, int v) const {
    bool both_aromatic = g.atoms[u].aromatic && g.atoms[v].aromatic;
    switch (order) {
      case kDouble: return "=";
      case kTriple: return "#";
      case kAromatic: return "";  // implicit between aromatic atoms
      default: return both_aromatic ? "-" : "";
    }
  }

  std::string atom_text(const Atom& a) const {
    std::string sym = a.element;
    if (a.aromatic) sym[0] = static_cast<char>(std::tolower(sym[0]));
    bool bracket = a.formal_charge != 0 || a.explicit_h.has_value();
    if (!bracket) return sym;
    std::string t = "[" + sym;
    int h = a.explicit_h.value_or(0);
    if (h > 0) {
      t += "H";
      if (h > 1) t += std::to_string(h);
    }
    if (a.formal_charge > 0)
      t += "+" + (a.formal_charge > 1 ? std::to_string(a.formal_charge) : "");
    else if (a.formal_charge < 0)
      t += "-" + (a.formal_charge < -1 ? std::to_string(-a.formal_charge) : "");
    return t + "]";
  }

  void emit(int u, int parent, int bond_from_parent) {
    if (parent >= 0) out += bond_symbol(bond_from_parent, parent, u);
    out += atom_text(g.atoms[u]);
    for (const auto& c : closures) {
      if (c.open_atom == u) {
        out += bond_symbol(c.order, c.open_atom, c.close_atom);
        out += std::to_string(c.digit);
      } else if (c.close_atom == u) {
        out += std::to_string(c.digit);
      }
    }
    for (std::size_t i = 0; i < children[u].size(); ++i) {
      int v = children[u][i];
      int order = 0;
      for (auto [w, o] : adj[u])
        if (w == v) order = o;
      bool last = i + 1 == children[u].size();
      if (!last) out += "(";
      emit(v, u, order);
      if (!last) out += ")";
    }
  }
};

}  // namespace

std::string write_smiles(const MolGraph& g, const std::vector<int>& ranks) {
  int start = 0;
  for (int i = 1; i < static_cast<int>(g.atoms.size()); ++i)
    if (ranks[i] < ranks[start]) start = i;
  Writer w(g, ranks);
  int counter = 0;
  w.dfs(start, counter);
  if (counter != static_cast<int>(g.atoms.size()))
    throw NotValid("disconnected graph");
  w.assign_digits();
  w.emit(start, -1, 0);
  return w.out;
}

std::string normalize(const std::string& s) {
  MolGraph g;
  try {
    g = parse(tokenize(s));
  } catch (const SmilesError& e) {
    throw NotValid(std::string("not a valid SMILES: ") + e.what());
  }
  ValidityReport report = validate(g);
  if (!report.valid)
    throw NotValid("not a valid molecule: " + report.violations.front().reason);
  return write_smiles(g, canonical_ranks(g));
}

}  // namespace cdn::smiles
