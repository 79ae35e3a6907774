#include <algorithm>

#include "cdn/smiles/smiles.hpp"

namespace cdn::smiles {

namespace {

// Permitted valences in full bond orders.
const std::vector<int>* valences_for(const std::string& el) {
  static const std::map<std::string, std::vector<int>> table = {
      {"B", {3}},  {"C", {4}},    {"N", {3, 5}}, {"O", {2}},
      {"P", {3, 5}}, {"S", {2, 4, 6}}, {"F", {1}},    {"Cl", {1}},
      {"Br", {1}}, {"I", {1}},   {"H", {1}},
  };
  auto it = table.find(el);
  return it == table.end() ? nullptr : &it->second;
}

bool matches_valence(const Atom& a, int total, bool implicit_h_allowed) {
  const auto* vs = valences_for(a.element);
  if (!vs) return false;
  for (int v : *vs) {
    int adjusted = v + a.formal_charge;
    if (a.element == "B" && a.formal_charge < 0) adjusted = v - a.formal_charge;
    if (adjusted < 0) continue;
    if (implicit_h_allowed ? total <= adjusted : total == adjusted) return true;
  }
  return false;
}

// Atoms surviving iterated removal of degree-<2 vertices in the aromatic
// subgraph lie on an aromatic cycle.
std::vector<bool> on_aromatic_cycle(const MolGraph& g) {
  int n = static_cast<int>(g.atoms.size());
  std::vector<std::vector<int>> adj(n);
  for (const Bond& b : g.bonds)
    if (b.half_order == kAromatic && g.atoms[b.a].aromatic && g.atoms[b.b].aromatic) {
      adj[b.a].push_back(b.b);
      adj[b.b].push_back(b.a);
    }
  std::vector<int> deg(n);
  std::vector<bool> alive(n, true);
  for (int i = 0; i < n; ++i) deg[i] = static_cast<int>(adj[i].size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      if (alive[i] && deg[i] < 2) {
        alive[i] = false;
        changed = true;
        for (int j : adj[i])
          if (alive[j]) --deg[j];
      }
    }
  }
  return alive;
}

}  // namespace

ValidityReport validate(const MolGraph& g) {
  ValidityReport report;
  int n = static_cast<int>(g.atoms.size());
  std::vector<int> half_sum(n, 0);       // aromatic bonds at 1.5
  std::vector<int> sigma_sum(n, 0);      // aromatic bonds at 1.0
  for (const Bond& b : g.bonds) {
    half_sum[b.a] += b.half_order;
    half_sum[b.b] += b.half_order;
    int sigma = (b.half_order == kAromatic) ? kSingle : b.half_order;
    sigma_sum[b.a] += sigma;
    sigma_sum[b.b] += sigma;
  }
  std::vector<bool> in_ring = on_aromatic_cycle(g);

  for (int i = 0; i < n; ++i) {
    const Atom& a = g.atoms[i];
    if (!valences_for(a.element)) {
      report.violations.push_back(
          {static_cast<std::size_t>(i), "element " + a.element + " not supported"});
      continue;
    }
    if (a.aromatic && !in_ring[i]) {
      report.violations.push_back(
          {static_cast<std::size_t>(i), "aromatic atom not in an aromatic ring"});
    }
    int h = a.explicit_h.value_or(0);
    bool implicit_fill = !a.explicit_h.has_value();
    int total = half_sum[i] / 2 + h;
    bool ok = matches_valence(a, total, implicit_fill);
    if (!ok && a.aromatic) {
      // Pyrrole-type aromatic heteroatoms contribute no pi bond order; retry
      // counting their aromatic bonds as single.
      ok = matches_valence(a, sigma_sum[i] / 2 + h, implicit_fill);
    }
    if (!ok) {
      report.violations.push_back(
          {static_cast<std::size_t>(i),
           a.element + " valence " + std::to_string(total) + " not permitted"});
    }
  }
  report.valid = report.violations.empty();
  return report;
}

bool is_valid_smiles(const std::string& s) {
  try {
    return validate(parse(tokenize(s))).valid;
  } catch (const SmilesError&) {
    return false;
  }
}

}  // namespace cdn::smiles
