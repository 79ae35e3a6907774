#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cdn/smiles/smiles.hpp"
#include "doctest.h"

using namespace cdn::smiles;

namespace {

std::string cat_tokens(const std::vector<Token>& ts) {
  std::string s;
  for (const auto& t : ts) s += t.text;
  return s;
}

// Independent recursive edit-distance oracle (memoized).
std::size_t lev_oracle(const std::string& a, const std::string& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go =
      [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    auto key = std::pair{i, j};
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::size_t best = std::min({go(i + 1, j) + 1, go(i, j + 1) + 1,
                                 go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1)});
    memo[key] = best;
    return best;
  };
  return go(0, 0);
}

// Brute-force graph isomorphism by permutation search; only used on tiny
// molecules in tests.
bool isomorphic(const MolGraph& g1, const MolGraph& g2) {
  if (g1.atoms.size() != g2.atoms.size() || g1.bonds.size() != g2.bonds.size())
    return false;
  std::vector<int> perm(g1.atoms.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  auto atoms_equal = [](const Atom& a, const Atom& b) {
    return a.element == b.element && a.aromatic == b.aromatic &&
           a.formal_charge == b.formal_charge;
  };
  do {
    bool ok = true;
    for (std::size_t i = 0; ok && i < perm.size(); ++i)
      ok = atoms_equal(g1.atoms[i], g2.atoms[perm[i]]);
    for (const Bond& b : g1.bonds) {
      if (!ok) break;
      int u = perm[b.a], v = perm[b.b];
      if (u > v) std::swap(u, v);
      bool found = false;
      for (const Bond& c : g2.bonds)
        if (c.a == u && c.b == v && c.half_order == b.half_order) found = true;
      ok = found;
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

std::string random_string(std::mt19937& rng, int max_len) {
  static const std::string alpha = "CNO=#()123cn";
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alpha.size() - 1);
  std::string s;
  int n = len(rng);
  for (int i = 0; i < n; ++i) s += alpha[pick(rng)];
  return s;
}

}  // namespace

TEST_CASE("tokenize: paper examples") {
  auto ts = tokenize("CN=C=O");
  REQUIRE(ts.size() == 6);
  CHECK(ts[0].text == "C");
  CHECK(ts[1].text == "N");
  CHECK(ts[2].text == "=");
  CHECK(ts[2].kind == TokenKind::Bond);
  CHECK(ts[5].text == "O");

  auto benzene = tokenize("c1ccccc1");
  REQUIRE(benzene.size() == 8);
  CHECK(benzene[1].kind == TokenKind::RingDigit);
  CHECK(benzene[0].kind == TokenKind::Atom);

  auto cl = tokenize("CCl");
  REQUIRE(cl.size() == 2);
  CHECK(cl[1].text == "Cl");
}

TEST_CASE("tokenize: errors and totality") {
  CHECK_THROWS_AS(tokenize(""), UnknownCharacter);
  CHECK_THROWS_AS(tokenize("CXC"), UnknownCharacter);
  CHECK_THROWS_AS(tokenize("C[NH"), UnterminatedBracket);
  try {
    tokenize("CCX");
  } catch (const UnknownCharacter& e) {
    CHECK(e.position() == 2);
  }

  // Concatenated token texts reconstruct the input byte-for-byte.
  for (const char* s : {"CN=C=O", "c1ccccc1", "NC(=O)c1cnccn1", "CC(Br)[NH3+]",
                        "C/C=C/Cl"}) {
    auto ts = tokenize(s);
    CHECK(cat_tokens(ts) == s);
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
      CHECK(ts[i].position < ts[i + 1].position);
  }
}

TEST_CASE("parse: topology") {
  auto benzene = parse(tokenize("c1ccccc1"));
  CHECK(benzene.atoms.size() == 6);
  CHECK(benzene.bonds.size() == 6);

  // Isoniazid (Table 3): 10 heavy atoms, 10 bonds, one branch, one ring.
  auto iso = parse(tokenize("NNC(=O)c1ccncc1"));
  CHECK(iso.atoms.size() == 10);
  CHECK(iso.bonds.size() == 10);

  CHECK_THROWS_AS(parse(tokenize("C1CC")), UnclosedRing);
  CHECK_THROWS_AS(parse(tokenize("C(CC")), UnbalancedBranch);
  CHECK_THROWS_AS(parse(tokenize("CC)C")), UnbalancedBranch);
  CHECK_THROWS_AS(parse(tokenize("CC=")), DanglingBond);
  CHECK_THROWS_AS(parse(tokenize("C=(C)O")), UnbalancedBranch);
  CHECK_THROWS_AS(parse(tokenize("CC.CC")), MultiComponent);
}

TEST_CASE("parse: bond orders") {
  auto g = parse(tokenize("CN=C=O"));
  REQUIRE(g.bonds.size() == 3);
  CHECK(g.bonds[0].half_order == kSingle);
  CHECK(g.bonds[1].half_order == kDouble);
  CHECK(g.bonds[2].half_order == kDouble);

  auto tri = parse(tokenize("C#N"));
  CHECK(tri.bonds[0].half_order == kTriple);

  // Aromatic default between aromatic atoms, incl. the ring closure bond.
  auto benzene = parse(tokenize("c1ccccc1"));
  for (const Bond& b : benzene.bonds) CHECK(b.half_order == kAromatic);

  // Directional bond marks degrade to single.
  auto dir = parse(tokenize("C/C=C/Cl"));
  CHECK(dir.bonds[0].half_order == kSingle);
  CHECK(dir.bonds[1].half_order == kDouble);
  CHECK(dir.bonds[2].half_order == kSingle);
}

TEST_CASE("parse: bracket atoms") {
  auto g = parse(tokenize("[NH4+]"));
  REQUIRE(g.atoms.size() == 1);
  CHECK(g.atoms[0].element == "N");
  CHECK(g.atoms[0].formal_charge == 1);
  CHECK(g.atoms[0].explicit_h == 4);

  auto o = parse(tokenize("C[O-]"));
  CHECK(o.atoms[1].formal_charge == -1);

  auto nh = parse(tokenize("c1cc[nH]c1"));
  CHECK(nh.atoms[3].explicit_h == 1);
  CHECK(nh.atoms[3].aromatic);

  // Chirality and isotopes are stripped, not rejected.
  auto chi = parse(tokenize("C[C@H](N)O"));
  CHECK(chi.atoms.size() == 4);
  CHECK(chi.atoms[1].explicit_h == 1);
}

TEST_CASE("validate: valence table") {
  CHECK(validate(parse(tokenize("c1ccccc1"))).valid);
  CHECK(validate(parse(tokenize("NC(=O)c1cnccn1"))).valid);  // Pyrazinamide

  auto over = validate(parse(tokenize("C(C)(C)(C)(C)C")));
  CHECK_FALSE(over.valid);
  REQUIRE(!over.violations.empty());
  CHECK(over.violations[0].where == 0);

  CHECK_FALSE(validate(parse(tokenize("O=C=O=C"))).valid);
  CHECK(validate(parse(tokenize("O=C=O"))).valid);
  CHECK(validate(parse(tokenize("FF"))).valid);
  CHECK_FALSE(validate(parse(tokenize("F=F"))).valid);

  // Aromatic atom outside any aromatic ring.
  CHECK_FALSE(validate(parse(tokenize("cC"))).valid);
  CHECK_FALSE(validate(parse(tokenize("c1ccccc1c"))).valid);

  // Charged species.
  CHECK(validate(parse(tokenize("C[N+](C)(C)C"))).valid);
  CHECK(validate(parse(tokenize("[O-]C"))).valid);
  CHECK_FALSE(validate(parse(tokenize("[O-](C)C"))).valid);

  // Hypervalent S and P rows of the table.
  CHECK(validate(parse(tokenize("CS(=O)(=O)C"))).valid);
  CHECK(validate(parse(tokenize("OP(=O)(O)O"))).valid);

  // Pyrrole-type aromatic nitrogen.
  CHECK(validate(parse(tokenize("c1cc[nH]c1"))).valid);
}

TEST_CASE("is_valid_smiles: total over arbitrary strings") {
  CHECK(is_valid_smiles("NNC(=O)c1ccncc1"));
  CHECK_FALSE(is_valid_smiles(""));
  CHECK_FALSE(is_valid_smiles("C1CC"));
  CHECK_FALSE(is_valid_smiles("hello world"));
  CHECK_FALSE(is_valid_smiles("C(C)(C)(C)(C)C"));
  CHECK_FALSE(is_valid_smiles("CC.CC"));

  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    std::string s = random_string(rng, 20);
    CHECK(is_valid_smiles(s) == is_valid_smiles(s));  // pure, never throws
  }
}

TEST_CASE("paper SMILES all validate") {
  // Every SMILES printed in the paper: the intro example, benzene, and all
  // Table 3 prototype/generated pairs.
  for (const char* s :
       {"CN=C=O", "c1ccccc1", "Nc1ccc(C(=O)O)c(O)c1", "Nc1ccc(O)c(C(=O)O)c1",
        "NC(=O)c1cnccn1", "NNC(=O)c1ccncc1", "CNCCCC1c2ccccc2C=Cc2ccccc21",
        "CNCCCN1c2ccccc2CCc2ccccc21", "NNCCc1ccccc1",
        "CC(C)NCC(O)c1ccc(O)c(O)c1", "CC(C)NCC(O)c1cc(O)cc(O)c1",
        "CN(C)CCC(c1ccccc1)c1ccccn1", "CN(C)CCN(Cc1ccccc1)c1ccccn1"}) {
    INFO(s);
    CHECK(is_valid_smiles(s));
  }
}

TEST_CASE("levenshtein: basics and paper pair") {
  CHECK(levenshtein("CN=C=O", "CN=C=O") == 0);
  CHECK(levenshtein("CN=C=O", "CN=C=S") == 1);
  CHECK(levenshtein("", "abc") == 3);
  // Pyrazinamide vs Isoniazid, frozen from the independent oracle.
  CHECK(lev_oracle("NC(=O)c1cnccn1", "NNC(=O)c1ccncc1") == 3);
  CHECK(levenshtein("NC(=O)c1cnccn1", "NNC(=O)c1ccncc1") == 3);
}

TEST_CASE("levenshtein: metric axioms vs oracle on random triples") {
  std::mt19937 rng(42);
  for (int i = 0; i < 100; ++i) {
    std::string a = random_string(rng, 12);
    std::string b = random_string(rng, 12);
    std::string c = random_string(rng, 12);
    CHECK(levenshtein(a, a) == 0);
    CHECK(levenshtein(a, b) == levenshtein(b, a));
    CHECK(levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c));
    CHECK(levenshtein(a, b) == lev_oracle(a, b));
  }
}

TEST_CASE("normalize: idempotence and traversal invariance") {
  CHECK(normalize("c1ccccc1") == normalize("c1ccccc1"));
  CHECK(normalize(normalize("NC(=O)c1cnccn1")) == normalize("NC(=O)c1cnccn1"));

  // Same 3-atom graph spelled from different roots; verified isomorphic by
  // brute force, so they must normalize identically.
  auto g1 = parse(tokenize("C(C)O"));
  auto g2 = parse(tokenize("CC(O)"));
  REQUIRE(isomorphic(g1, g2));
  CHECK(normalize("C(C)O") == normalize("CC(O)"));

  CHECK(normalize("OCC") == normalize("CCO"));
  CHECK(normalize("c1ccccc1C") == normalize("Cc1ccccc1"));
  CHECK(normalize("NNC(=O)c1ccncc1") == normalize("O=C(NN)c1ccncc1"));

  CHECK_THROWS_AS(normalize("C1CC"), NotValid);
  CHECK_THROWS_AS(normalize("C(C)(C)(C)(C)C"), NotValid);
}

TEST_CASE("normalize: round-trip preserves atom and bond multisets") {
  for (const char* s :
       {"CN=C=O", "c1ccccc1", "NC(=O)c1cnccn1", "NNC(=O)c1ccncc1",
        "CNCCCC1c2ccccc2C=Cc2ccccc21", "CC(C)NCC(O)c1ccc(O)c(O)c1",
        "CN(C)CCC(c1ccccc1)c1ccccn1", "C[N+](C)(C)C", "c1cc[nH]c1",
        "CS(=O)(=O)c1ccccc1"}) {
    INFO(s);
    auto g = parse(tokenize(s));
    std::string canon = normalize(s);
    auto g2 = parse(tokenize(canon));
    REQUIRE(g.atoms.size() == g2.atoms.size());
    REQUIRE(g.bonds.size() == g2.bonds.size());

    auto atom_keys = [](const MolGraph& m) {
      std::vector<std::string> ks;
      for (const Atom& a : m.atoms)
        ks.push_back(a.element + (a.aromatic ? "a" : "") +
                     std::to_string(a.formal_charge));
      std::sort(ks.begin(), ks.end());
      return ks;
    };
    auto bond_keys = [](const MolGraph& m) {
      std::vector<int> ks;
      for (const Bond& b : m.bonds) ks.push_back(b.half_order);
      std::sort(ks.begin(), ks.end());
      return ks;
    };
    CHECK(atom_keys(g) == atom_keys(g2));
    CHECK(bond_keys(g) == bond_keys(g2));
    CHECK(is_valid_smiles(canon));
    CHECK(normalize(canon) == canon);
  }
}
