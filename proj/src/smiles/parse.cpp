#include <algorithm>
#include <cctype>

#include "cdn/smiles/smiles.hpp"

namespace cdn::smiles {

namespace {

bool aromatic_capable(const std::string& element) {
  return element == "B" || element == "C" || element == "N" ||
         element == "O" || element == "P" || element == "S";
}

// Bracket atom grammar: [isotope? symbol chiral? Hcount? charge?]
// Isotope and chirality marks are accepted and dropped (no 3D semantics at
// the string level).
Atom parse_bracket(const Token& tok) {
  const std::string& t = tok.text;
  std::size_t i = 1;                  // skip '['
  std::size_t end = t.size() - 1;     // index of ']'
  auto fail = [&] { return SmilesError("malformed bracket atom", tok.position); };

  while (i < end && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;  // isotope

  Atom a;
  if (i >= end) throw fail();
  char c = t[i];
  if (std::isupper(static_cast<unsigned char>(c))) {
    a.element = std::string(1, c);
    ++i;
    if (i < end && std::islower(static_cast<unsigned char>(t[i])) && t[i] != 'c' &&
        std::string("lroiae").find(t[i]) != std::string::npos) {
      // two-letter symbols seen in drug-like corpora: Cl, Br, Si, Se, Na...
      a.element += t[i];
      ++i;
    }
  } else if (std::islower(static_cast<unsigned char>(c))) {
    if (std::string("bcnops").find(c) == std::string::npos) throw fail();
    a.element = std::string(1, static_cast<char>(std::toupper(c)));
    a.aromatic = true;
    ++i;
  } else {
    throw fail();
  }

  while (i < end && t[i] == '@') ++i;  // chirality stripped

  if (i < end && t[i] == 'H') {
    ++i;
    int n = 1;
    if (i < end && std::isdigit(static_cast<unsigned char>(t[i]))) {
      n = t[i] - '0';
      ++i;
    }
    a.explicit_h = n;
  } else {
    a.explicit_h = 0;
  }

  if (i < end && (t[i] == '+' || t[i] == '-')) {
    char sign = t[i];
    int mag = 0;
    while (i < end && t[i] == sign) {
      ++mag;
      ++i;
    }
    if (i < end && std::isdigit(static_cast<unsigned char>(t[i]))) {
      mag = t[i] - '0';
      ++i;
    }
    a.formal_charge = (sign == '+') ? mag : -mag;
  }
  if (i != end) throw fail();
  if (a.formal_charge < -4 || a.formal_charge > 4)
    throw SmilesError("formal charge out of range", tok.position);
  if (a.aromatic && !aromatic_capable(a.element)) throw fail();
  return a;
}

int bond_order_of(char c) {
  switch (c) {
    case '=': return kDouble;
    case '#': return kTriple;
    default: return kSingle;  // '-', '/', '\\'
  }
}

}  // namespace

MolGraph parse(const std::vector<Token>& tokens) {
  MolGraph g;
  int last = -1;
  std::vector<int> branch_stack;
  std::optional<int> pending;          // bond order awaiting its atom
  std::size_t pending_pos = 0;
  struct RingOpen {
    int atom;
    std::optional<int> order;
  };
  std::map<int, RingOpen> open_rings;

  auto add_bond = [&](int u, int v, int order, std::size_t pos) {
    if (u == v) throw SmilesError("ring bond to the same atom", pos);
    int a = std::min(u, v), b = std::max(u, v);
    for (const Bond& e : g.bonds)
      if (e.a == a && e.b == b)
        throw SmilesError("duplicate bond between two atoms", pos);
    g.bonds.push_back({order, a, b});
  };

  auto attach_atom = [&](Atom atom, std::size_t pos) {
    int idx = static_cast<int>(g.atoms.size());
    g.atoms.push_back(std::move(atom));
    if (last >= 0) {
      int order;
      if (pending) {
        order = *pending;
        pending.reset();
      } else {
        order = (g.atoms[last].aromatic && g.atoms[idx].aromatic) ? kAromatic
                                                                  : kSingle;
      }
      add_bond(last, idx, order, pos);
    } else if (pending) {
      throw DanglingBond(pending_pos);
    }
    last = idx;
  };

  for (const Token& tok : tokens) {
    switch (tok.kind) {
      case TokenKind::Atom: {
        Atom a;
        if (std::islower(static_cast<unsigned char>(tok.text[0]))) {
          a.element = std::string(1, static_cast<char>(std::toupper(tok.text[0])));
          a.aromatic = true;
        } else {
          a.element = tok.text;
        }
        attach_atom(std::move(a), tok.position);
        break;
      }
      case TokenKind::BracketAtom:
        attach_atom(parse_bracket(tok), tok.position);
        break;
      case TokenKind::Bond:
        if (tok.text == ".") throw MultiComponent(tok.position);
        if (pending) throw DanglingBond(pending_pos);
        if (last < 0) throw DanglingBond(tok.position);
        pending = bond_order_of(tok.text[0]);
        pending_pos = tok.position;
        break;
      case TokenKind::BranchOpen:
        if (last < 0 || pending) throw UnbalancedBranch(tok.position);
        branch_stack.push_back(last);
        break;
      case TokenKind::BranchClose:
        if (branch_stack.empty()) throw UnbalancedBranch(tok.position);
        if (pending) throw DanglingBond(pending_pos);
        last = branch_stack.back();
        branch_stack.pop_back();
        break;
      case TokenKind::RingDigit: {
        if (last < 0) throw DanglingBond(tok.position);
        int digit = tok.text[0] - '0';
        auto it = open_rings.find(digit);
        if (it == open_rings.end()) {
          open_rings[digit] = {last, pending};
          pending.reset();
        } else {
          RingOpen open = it->second;
          open_rings.erase(it);
          int order;
          if (pending) {
            order = *pending;
            pending.reset();
          } else if (open.order) {
            order = *open.order;
          } else {
            order = (g.atoms[open.atom].aromatic && g.atoms[last].aromatic)
                        ? kAromatic
                        : kSingle;
          }
          add_bond(open.atom, last, order, tok.position);
        }
        break;
      }
    }
  }

  if (pending) throw DanglingBond(pending_pos);
  if (!branch_stack.empty())
    throw UnbalancedBranch(tokens.empty() ? 0 : tokens.back().position);
  if (!open_rings.empty()) throw UnclosedRing(open_rings.begin()->first);
  if (g.atoms.empty()) throw SmilesError("no atoms", 0);
  return g;
}

}  // namespace cdn::smiles
