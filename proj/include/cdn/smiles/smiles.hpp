#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cdn::smiles {

// Parse/validation failures carry the offending position where one exists.
class SmilesError : public std::runtime_error {
public:
  SmilesError(std::string what, std::size_t position)
      : std::runtime_error(std::move(what)), position_(position) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

class UnknownCharacter : public SmilesError {
public:
  explicit UnknownCharacter(std::size_t pos)
      : SmilesError("unknown character at position " + std::to_string(pos), pos) {}
};

class UnterminatedBracket : public SmilesError {
public:
  explicit UnterminatedBracket(std::size_t pos)
      : SmilesError("unterminated '[' at position " + std::to_string(pos), pos) {}
};

class UnbalancedBranch : public SmilesError {
public:
  explicit UnbalancedBranch(std::size_t pos)
      : SmilesError("unbalanced branch at position " + std::to_string(pos), pos) {}
};

class UnclosedRing : public SmilesError {
public:
  explicit UnclosedRing(int digit)
      : SmilesError("ring bond " + std::to_string(digit) + " never closed", 0),
        digit_(digit) {}
  int digit() const { return digit_; }

private:
  int digit_;
};

class DanglingBond : public SmilesError {
public:
  explicit DanglingBond(std::size_t pos)
      : SmilesError("bond at position " + std::to_string(pos) +
                        " not followed by an atom or ring digit",
                    pos) {}
};

class MultiComponent : public SmilesError {
public:
  explicit MultiComponent(std::size_t pos)
      : SmilesError("multi-component SMILES ('.') rejected", pos) {}
};

class NotValid : public SmilesError {
public:
  explicit NotValid(std::string why) : SmilesError(std::move(why), 0) {}
};

enum class TokenKind {
  Atom,
  Bond,
  BranchOpen,
  BranchClose,
  RingDigit,
  BracketAtom,
};

struct Token {
  TokenKind kind;
  std::string text;      // exact source slice
  std::size_t position;  // index into source string
};

struct Atom {
  std::string element;             // canonical symbol, e.g. "C", "Cl"
  bool aromatic = false;
  int formal_charge = 0;
  std::optional<int> explicit_h;   // set only for bracket atoms
  // Bond-order sum is computed during validation, not stored here.
};

struct Bond {
  // single=2, double=4, triple=6, aromatic=3 in half-order units so the
  // sum stays integral.
  int half_order;
  int a, b;  // atom indices, a < b after construction
};

inline constexpr int kSingle = 2;
inline constexpr int kDouble = 4;
inline constexpr int kTriple = 6;
inline constexpr int kAromatic = 3;

struct MolGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
};

struct Violation {
  std::size_t where;   // atom index (or syntax position for parse-level issues)
  std::string reason;
};

struct ValidityReport {
  bool valid = true;
  std::vector<Violation> violations;
};

std::vector<Token> tokenize(const std::string& s);
MolGraph parse(const std::vector<Token>& tokens);
ValidityReport validate(const MolGraph& g);

// True iff tokenize, parse and validate all succeed. Never throws.
bool is_valid_smiles(const std::string& s);

std::size_t levenshtein(const std::string& a, const std::string& b);

// Canonical re-emission via Morgan-style invariant refinement. Throws
// NotValid when the input fails is_valid_smiles.
std::string normalize(const std::string& s);

// Serialize a graph back to SMILES starting from the given atom order ranks.
// Exposed for the normalizer's tests.
std::string write_smiles(const MolGraph& g, const std::vector<int>& ranks);

}  // namespace cdn::smiles
