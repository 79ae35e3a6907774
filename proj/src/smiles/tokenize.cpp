#include "cdn/smiles/smiles.hpp"

namespace cdn::smiles {

namespace {

bool is_organic_upper(char c) {
  // B, C, N, O, P, S, F, I begin single-letter atoms; Cl and Br are handled
  // by lookahead before this is consulted.
  return c == 'B' || c == 'C' || c == 'N' || c == 'O' || c == 'P' ||
         c == 'S' || c == 'F' || c == 'I';
}

bool is_aromatic_lower(char c) {
  return c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's';
}

}  // namespace

std::vector<Token> tokenize(const std::string& s) {
  if (s.empty()) throw UnknownCharacter(0);
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '[') {
      std::size_t close = s.find(']', i);
      if (close == std::string::npos) throw UnterminatedBracket(i);
      out.push_back({TokenKind::BracketAtom, s.substr(i, close - i + 1), i});
      i = close + 1;
    } else if (c == 'C' && i + 1 < s.size() && s[i + 1] == 'l') {
      out.push_back({TokenKind::Atom, "Cl", i});
      i += 2;
    } else if (c == 'B' && i + 1 < s.size() && s[i + 1] == 'r') {
      out.push_back({TokenKind::Atom, "Br", i});
      i += 2;
    } else if (is_organic_upper(c) || is_aromatic_lower(c)) {
      out.push_back({TokenKind::Atom, std::string(1, c), i});
      ++i;
    } else if (c == '-' || c == '=' || c == '#' || c == '/' || c == '\\') {
      // Directional bonds (/ \) are accepted and downgraded to single later.
      out.push_back({TokenKind::Bond, std::string(1, c), i});
      ++i;
    } else if (c == '(') {
      out.push_back({TokenKind::BranchOpen, "(", i});
      ++i;
    } else if (c == ')') {
      out.push_back({TokenKind::BranchClose, ")", i});
      ++i;
    } else if (c >= '0' && c <= '9') {
      out.push_back({TokenKind::RingDigit, std::string(1, c), i});
      ++i;
    } else if (c == '.') {
      // Tokenized so parse can report MultiComponent with a position.
      out.push_back({TokenKind::Bond, ".", i});
      ++i;
    } else {
      throw UnknownCharacter(i);
    }
  }
  return out;
}

}  // namespace cdn::smiles
