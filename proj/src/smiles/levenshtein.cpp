#include <algorithm>
#include <numeric>

#include "cdn/smiles/smiles.hpp"

namespace cdn::smiles {

// Two-row dynamic program, unit costs.
std::size_t levenshtein(const std::string& a, const std::string& b) {
  const std::string& shorter = a.size() <= b.size() ? a : b;
  const std::string& longer = a.size() <= b.size() ? b : a;
  std::vector<std::size_t> row(shorter.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t j = 1; j <= longer.size(); ++j) {
    std::size_t diag = row[0];
    row[0] = j;
    for (std::size_t i = 1; i <= shorter.size(); ++i) {
      std::size_t saved = row[i];
      if (shorter[i - 1] == longer[j - 1]) {
        row[i] = diag;
      } else {
        row[i] = 1 + std::min({row[i - 1], row[i], diag});
      }
      diag = saved;
    }
  }
  return row.back();
}

}  // namespace cdn::smiles
