#include <algorithm>
#include <fstream>
#include <set>

#include "cdn/data/corpus.hpp"
#include "cdn/rng.hpp"
#include "cdn/smiles/smiles.hpp"

namespace cdn::data {

namespace {
std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}
}  // namespace

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (!t.empty()) lines.push_back(t);
  }
  return lines;
}

CorpusLoad load_corpus(const std::string& path, int max_len) {
  CorpusLoad result;
  std::set<std::string> seen;  // normalized forms
  for (const std::string& line : read_lines(path)) {
    if (!smiles::is_valid_smiles(line)) {
      ++result.dropped_invalid;
      continue;
    }
    if (static_cast<int>(smiles::tokenize(line).size()) > max_len) {
      ++result.dropped_too_long;
      continue;
    }
    std::string canon = smiles::normalize(line);
    if (!seen.insert(canon).second) {
      ++result.dropped_duplicate;
      continue;
    }
    result.molecules.push_back(line);
  }
  if (result.molecules.empty()) throw EmptyCorpus();
  return result;
}

CorpusSplit split(const std::vector<std::string>& corpus, std::uint64_t seed,
                  const std::vector<std::string>& exclusion_list) {
  std::set<std::string> excluded;
  for (const std::string& s : exclusion_list) {
    try {
      excluded.insert(smiles::normalize(s));
    } catch (const smiles::SmilesError&) {
      excluded.insert(s);  // unparseable entries match literally
    }
  }

  std::vector<std::string> pool;
  for (const std::string& s : corpus) {
    std::string key;
    try {
      key = smiles::normalize(s);
    } catch (const smiles::SmilesError&) {
      key = s;
    }
    if (!excluded.count(key) && !excluded.count(s)) pool.push_back(s);
  }
  if (pool.empty()) throw EmptyCorpus();

  // Fisher-Yates with the project Rng so the shuffle is platform-stable.
  Rng rng(seed);
  for (std::size_t i = pool.size() - 1; i > 0; --i) {
    std::size_t j = rng.integer(i + 1);
    std::swap(pool[i], pool[j]);
  }

  std::size_t holdout = pool.size() > 10'000
                            ? 5'000
                            : std::max<std::size_t>(1, pool.size() / 20);
  CorpusSplit out;
  out.seed = seed;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (i < holdout)
      out.test.push_back(pool[i]);
    else if (i < 2 * holdout)
      out.validation.push_back(pool[i]);
    else
      out.train.push_back(pool[i]);
  }
  return out;
}

std::vector<EncodedSequence> encode_all(const std::vector<std::string>& smiles,
                                        const Vocabulary& v, int max_len) {
  std::vector<EncodedSequence> out;
  out.reserve(smiles.size());
  for (const std::string& s : smiles) out.push_back(encode(s, v, max_len));
  return out;
}

}  // namespace cdn::data
