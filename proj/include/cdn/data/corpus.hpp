#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdn/data/vocabulary.hpp"

namespace cdn::data {

class FileNotFound : public std::runtime_error {
public:
  explicit FileNotFound(const std::string& path)
      : std::runtime_error("file not found: " + path) {}
};

class EmptyCorpus : public std::runtime_error {
public:
  EmptyCorpus() : std::runtime_error("corpus has no usable molecules") {}
};

struct CorpusLoad {
  std::vector<std::string> molecules;  // deduplicated, validated, length-capped
  int dropped_invalid = 0;
  int dropped_too_long = 0;
  int dropped_duplicate = 0;
};

// One SMILES per line; trims whitespace, drops invalid/over-length lines,
// deduplicates by normalized form.
CorpusLoad load_corpus(const std::string& path, int max_len = kDefaultMaxLen);

// Plain line-list reader for exclusion/FDA/class inputs (no filtering).
std::vector<std::string> read_lines(const std::string& path);

struct CorpusSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
  std::uint64_t seed = 0;
};

// Deterministic shuffle + split. Corpora over 10k molecules get the
// paper-shaped fixed 5k validation/test carve-outs; smaller ones split 90/5/5.
// Molecules matching the exclusion list (by normalized form) are removed
// before splitting.
CorpusSplit split(const std::vector<std::string>& corpus, std::uint64_t seed,
                  const std::vector<std::string>& exclusion_list = {});

std::vector<EncodedSequence> encode_all(const std::vector<std::string>& smiles,
                                        const Vocabulary& v,
                                        int max_len = kDefaultMaxLen);

}  // namespace cdn::data
