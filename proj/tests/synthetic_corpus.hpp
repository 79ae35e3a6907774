#pragma once

#include <map>
#include <string>
#include <vector>

namespace corpus_gen {

// Deterministic drug-like SMILES corpus, assembled from scaffold templates
// with substituent variations. All strings are valid and within max_len 50.
std::vector<std::string> make_corpus(int count, unsigned long long seed);

// A small fixed set for overfit smoke tests.
std::vector<std::string> tiny_corpus();

// >= 4 structural classes of >= 5 similar molecules, all drawn from the
// same generative families as make_corpus.
std::map<std::string, std::vector<std::string>> structural_classes();

}  // namespace corpus_gen
