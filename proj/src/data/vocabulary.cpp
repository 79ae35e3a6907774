#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"

#include "cdn/data/vocabulary.hpp"
#include "cdn/smiles/smiles.hpp"

namespace cdn::data {

Vocabulary Vocabulary::build(const std::vector<std::string>& corpus) {
  std::set<std::string> seen;
  for (const std::string& s : corpus)
    for (const auto& tok : smiles::tokenize(s)) seen.insert(tok.text);
  return from_tokens({seen.begin(), seen.end()});
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  v.rebuild_index();
  return v;
}

void Vocabulary::rebuild_index() {
  index_.clear();
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    index_[tokens_[i]] = static_cast<int>(i) + 4;
}

int Vocabulary::id(const std::string& tok) const {
  auto it = index_.find(tok);
  return it == index_.end() ? kUnk : it->second;
}

int Vocabulary::id_or_throw(const std::string& tok) const {
  auto it = index_.find(tok);
  if (it == index_.end()) throw UnknownToken(tok);
  return it->second;
}

const std::string& Vocabulary::token(int id) const {
  static const std::vector<std::string> specials = {"<pad>", "<s>", "</s>", "<unk>"};
  if (id >= 0 && id < 4) return specials[id];
  return tokens_.at(id - 4);
}

std::string Vocabulary::to_json() const {
  nlohmann::json j;
  j["tokens"] = tokens_;
  j["specials"] = {{"PAD", kPad}, {"START", kStart}, {"END", kEnd}, {"UNK", kUnk}};
  return j.dump();
}

Vocabulary Vocabulary::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  return from_tokens(j.at("tokens").get<std::vector<std::string>>());
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json() << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json(text);
}

EncodedSequence encode(const std::string& s, const Vocabulary& v, int max_len) {
  auto tokens = smiles::tokenize(s);
  if (static_cast<int>(tokens.size()) > max_len)
    throw std::runtime_error("sequence longer than max_len");
  EncodedSequence seq;
  seq.indices.assign(max_len + 2, Vocabulary::kPad);
  seq.indices[0] = Vocabulary::kStart;
  int i = 1;
  for (const auto& tok : tokens) seq.indices[i++] = v.id_or_throw(tok.text);
  seq.indices[i] = Vocabulary::kEnd;
  seq.true_length = static_cast<int>(tokens.size());
  return seq;
}

std::string decode(const EncodedSequence& seq, const Vocabulary& v) {
  std::string out;
  for (int i = 1; i <= seq.true_length; ++i) out += v.token(seq.indices[i]);
  return out;
}

}  // namespace cdn::data
