#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdn::data {

class UnknownToken : public std::runtime_error {
public:
  explicit UnknownToken(const std::string& tok)
      : std::runtime_error("token not in vocabulary: " + tok) {}
};

// Token inventory: four specials followed by the sorted corpus tokens.
// Indices are dense and stable; serialization round-trips exactly.
class Vocabulary {
public:
  static constexpr int kPad = 0;
  static constexpr int kStart = 1;
  static constexpr int kEnd = 2;
  static constexpr int kUnk = 3;

  Vocabulary() = default;
  static Vocabulary build(const std::vector<std::string>& corpus);
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  int size() const { return static_cast<int>(tokens_.size()) + 4; }
  int id(const std::string& tok) const;
  int id_or_throw(const std::string& tok) const;
  const std::string& token(int id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  // {"tokens": [...], "specials": {...}} — key names fixed for checkpoint
  // compatibility.
  std::string to_json() const;
  static Vocabulary from_json(const std::string& text);
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

private:
  std::vector<std::string> tokens_;  // non-special tokens; index i -> id i+4
  std::map<std::string, int> index_;
  void rebuild_index();
};

struct EncodedSequence {
  std::vector<int> indices;  // length max_len + 2
  int true_length = 0;
};

constexpr int kDefaultMaxLen = 50;

EncodedSequence encode(const std::string& s, const Vocabulary& v,
                       int max_len = kDefaultMaxLen);
std::string decode(const EncodedSequence& seq, const Vocabulary& v);

}  // namespace cdn::data
