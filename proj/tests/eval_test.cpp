#include <set>

#include "doctest.h"

#include "cdn/eval/metrics.hpp"
#include "cdn/smiles/smiles.hpp"
#include "synthetic_corpus.hpp"

using namespace cdn;

namespace {

// Independent brute-force metric computation, straight from the definitions:
// acc = mean positionwise match over prototype tokens + END; valid = fraction
// of candidates that are valid molecules; novel = valid and != prototype.
struct OracleReport {
  double acc, valid, novel;
  long valid_at_k, novel_at_k;
};

OracleReport oracle(const std::string& prototype,
                    const std::vector<std::string>& candidates) {
  std::vector<std::string> proto_tokens;
  for (const auto& t : smiles::tokenize(prototype)) proto_tokens.push_back(t.text);
  proto_tokens.push_back("<END>");

  double acc_sum = 0;
  long valid = 0, novel = 0;
  std::set<std::string> unique_novel;
  for (const std::string& c : candidates) {
    std::vector<std::string> cand_tokens;
    bool tokenizable = true;
    try {
      for (const auto& t : smiles::tokenize(c)) cand_tokens.push_back(t.text);
    } catch (...) {
      tokenizable = false;
    }
    if (tokenizable) {
      cand_tokens.push_back("<END>");
      int match = 0;
      for (std::size_t i = 0; i < proto_tokens.size(); ++i)
        if (i < cand_tokens.size() && cand_tokens[i] == proto_tokens[i]) ++match;
      acc_sum += double(match) / double(proto_tokens.size());
    }
    if (smiles::is_valid_smiles(c)) {
      ++valid;
      if (c != prototype) {
        ++novel;
        unique_novel.insert(c);
      }
    }
  }
  double n = double(candidates.size());
  return {acc_sum / n, valid / n, novel / n, valid,
          static_cast<long>(unique_novel.size())};
}

}  // namespace

TEST_CASE("reconstruction accuracy matches the stated convention") {
  auto vocab = data::Vocabulary::build({"CN=C=O", "CN=C=S", "CCO"});
  auto proto = data::encode("CN=C=O", vocab, 20);
  CHECK(eval::reconstruction_accuracy(proto, "CN=C=O", vocab) == 1.0);
  CHECK(eval::reconstruction_accuracy(proto, "", vocab) == 0.0);
  // 5 of 6 tokens match plus a missed END (candidate ends too, same spot):
  // positions C N = C = [O vs S] then END vs END -> 6/7
  CHECK(eval::reconstruction_accuracy(proto, "CN=C=S", vocab) ==
        doctest::Approx(6.0 / 7.0));
  // longer candidate: 6 token matches but END misses -> 6/7
  CHECK(eval::reconstruction_accuracy(proto, "CN=C=OC", vocab) ==
        doctest::Approx(6.0 / 7.0));
}

TEST_CASE("evaluate_run on enumerated examples") {
  auto vocab = data::Vocabulary::build({"CCN", "C1CC1", "CCO"});
  model::DiversityConfig dc;
  dc.samples = 3;

  eval::GenerationRun same{"CCN", {"CCN", "CCN", "CCN"}, dc};
  auto r = eval::evaluate_run(same, vocab, 20);
  CHECK(r.valid == 1.0);
  CHECK(r.novel == 0.0);
  CHECK(r.novel_at_k == 0);
  CHECK(r.acc == 1.0);

  eval::GenerationRun mixed{"CCN", {"CCN", "C1CC", "CCO"}, dc};
  r = eval::evaluate_run(mixed, vocab, 20);
  CHECK(r.valid == doctest::Approx(2.0 / 3.0));
  CHECK(r.novel == doctest::Approx(1.0 / 3.0));
  CHECK(r.novel_at_k == 1);
  CHECK(r.valid_at_k == 2);
}

TEST_CASE("evaluate_run matches the brute-force oracle on randomized runs") {
  auto pool = corpus_gen::make_corpus(60, 17);
  auto vocab = data::Vocabulary::build(pool);
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    std::string prototype = pool[rng.integer(pool.size())];
    std::vector<std::string> candidates;
    int k = 1 + static_cast<int>(rng.integer(8));
    for (int i = 0; i < k; ++i) {
      int kind = static_cast<int>(rng.integer(4));
      if (kind == 0) candidates.push_back(prototype);
      else if (kind == 1) candidates.push_back(pool[rng.integer(pool.size())]);
      else if (kind == 2) candidates.push_back("C1CC(");  // invalid
      else {
        std::string mut = pool[rng.integer(pool.size())];
        mut += "C";  // often invalid, sometimes valid
        candidates.push_back(mut);
      }
    }
    model::DiversityConfig dc;
    dc.samples = k;
    eval::GenerationRun run{prototype, candidates, dc};
    auto got = eval::evaluate_run(run, vocab, 50);
    auto want = oracle(prototype, candidates);
    CHECK(got.acc == doctest::Approx(want.acc).epsilon(1e-12));
    CHECK(got.valid == doctest::Approx(want.valid).epsilon(1e-12));
    CHECK(got.novel == doctest::Approx(want.novel).epsilon(1e-12));
    CHECK(got.valid_at_k == want.valid_at_k);
    CHECK(got.novel_at_k == want.novel_at_k);
    CHECK(got.novel <= got.valid);
    CHECK(got.novel_at_k <= k);
  }
}

TEST_CASE("drug hit report finds the documented retrospective pair") {
  model::DiversityConfig dc;
  dc.samples = 2;
  // generated around one drug, hitting another known drug
  eval::GenerationRun run{"NC(=O)c1cnccn1",
                          {"NNC(=O)c1ccncc1", "NC(=O)c1cnccn1"},
                          dc};
  auto r = eval::drug_hit_report({run}, {"NNC(=O)c1ccncc1", "NC(=O)c1cnccn1"});
  CHECK(r.hits == 1);  // the prototype itself is not a hit
  CHECK(r.total_valid == 2);
  CHECK(r.percent_of_valid == doctest::Approx(50.0));
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0].second == "NNC(=O)c1ccncc1");

  // alternative spelling of the same hit molecule is deduplicated
  eval::GenerationRun respelled{"NC(=O)c1cnccn1",
                                {"NNC(=O)c1ccncc1", "O=C(NN)c1ccncc1"},
                                dc};
  r = eval::drug_hit_report({respelled}, {"NNC(=O)c1ccncc1"});
  CHECK(r.hits == 1);

  auto empty = eval::drug_hit_report(
      {eval::GenerationRun{"CCO", {}, dc}}, {"CCO"});
  CHECK(empty.hits == 0);
  CHECK(empty.percent_of_valid == 0.0);
}

TEST_CASE("levenshtein histograms count valid unique candidates") {
  model::DiversityConfig dc;
  dc.samples = 4;
  eval::GenerationRun same{"CCO", {"CCO", "CCO", "CCO", "CCO"}, dc};
  auto [vs, within] = eval::levenshtein_histograms(same);
  for (int d : vs.distances) CHECK(d == 0);
  CHECK(within.distances.empty());

  eval::GenerationRun varied{"CCO", {"CCO", "CCN", "C1CC(", "CCN"}, dc};
  std::tie(vs, within) = eval::levenshtein_histograms(varied);
  CHECK(vs.distances.size() == 2);       // unique valid: CCO, CCN
  CHECK(within.distances.size() == 1);   // 2*(2-1)/2 pairs
  CHECK(within.distances[0] == 1);
  CHECK(vs.mean == doctest::Approx(0.5));

  // u valid unique candidates -> u and u(u-1)/2 entries
  eval::GenerationRun four{"CCO", {"CCO", "CCN", "CCC", "COC"}, dc};
  std::tie(vs, within) = eval::levenshtein_histograms(four);
  CHECK(vs.distances.size() == 4);
  CHECK(within.distances.size() == 6);
}

TEST_CASE("latent class distances: across row is 1, duplicates score near 0") {
  auto classes = corpus_gen::structural_classes();
  auto corpus = corpus_gen::make_corpus(40, 5);
  auto vocab = data::Vocabulary::build(corpus);
  model::ModelConfig cfg;
  cfg.max_len = 40;
  cfg.embed_dim = 8;
  cfg.filter_widths = {2, 3};
  cfg.filters_per_width = 4;
  cfg.latent_dim = 8;
  cfg.lstm_units = 8;
  model::CdnModel m(cfg, vocab, 3);
  // pin sigma tiny so latent positions are dominated by mu, not sampling noise
  m.find_parameter("w_log_sigma")->value.set_zero();
  m.find_parameter("b_log_sigma")->value.array() = -8.0f;

  std::map<std::string, std::vector<std::string>> probe;
  probe["dup"] = {"CCO", "CCO", "CCO"};
  probe["mixed"] = {corpus[0], corpus[10], corpus[20], corpus[30]};
  auto report = eval::latent_class_distances(probe, m, 7);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows.back().name == "across");
  CHECK(report.rows.back().cosine == 1.0);
  CHECK(report.rows.back().l2 == 1.0);
  CHECK(report.rows.back().l1 == 1.0);
  const auto& dup = report.rows[0];
  CHECK(dup.name == "dup");
  CHECK(dup.l2 < 0.1);  // only sampling noise separates identical molecules
  CHECK(dup.cosine < 0.1);
  CHECK(dup.l1 < 0.1);

  std::map<std::string, std::vector<std::string>> tiny;
  tiny["solo"] = {"CCO"};
  CHECK_THROWS_AS(eval::latent_class_distances(tiny, m, 1), eval::ClassTooSmall);
}

TEST_CASE("CSV formats are stable") {
  eval::SweepCell cell;
  cell.diversity = 1.0;
  cell.mode = model::DecoderMode::Argmax;
  cell.k = 3;
  cell.report.acc = 0.5;
  cell.report.valid = 1.0;
  cell.report.novel = 0.25;
  cell.report.novel_at_k = 2;
  std::string csv = eval::metrics_csv({cell});
  CHECK(csv.rfind("metric,D,mode,k,value\n", 0) == 0);
  CHECK(csv.find("acc,1.000000,argmax,3,0.500000\n") != std::string::npos);
  CHECK(csv.find("novel_at_k,1.000000,argmax,3,2.000000\n") != std::string::npos);

  eval::DistanceHistogram h;
  h.kind = "within_population";
  h.distances = {1, 1, 3};
  std::string hist = eval::histogram_csv({h});
  CHECK(hist == "kind,distance,count\n"
                "within_population,1,2\n"
                "within_population,3,1\n");
}

TEST_CASE("diversity sweep produces one cell per (D, mode)") {
  auto corpus = corpus_gen::make_corpus(20, 2);
  auto vocab = data::Vocabulary::build(corpus);
  model::ModelConfig cfg;
  cfg.max_len = 40;
  cfg.embed_dim = 8;
  cfg.filter_widths = {2, 3};
  cfg.filters_per_width = 4;
  cfg.latent_dim = 8;
  cfg.lstm_units = 8;
  model::CdnModel m(cfg, vocab, 3);
  auto cells = eval::diversity_sweep(
      m, {corpus[0], corpus[1]}, {1.0, 2.0},
      {model::DecoderMode::Argmax, model::DecoderMode::Sampling}, 3, 11);
  CHECK(cells.size() == 4);
  for (const auto& c : cells) {
    CHECK(c.k == 3);
    CHECK(c.report.novel <= c.report.valid);
  }
  // deterministic given the seed
  auto again = eval::diversity_sweep(
      m, {corpus[0], corpus[1]}, {1.0, 2.0},
      {model::DecoderMode::Argmax, model::DecoderMode::Sampling}, 3, 11);
  CHECK(eval::metrics_csv(cells) == eval::metrics_csv(again));
}
