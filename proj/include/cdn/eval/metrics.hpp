#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cdn/model/model.hpp"

namespace cdn::eval {

class ClassTooSmall : public std::runtime_error {
public:
  explicit ClassTooSmall(const std::string& name)
      : std::runtime_error("class needs at least 2 members: " + name) {}
};

struct GenerationRun {
  std::string prototype;
  std::vector<std::string> candidates;  // size = cfg.samples
  model::DiversityConfig cfg;
};

struct MetricsReport {
  double acc = 0.0;          // mean character-level reconstruction accuracy
  double valid = 0.0;        // fraction passing validity
  double novel = 0.0;        // valid and string-different from prototype
  double novel_graph = 0.0;  // valid and canonically different (secondary)
  long acc_at_k = 0;         // candidates with accuracy 1.0
  long valid_at_k = 0;
  long novel_at_k = 0;       // unique novel strings
};

// Positionwise token match over prototype positions 1..true_length+1
// (END included, PAD excluded); short candidates miss missing positions.
double reconstruction_accuracy(const data::EncodedSequence& prototype,
                               const std::string& candidate,
                               const data::Vocabulary& vocab);

MetricsReport evaluate_run(const GenerationRun& run,
                           const data::Vocabulary& vocab, int max_len);

struct DrugHitReport {
  long hits = 0;                   // unique normalized hits
  long total_valid = 0;            // valid generated candidates across runs
  double percent_of_valid = 0.0;   // hits / total_valid * 100
  std::vector<std::pair<std::string, std::string>> pairs;  // prototype, hit
};

DrugHitReport drug_hit_report(const std::vector<GenerationRun>& runs,
                              const std::vector<std::string>& fda_list);

struct DistanceHistogram {
  std::string kind;  // prototype_vs_generated | within_population
  std::vector<int> distances;
  double mean = 0.0;
  double stddev = 0.0;
};

// Distances over valid unique candidates only.
std::pair<DistanceHistogram, DistanceHistogram> levenshtein_histograms(
    const GenerationRun& run);

struct ClassDistanceRow {
  std::string name;
  double cosine = 0.0;  // 1 - cosine similarity, ratio to across-drugs mean
  double l2 = 0.0;
  double l1 = 0.0;
};

struct ClassDistanceReport {
  std::vector<ClassDistanceRow> rows;  // last row is "across" = (1,1,1)
};

// D=1 sampled latent vectors as embeddings; in-class mean pairwise distance
// divided by the pooled across-drugs mean (across row is 1.0 by construction).
ClassDistanceReport latent_class_distances(
    const std::map<std::string, std::vector<std::string>>& classes,
    const model::CdnModel& m, std::uint64_t seed);

struct SweepCell {
  double diversity = 0.0;
  model::DecoderMode mode = model::DecoderMode::Argmax;
  int k = 0;
  MetricsReport report;  // averaged over prototypes; @k fields are means too
};

std::vector<SweepCell> diversity_sweep(const model::CdnModel& m,
                                       const std::vector<std::string>& prototypes,
                                       const std::vector<double>& d_values,
                                       const std::vector<model::DecoderMode>& modes,
                                       int k, std::uint64_t seed);

// CSV writers (fixed headers; 6-decimal fixed formatting for values)
std::string metrics_csv(const std::vector<SweepCell>& cells);
std::string histogram_csv(const std::vector<DistanceHistogram>& histograms);

}  // namespace cdn::eval
