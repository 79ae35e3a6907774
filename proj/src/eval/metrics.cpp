#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "cdn/eval/metrics.hpp"
#include "cdn/smiles/smiles.hpp"

namespace cdn::eval {

namespace {

std::vector<std::string> token_texts(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& t : smiles::tokenize(s)) out.push_back(t.text);
  return out;
}

// Normalized form, or empty when the string is not a valid molecule.
std::string canonical_or_empty(const std::string& s) {
  try {
    return smiles::normalize(s);
  } catch (const smiles::SmilesError&) {
    return {};
  }
}

void summarize(DistanceHistogram& h) {
  if (h.distances.empty()) return;
  double sum = 0.0;
  for (int d : h.distances) sum += d;
  h.mean = sum / static_cast<double>(h.distances.size());
  double var = 0.0;
  for (int d : h.distances) var += (d - h.mean) * (d - h.mean);
  h.stddev = std::sqrt(var / static_cast<double>(h.distances.size()));
}

using Embedding = std::vector<Eigen::VectorXf>;

double mean_pairwise(const Embedding& vs,
                     const std::function<double(const Eigen::VectorXf&,
                                                const Eigen::VectorXf&)>& dist) {
  double sum = 0.0;
  long n = 0;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      sum += dist(vs[i], vs[j]);
      ++n;
    }
  return n ? sum / static_cast<double>(n) : 0.0;
}

std::string fixed6(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

double reconstruction_accuracy(const data::EncodedSequence& prototype,
                               const std::string& candidate,
                               const data::Vocabulary& vocab) {
  std::vector<std::string> cand;
  try {
    cand = token_texts(candidate);
  } catch (const smiles::SmilesError&) {
    return 0.0;  // untokenizable candidate matches nothing
  }
  int scored = prototype.true_length + 1;  // tokens plus END
  int matches = 0;
  for (int pos = 1; pos <= scored; ++pos) {
    int want = prototype.indices[pos];
    std::size_t ci = static_cast<std::size_t>(pos - 1);
    if (want == data::Vocabulary::kEnd) {
      if (ci == cand.size()) ++matches;
    } else if (ci < cand.size() && cand[ci] == vocab.token(want)) {
      ++matches;
    }
  }
  return static_cast<double>(matches) / static_cast<double>(scored);
}

MetricsReport evaluate_run(const GenerationRun& run,
                           const data::Vocabulary& vocab, int max_len) {
  MetricsReport r;
  if (run.candidates.empty()) return r;
  data::EncodedSequence proto = data::encode(run.prototype, vocab, max_len);
  std::string proto_canon = canonical_or_empty(run.prototype);

  double acc_sum = 0.0;
  long valid = 0, novel = 0, novel_graph = 0;
  std::set<std::string> unique_novel;
  for (const std::string& c : run.candidates) {
    double a = reconstruction_accuracy(proto, c, vocab);
    acc_sum += a;
    if (a == 1.0) ++r.acc_at_k;
    if (!smiles::is_valid_smiles(c)) continue;
    ++valid;
    if (c != run.prototype) {
      ++novel;
      unique_novel.insert(c);
      if (canonical_or_empty(c) != proto_canon) ++novel_graph;
    }
  }
  auto n = static_cast<double>(run.candidates.size());
  r.acc = acc_sum / n;
  r.valid = valid / n;
  r.novel = novel / n;
  r.novel_graph = novel_graph / n;
  r.valid_at_k = valid;
  r.novel_at_k = static_cast<long>(unique_novel.size());
  return r;
}

DrugHitReport drug_hit_report(const std::vector<GenerationRun>& runs,
                              const std::vector<std::string>& fda_list) {
  std::set<std::string> fda;
  for (const std::string& s : fda_list) {
    std::string c = canonical_or_empty(s);
    if (!c.empty()) fda.insert(c);
  }

  DrugHitReport r;
  std::set<std::string> seen_hits;
  for (const GenerationRun& run : runs) {
    std::string proto_canon = canonical_or_empty(run.prototype);
    for (const std::string& c : run.candidates) {
      if (!smiles::is_valid_smiles(c)) continue;
      ++r.total_valid;
      std::string canon = canonical_or_empty(c);
      if (canon.empty() || canon == proto_canon) continue;
      if (fda.count(canon) && seen_hits.insert(canon).second) {
        ++r.hits;
        r.pairs.emplace_back(run.prototype, c);
      }
    }
  }
  if (r.total_valid > 0)
    r.percent_of_valid = 100.0 * r.hits / static_cast<double>(r.total_valid);
  return r;
}

std::pair<DistanceHistogram, DistanceHistogram> levenshtein_histograms(
    const GenerationRun& run) {
  std::set<std::string> unique_valid;
  for (const std::string& c : run.candidates)
    if (smiles::is_valid_smiles(c)) unique_valid.insert(c);
  std::vector<std::string> pop(unique_valid.begin(), unique_valid.end());

  DistanceHistogram vs_proto, within;
  vs_proto.kind = "prototype_vs_generated";
  within.kind = "within_population";
  for (const std::string& c : pop)
    vs_proto.distances.push_back(smiles::levenshtein(run.prototype, c));
  for (std::size_t i = 0; i < pop.size(); ++i)
    for (std::size_t j = i + 1; j < pop.size(); ++j)
      within.distances.push_back(smiles::levenshtein(pop[i], pop[j]));
  summarize(vs_proto);
  summarize(within);
  return {std::move(vs_proto), std::move(within)};
}

ClassDistanceReport latent_class_distances(
    const std::map<std::string, std::vector<std::string>>& classes,
    const model::CdnModel& m, std::uint64_t seed) {
  auto cosine = [](const Eigen::VectorXf& a, const Eigen::VectorXf& b) {
    double denom = a.norm() * b.norm();
    return denom > 0 ? 1.0 - a.dot(b) / denom : 0.0;
  };
  auto l2 = [](const Eigen::VectorXf& a, const Eigen::VectorXf& b) {
    return static_cast<double>((a - b).norm());
  };
  auto l1 = [](const Eigen::VectorXf& a, const Eigen::VectorXf& b) {
    return static_cast<double>((a - b).cwiseAbs().sum());
  };

  std::map<std::string, Embedding> embedded;
  Embedding pooled;
  std::uint64_t stream = 0;
  for (const auto& [name, members] : classes) {
    if (members.size() < 2) throw ClassTooSmall(name);
    Embedding& vs = embedded[name];
    for (const std::string& s : members) {
      data::EncodedSequence seq =
          data::encode(s, m.vocab(), m.config().max_len);
      Rng rng(derive_seed(seed, stream++));
      nn::Tensor z = m.diverse_sample(m.encode(seq), 1.0, rng);
      Eigen::VectorXf v = z.vector();
      vs.push_back(v);
      pooled.push_back(std::move(v));
    }
  }

  double across_cos = mean_pairwise(pooled, cosine);
  double across_l2 = mean_pairwise(pooled, l2);
  double across_l1 = mean_pairwise(pooled, l1);
  auto ratio = [](double v, double base) { return base > 0 ? v / base : 0.0; };

  ClassDistanceReport report;
  for (const auto& [name, vs] : embedded) {
    ClassDistanceRow row;
    row.name = name;
    row.cosine = ratio(mean_pairwise(vs, cosine), across_cos);
    row.l2 = ratio(mean_pairwise(vs, l2), across_l2);
    row.l1 = ratio(mean_pairwise(vs, l1), across_l1);
    report.rows.push_back(std::move(row));
  }
  report.rows.push_back({"across", 1.0, 1.0, 1.0});
  return report;
}

std::vector<SweepCell> diversity_sweep(const model::CdnModel& m,
                                       const std::vector<std::string>& prototypes,
                                       const std::vector<double>& d_values,
                                       const std::vector<model::DecoderMode>& modes,
                                       int k, std::uint64_t seed) {
  std::vector<SweepCell> cells;
  std::uint64_t stream = 0;
  for (double d : d_values) {
    for (model::DecoderMode mode : modes) {
      SweepCell cell;
      cell.diversity = d;
      cell.mode = mode;
      cell.k = k;
      MetricsReport sum;
      for (const std::string& p : prototypes) {
        model::DiversityConfig dc;
        dc.diversity = d;
        dc.samples = k;
        dc.decoder_mode = mode;
        dc.seed = derive_seed(seed, stream++);
        GenerationRun run{p, m.generate_from_prototype(p, dc), dc};
        MetricsReport r = evaluate_run(run, m.vocab(), m.config().max_len);
        sum.acc += r.acc;
        sum.valid += r.valid;
        sum.novel += r.novel;
        sum.novel_graph += r.novel_graph;
        sum.acc_at_k += r.acc_at_k;
        sum.valid_at_k += r.valid_at_k;
        sum.novel_at_k += r.novel_at_k;
      }
      auto n = static_cast<double>(prototypes.size());
      cell.report.acc = sum.acc / n;
      cell.report.valid = sum.valid / n;
      cell.report.novel = sum.novel / n;
      cell.report.novel_graph = sum.novel_graph / n;
      cell.report.acc_at_k = sum.acc_at_k / static_cast<long>(prototypes.size());
      cell.report.valid_at_k = sum.valid_at_k / static_cast<long>(prototypes.size());
      cell.report.novel_at_k = sum.novel_at_k / static_cast<long>(prototypes.size());
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::string metrics_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream os;
  os << "metric,D,mode,k,value\n";
  for (const SweepCell& c : cells) {
    auto row = [&](const char* metric, double value) {
      os << metric << ',' << fixed6(c.diversity) << ',' << to_string(c.mode)
         << ',' << c.k << ',' << fixed6(value) << '\n';
    };
    row("acc", c.report.acc);
    row("valid", c.report.valid);
    row("novel", c.report.novel);
    row("novel_graph", c.report.novel_graph);
    row("acc_at_k", static_cast<double>(c.report.acc_at_k));
    row("valid_at_k", static_cast<double>(c.report.valid_at_k));
    row("novel_at_k", static_cast<double>(c.report.novel_at_k));
  }
  return os.str();
}

std::string histogram_csv(const std::vector<DistanceHistogram>& histograms) {
  std::ostringstream os;
  os << "kind,distance,count\n";
  for (const DistanceHistogram& h : histograms) {
    std::map<int, int> counts;
    for (int d : h.distances) ++counts[d];
    for (const auto& [dist, count] : counts)
      os << h.kind << ',' << dist << ',' << count << '\n';
  }
  return os.str();
}

}  // namespace cdn::eval
