#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cdn/data/corpus.hpp"
#include "cdn/smiles/smiles.hpp"
#include "cdn/eval/metrics.hpp"
#include "cdn/model/checkpoint.hpp"
#include "cdn/model/trainer.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fixed6(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << v;
  return os.str();
}

std::string file_digest(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return "missing";
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  char buf[4096];
  while (is.read(buf, sizeof buf) || is.gcount() > 0) {
    for (std::streamsize i = 0; i < is.gcount(); ++i)
      h = (h ^ static_cast<unsigned char>(buf[i])) * 0x100000001b3ULL;
    if (!is) break;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << content;
}

// Every run records its resolved configuration and input digests.
void write_manifest(const fs::path& out_dir, const std::string& command,
                    const json& resolved) {
  json m{{"command", command}, {"resolved", resolved}};
  write_file(out_dir / "manifest.json", m.dump(2) + "\n");
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<cdn::model::DecoderMode> parse_modes(const std::string& csv) {
  std::vector<cdn::model::DecoderMode> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(cdn::model::decoder_mode_from_string(item));
  return out;
}

struct CommonArgs {
  std::string checkpoint;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
};

cdn::model::CdnModel load_model(const std::string& path) {
  return cdn::model::Checkpoint::load(path).to_model();
}

std::vector<std::string> load_prototypes(const std::string& prototype,
                                         const std::string& prototypes_file) {
  if (!prototype.empty()) return {prototype};
  return cdn::data::read_lines(prototypes_file);
}

// ---- train ----

struct TrainArgs {
  std::string corpus, exclude, out_dir = ".";
  std::vector<std::string> overrides;  // key=value
  std::uint64_t seed = 1;
};

int cmd_train(const TrainArgs& a) {
  cdn::model::ModelConfig cfg;
  cfg.seed = a.seed;
  for (const std::string& kv : a.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("bad --config override (want key=value): " + kv);
    cfg.apply_override(kv.substr(0, eq), kv.substr(eq + 1));
  }

  fs::create_directories(a.out_dir);
  json resolved{{"corpus", a.corpus},
                {"corpus_digest", file_digest(a.corpus)},
                {"exclude", a.exclude},
                {"seed", a.seed},
                {"config", json::parse(cfg.to_json())}};
  write_manifest(a.out_dir, "train", resolved);

  cdn::data::CorpusLoad load = cdn::data::load_corpus(a.corpus, cfg.max_len);
  std::vector<std::string> exclusion;
  if (!a.exclude.empty()) exclusion = cdn::data::read_lines(a.exclude);
  cdn::data::CorpusSplit split =
      cdn::data::split(load.molecules, a.seed, exclusion);

  cdn::model::TrainResult result = cdn::model::train(
      split, cfg, [](const cdn::model::EpochStats& s) {
        std::cerr << "epoch " << s.epoch << " train_total "
                  << fixed6(s.train_total) << " val_recon "
                  << fixed6(s.validation_reconstruction) << "\n";
      });

  std::ostringstream curve;
  curve << "epoch,learning_rate,kl_weight,train_total,train_reconstruction,"
           "train_kl,validation_reconstruction\n";
  for (const auto& s : result.curve)
    curve << s.epoch << ',' << fixed6(s.learning_rate) << ','
          << fixed6(s.kl_weight) << ',' << fixed6(s.train_total) << ','
          << fixed6(s.train_reconstruction) << ',' << fixed6(s.train_kl) << ','
          << fixed6(s.validation_reconstruction) << '\n';
  write_file(fs::path(a.out_dir) / "loss_curve.csv", curve.str());
  result.best.save((fs::path(a.out_dir) / "checkpoint.cdn").string());
  std::cerr << "best validation reconstruction "
            << fixed6(result.best.best_val_loss) << " (epoch "
            << result.best.epoch << ")\n";
  return 0;
}

// ---- generate ----

struct GenerateArgs {
  CommonArgs common;
  std::string prototype, prototypes_file;
  double diversity = 1.0;
  int samples = 1000;  // the @1k protocol
  std::string decoder = "argmax";
};

int cmd_generate(const GenerateArgs& a) {
  fs::create_directories(a.common.out_dir);
  json resolved{{"checkpoint", a.common.checkpoint},
                {"checkpoint_digest", file_digest(a.common.checkpoint)},
                {"prototype", a.prototype},
                {"prototypes_file", a.prototypes_file},
                {"diversity", a.diversity},
                {"samples", a.samples},
                {"decoder", a.decoder},
                {"seed", a.common.seed}};
  write_manifest(a.common.out_dir, "generate", resolved);

  cdn::model::CdnModel model = load_model(a.common.checkpoint);
  std::vector<std::string> prototypes =
      load_prototypes(a.prototype, a.prototypes_file);

  std::ostringstream tsv;
  std::vector<cdn::eval::SweepCell> cells = cdn::eval::diversity_sweep(
      model, prototypes, {a.diversity},
      {cdn::model::decoder_mode_from_string(a.decoder)}, a.samples,
      a.common.seed);
  // regenerate per prototype for the TSV with the same seed derivation
  std::uint64_t stream = 0;
  for (const std::string& p : prototypes) {
    cdn::model::DiversityConfig dc;
    dc.diversity = a.diversity;
    dc.samples = a.samples;
    dc.decoder_mode = cdn::model::decoder_mode_from_string(a.decoder);
    dc.seed = cdn::derive_seed(a.common.seed, stream++);
    for (const std::string& c : model.generate_from_prototype(p, dc))
      tsv << p << '\t' << c << '\t' << (cdn::smiles::is_valid_smiles(c) ? 1 : 0)
          << '\n';
  }
  write_file(fs::path(a.common.out_dir) / "candidates.tsv", tsv.str());
  write_file(fs::path(a.common.out_dir) / "metrics.csv",
             cdn::eval::metrics_csv(cells));
  return 0;
}

// ---- eval ----

struct EvalArgs {
  CommonArgs common;
  std::string corpus, exclude, prototypes_file, fda;
  std::string d_values = "1";
  std::string modes = "argmax";
  int samples = 200;
  int max_prototypes = 0;  // 0 = all
};

std::vector<std::string> eval_prototypes(const EvalArgs& a,
                                         const cdn::model::CdnModel& model) {
  std::vector<std::string> protos;
  if (!a.prototypes_file.empty()) {
    protos = cdn::data::read_lines(a.prototypes_file);
  } else if (!a.corpus.empty()) {
    cdn::data::CorpusLoad load =
        cdn::data::load_corpus(a.corpus, model.config().max_len);
    std::vector<std::string> exclusion;
    if (!a.exclude.empty()) exclusion = cdn::data::read_lines(a.exclude);
    protos =
        cdn::data::split(load.molecules, model.config().seed, exclusion).test;
  } else {
    throw std::runtime_error("need --prototypes or --corpus");
  }
  if (a.max_prototypes > 0 &&
      static_cast<int>(protos.size()) > a.max_prototypes)
    protos.resize(a.max_prototypes);
  return protos;
}

int cmd_eval(const EvalArgs& a, const std::string& what) {
  fs::create_directories(a.common.out_dir);
  json resolved{{"checkpoint", a.common.checkpoint},
                {"checkpoint_digest", file_digest(a.common.checkpoint)},
                {"corpus", a.corpus},
                {"prototypes_file", a.prototypes_file},
                {"fda", a.fda},
                {"d_values", a.d_values},
                {"modes", a.modes},
                {"samples", a.samples},
                {"max_prototypes", a.max_prototypes},
                {"seed", a.common.seed}};
  write_manifest(a.common.out_dir, "eval " + what, resolved);

  cdn::model::CdnModel model = load_model(a.common.checkpoint);
  std::vector<std::string> protos = eval_prototypes(a, model);
  std::vector<double> ds = parse_doubles(a.d_values);

  if (what == "recon" || what == "sweep") {
    auto cells = cdn::eval::diversity_sweep(model, protos, ds,
                                            parse_modes(a.modes), a.samples,
                                            a.common.seed);
    write_file(fs::path(a.common.out_dir) / "metrics.csv",
               cdn::eval::metrics_csv(cells));
    return 0;
  }

  if (what == "drugs") {
    if (a.fda.empty()) throw std::runtime_error("eval drugs needs --fda");
    std::vector<std::string> fda = cdn::data::read_lines(a.fda);
    std::vector<cdn::eval::GenerationRun> runs;
    std::uint64_t stream = 0;
    for (const std::string& p : protos) {
      cdn::model::DiversityConfig dc;
      dc.diversity = ds.at(0);
      dc.samples = a.samples;
      dc.decoder_mode = parse_modes(a.modes).at(0);
      dc.seed = cdn::derive_seed(a.common.seed, stream++);
      runs.push_back({p, model.generate_from_prototype(p, dc), dc});
    }
    cdn::eval::DrugHitReport r = cdn::eval::drug_hit_report(runs, fda);
    std::ostringstream csv;
    csv << "hits,total_valid,percent_of_valid\n"
        << r.hits << ',' << r.total_valid << ',' << fixed6(r.percent_of_valid)
        << '\n';
    write_file(fs::path(a.common.out_dir) / "drug_hits.csv", csv.str());
    std::ostringstream pairs;
    for (const auto& [proto, hit] : r.pairs) pairs << proto << '\t' << hit << '\n';
    write_file(fs::path(a.common.out_dir) / "drug_hit_pairs.tsv", pairs.str());
    return 0;
  }

  if (what == "distances") {
    std::uint64_t stream = 0;
    for (double d : ds) {
      cdn::eval::DistanceHistogram proto_all, within_all;
      proto_all.kind = "prototype_vs_generated";
      within_all.kind = "within_population";
      double proto_mean = 0.0, within_mean = 0.0;
      for (const std::string& p : protos) {
        cdn::model::DiversityConfig dc;
        dc.diversity = d;
        dc.samples = a.samples;
        dc.decoder_mode = parse_modes(a.modes).at(0);
        dc.seed = cdn::derive_seed(a.common.seed, stream++);
        cdn::eval::GenerationRun run{p, model.generate_from_prototype(p, dc),
                                     dc};
        auto [vs_proto, within] = cdn::eval::levenshtein_histograms(run);
        proto_all.distances.insert(proto_all.distances.end(),
                                   vs_proto.distances.begin(),
                                   vs_proto.distances.end());
        within_all.distances.insert(within_all.distances.end(),
                                    within.distances.begin(),
                                    within.distances.end());
      }
      for (int v : proto_all.distances) proto_mean += v;
      for (int v : within_all.distances) within_mean += v;
      std::string tag = "D" + fixed6(d);
      write_file(fs::path(a.common.out_dir) / ("hist_prototype_" + tag + ".csv"),
                 cdn::eval::histogram_csv({proto_all}));
      write_file(fs::path(a.common.out_dir) / ("hist_within_" + tag + ".csv"),
                 cdn::eval::histogram_csv({within_all}));
    }
    return 0;
  }

  throw CLI::ParseError("unknown eval subcommand: " + what, 2);
}

// ---- analyze-latent ----

struct AnalyzeArgs {
  CommonArgs common;
  std::string classes_file;
};

int cmd_analyze_latent(const AnalyzeArgs& a) {
  fs::create_directories(a.common.out_dir);
  json resolved{{"checkpoint", a.common.checkpoint},
                {"checkpoint_digest", file_digest(a.common.checkpoint)},
                {"classes", a.classes_file},
                {"classes_digest", file_digest(a.classes_file)},
                {"seed", a.common.seed}};
  write_manifest(a.common.out_dir, "analyze-latent", resolved);

  std::map<std::string, std::vector<std::string>> classes;
  for (const std::string& line : cdn::data::read_lines(a.classes_file)) {
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("class file line needs name<TAB>SMILES: " + line);
    classes[line.substr(0, tab)].push_back(line.substr(tab + 1));
  }

  cdn::model::CdnModel model = load_model(a.common.checkpoint);
  cdn::eval::ClassDistanceReport report =
      cdn::eval::latent_class_distances(classes, model, a.common.seed);
  std::ostringstream csv;
  csv << "class,cosine,l2,l1\n";
  for (const auto& row : report.rows)
    csv << row.name << ',' << fixed6(row.cosine) << ',' << fixed6(row.l2)
        << ',' << fixed6(row.l1) << '\n';
  write_file(fs::path(a.common.out_dir) / "class_distances.csv", csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prototype-conditioned molecular generation toolkit"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "Train a model");
  train->add_option("--corpus", train_args.corpus, "SMILES corpus, one per line")
      ->required();
  train->add_option("--exclude", train_args.exclude, "Exclusion list file");
  train->add_option("--config", train_args.overrides,
                    "key=value hyperparameter overrides");
  train->add_option("--out", train_args.out_dir, "Output directory");
  train->add_option("--seed", train_args.seed, "Global seed");

  GenerateArgs gen_args;
  CLI::App* gen = app.add_subcommand("generate", "Generate around prototypes");
  gen->add_option("--checkpoint", gen_args.common.checkpoint)->required();
  gen->add_option("--prototype", gen_args.prototype, "Single prototype SMILES");
  gen->add_option("--prototypes", gen_args.prototypes_file, "Prototype file");
  gen->add_option("--diversity", gen_args.diversity);
  gen->add_option("--samples", gen_args.samples);
  gen->add_option("--decoder", gen_args.decoder)
      ->check(CLI::IsMember({"argmax", "sampling"}));
  gen->add_option("--out", gen_args.common.out_dir);
  gen->add_option("--seed", gen_args.common.seed);

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Evaluation reports");
  eval->require_subcommand(1);
  std::vector<CLI::App*> eval_subs;
  for (const char* name : {"recon", "drugs", "sweep", "distances"}) {
    CLI::App* sub = eval->add_subcommand(name);
    sub->add_option("--checkpoint", eval_args.common.checkpoint)->required();
    sub->add_option("--corpus", eval_args.corpus);
    sub->add_option("--exclude", eval_args.exclude);
    sub->add_option("--prototypes", eval_args.prototypes_file);
    sub->add_option("--fda", eval_args.fda);
    sub->add_option("--diversity-values", eval_args.d_values);
    sub->add_option("--modes", eval_args.modes);
    sub->add_option("--samples", eval_args.samples);
    sub->add_option("--max-prototypes", eval_args.max_prototypes);
    sub->add_option("--out", eval_args.common.out_dir);
    sub->add_option("--seed", eval_args.common.seed);
    eval_subs.push_back(sub);
  }

  AnalyzeArgs an_args;
  CLI::App* an = app.add_subcommand("analyze-latent", "Latent class distances");
  an->add_option("--checkpoint", an_args.common.checkpoint)->required();
  an->add_option("--classes", an_args.classes_file, "name<TAB>SMILES file")
      ->required();
  an->add_option("--out", an_args.common.out_dir);
  an->add_option("--seed", an_args.common.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (train->parsed()) return cmd_train(train_args);
    if (gen->parsed()) return cmd_generate(gen_args);
    if (eval->parsed())
      return cmd_eval(eval_args, eval->get_subcommands().at(0)->get_name());
    if (an->parsed()) return cmd_analyze_latent(an_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
