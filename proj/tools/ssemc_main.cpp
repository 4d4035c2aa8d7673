// Command-line front end: dataset-gen, train, classify, evaluate, compare.
// Exit codes: 0 success, 1 internal error, 2 usage/path, 3 invalid document
// format, 4 out-of-domain document.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ssemc/corpus.hpp"
#include "ssemc/dataset_gen.hpp"
#include "ssemc/em.hpp"
#include "ssemc/metrics.hpp"
#include "ssemc/model.hpp"
#include "ssemc/novelty.hpp"
#include "ssemc/store.hpp"

namespace fs = std::filesystem;
using namespace ssemc;

namespace {

struct RunConfig {
  std::string dataset;
  std::string stopword_path;
  std::string output_dir = ".";
  double alpha = 1.0;
  double lambda = 1.0;
  double tolerance = 1e-6;
  int max_iterations = 100;
  double novelty_threshold = 0.5;
  double zscore_k = 3.0;
  double labeled_fraction = 0.5;
  int min_hits = 1;
  std::uint64_t seed = 42;

  EmConfig em() const {
    EmConfig config;
    config.max_iterations = max_iterations;
    config.tolerance = tolerance;
    config.lambda = lambda;
    config.alpha = alpha;
    config.seed = seed;
    return config;
  }
};

std::string pretty(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::set<std::string> stopwords_for(const RunConfig& config) {
  return config.stopword_path.empty() ? default_stopwords()
                                      : load_stopwords(config.stopword_path);
}

std::string doc_id_for_row(std::size_t row) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "car-%06zu", row + 1);
  return buf;
}

std::vector<Document> render_all(const std::vector<CarRecord>& records) {
  std::vector<Document> docs;
  docs.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    docs.push_back(render_record(records[i], doc_id_for_row(i)));
  }
  return docs;
}

struct TrainingPools {
  std::vector<CarRecord> records;
  std::vector<Document> labeled;
  std::vector<Document> unlabeled;  // labels stripped
  std::vector<Document> test;
};

TrainingPools make_pools(const RunConfig& config) {
  std::vector<CarRecord> records = load_car_dataset(config.dataset);
  if (records.empty()) {
    throw Error(ErrorKind::InsufficientData, "dataset has no records");
  }
  auto [train_docs, test_docs] = split_dataset(render_all(records), config.seed);

  std::size_t labeled_count = static_cast<std::size_t>(
      std::llround(config.labeled_fraction * static_cast<double>(train_docs.size())));
  labeled_count = std::min(std::max<std::size_t>(labeled_count, 1), train_docs.size());

  TrainingPools pools;
  pools.records = std::move(records);
  pools.labeled.assign(train_docs.begin(), train_docs.begin() + labeled_count);
  for (std::size_t i = labeled_count; i < train_docs.size(); ++i) {
    Document doc = train_docs[i];
    doc.label.reset();
    pools.unlabeled.push_back(std::move(doc));
  }
  pools.test = std::move(test_docs);
  return pools;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::IoError, "cannot write " + path);
  }
  out << content;
}

int cmd_dataset_gen(const RunConfig& config, int rows, const std::string& out_path) {
  const std::vector<CarRecord> records =
      generate_car_records(config.seed, rows);
  write_car_dataset(records, out_path);
  std::cout << "wrote " << records.size() << " records to " << out_path << "\n";
  return 0;
}

int cmd_train(const RunConfig& config, bool supervised_only) {
  TrainingPools pools = make_pools(config);

  std::vector<Document> all_train = pools.labeled;
  all_train.insert(all_train.end(), pools.unlabeled.begin(), pools.unlabeled.end());
  const Vocabulary vocab = build_vocabulary(all_train);

  GenerativeModel model;
  EmTrace trace;
  if (supervised_only) {
    model = train_supervised(pools.labeled, vocab, config.alpha);
    trace.iterations.push_back(EmIteration{
        0, weighted_objective(model, pools.labeled, pools.unlabeled, 0.0), 0.0});
  } else {
    std::tie(model, trace) =
        em_fit(pools.labeled, pools.unlabeled, vocab, config.em());
  }

  fs::create_directories(config.output_dir);
  const std::string model_path = (fs::path(config.output_dir) / "model.ssemc").string();
  save_model(model, model_path);

  std::ostringstream trace_csv;
  trace.write_csv(trace_csv);
  write_text_file((fs::path(config.output_dir) / "trace.csv").string(),
                  trace_csv.str());

  std::string lexicon_text;
  for (const std::string& word : domain_lexicon(pools.records)) {
    lexicon_text += word;
    lexicon_text += '\n';
  }
  write_text_file((fs::path(config.output_dir) / "lexicon.txt").string(),
                  lexicon_text);

  std::cout << "trained " << model.num_classes() << " classes over vocabulary of "
            << model.vocab_size() << " words in "
            << trace.iterations.back().iteration << " iterations\n"
            << "final objective " << pretty(trace.iterations.back().objective)
            << "\nmodel: " << model_path << "\n";
  return 0;
}

int cmd_classify(const RunConfig& config, const std::string& model_path,
                 const std::string& doc_path, const std::string& lexicon_path,
                 const std::string& registry_path, bool spawn) {
  GenerativeModel model = load_model(model_path);

  const RawDocument raw = load_document(doc_path);
  Document doc = tokenize(raw, stopwords_for(config));
  if (doc.tokens.empty()) {
    throw Error(ErrorKind::EmptyDocument,
                doc_path + ": nothing left after tokenization");
  }

  std::set<std::string> lexicon;
  std::string effective_lexicon = lexicon_path;
  if (effective_lexicon.empty()) {
    const fs::path sidecar = fs::path(model_path).parent_path() / "lexicon.txt";
    if (fs::exists(sidecar)) effective_lexicon = sidecar.string();
  }
  if (!effective_lexicon.empty()) {
    lexicon = load_stopwords(effective_lexicon);  // same one-word-per-line format
  } else {
    lexicon.insert(model.vocab.words.begin(), model.vocab.words.end());
  }
  if (!domain_check(doc, lexicon, config.min_hits)) {
    throw Error(ErrorKind::OutOfDomain,
                doc_path + ": no domain vocabulary found, process ended");
  }

  std::vector<std::string> numeric_names;
  for (const auto& [name, stat] : model.attribute_stats) numeric_names.push_back(name);
  mine_numeric_attributes(doc, numeric_names);

  const NoveltyDecision decision =
      detect_novel(model, doc, config.novelty_threshold,
                   zscore_ranges(model, config.zscore_k));

  if (!decision.is_novel) {
    std::cout << raw.source_name << " Known " << decision.known_class << " p="
              << pretty(decision.max_posterior) << "\n";
    return 0;
  }

  if (!decision.out_of_range_attributes.empty()) {
    std::string names;
    for (const std::string& name : decision.out_of_range_attributes) {
      if (!names.empty()) names += ',';
      names += name;
    }
    std::cout << "out-of-range attributes: " << names << "\n";
  }

  if (!spawn) {
    std::cout << raw.source_name << " Novel - p=" << pretty(decision.max_posterior)
              << "\n";
    return 0;
  }

  std::string effective_registry = registry_path;
  if (effective_registry.empty()) {
    effective_registry = model_path + ".registry.csv";
  }
  ClassRegistry registry = fs::exists(effective_registry)
                               ? load_registry(effective_registry)
                               : registry_from_classes(model.classes,
                                                       effective_registry);
  registry.path = effective_registry;

  auto [spawned, name] = spawn_class(model, {doc}, registry);
  save_model(spawned, model_path);
  std::cout << raw.source_name << " Novel " << name << " p="
            << pretty(decision.max_posterior) << "\n"
            << "spawned class " << name << ", registry " << effective_registry
            << "\n";
  return 0;
}

int cmd_evaluate(const RunConfig& config, const std::string& model_path) {
  const GenerativeModel model = load_model(model_path);
  TrainingPools pools = make_pools(config);
  if (pools.test.empty()) {
    throw Error(ErrorKind::EmptyEvaluation, "test split is empty");
  }
  const MetricsReport report = evaluate(model, pools.test);

  std::cout << "accuracy " << pretty(report.accuracy) << "\n";
  for (const auto& [name, m] : report.per_class) {
    std::cout << "class " << name << " precision " << pretty(m.precision)
              << " recall " << pretty(m.recall) << " f1 " << pretty(m.f1) << "\n";
  }
  std::cout << "macro precision " << pretty(report.macro_precision) << " recall "
            << pretty(report.macro_recall) << " f1 " << pretty(report.macro_f1)
            << "\n";

  fs::create_directories(config.output_dir);
  std::ostringstream csv;
  report.write_csv(csv);
  write_text_file((fs::path(config.output_dir) / "metrics.csv").string(),
                  csv.str());
  return 0;
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  std::istringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    sizes.push_back(std::stoi(item));
  }
  return sizes;
}

int cmd_compare(const RunConfig& config, const std::string& sizes_text) {
  TrainingPools pools = make_pools(config);

  std::vector<int> sizes;
  if (!sizes_text.empty()) {
    sizes = parse_sizes(sizes_text);
  } else {
    for (int n : {10, 25, 50, 100, 200, 375, 750}) {
      if (static_cast<std::size_t>(n) <= pools.labeled.size()) sizes.push_back(n);
    }
    if (sizes.empty() ||
        static_cast<std::size_t>(sizes.back()) < pools.labeled.size()) {
      sizes.push_back(static_cast<int>(pools.labeled.size()));
    }
  }

  const ComparisonTable table =
      compare_runs(pools.labeled, pools.unlabeled, pools.test, sizes, config.em());

  for (const ComparisonRow& row : table.rows) {
    std::cout << "n=" << row.n << " acc_sup=" << pretty(row.accuracy_supervised)
              << " acc_semi=" << pretty(row.accuracy_semisupervised)
              << " f1_sup=" << pretty(row.f1_supervised)
              << " f1_semi=" << pretty(row.f1_semisupervised) << "\n";
  }

  fs::create_directories(config.output_dir);
  std::ostringstream csv;
  table.write_csv(csv);
  write_text_file((fs::path(config.output_dir) / "comparison.csv").string(),
                  csv.str());
  return 0;
}

int exit_code_for(const Error& error) {
  switch (error.kind()) {
    case ErrorKind::InvalidFormat:
    case ErrorKind::InvalidEncoding:
    case ErrorKind::EmptyDocument:
      return 3;
    case ErrorKind::OutOfDomain:
      return 4;
    case ErrorKind::IoError:
    case ErrorKind::InsufficientData:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semi-supervised EM text classifier"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key = value configuration file");

  RunConfig config;
  app.add_option("--seed", config.seed, "random seed");
  app.add_option("--output-dir", config.output_dir, "directory for generated files");
  app.add_option("--dataset", config.dataset, "car dataset CSV path");
  app.add_option("--stopwords", config.stopword_path, "stopword file, one word per line");
  app.add_option("--alpha", config.alpha, "additive smoothing");
  app.add_option("--lambda", config.lambda, "unlabeled weight in [0,1]");
  app.add_option("--tolerance", config.tolerance, "relative objective tolerance");
  app.add_option("--max-iterations", config.max_iterations, "EM iteration cap");
  app.add_option("--threshold", config.novelty_threshold, "novelty posterior threshold");
  app.add_option("--zscore-k", config.zscore_k, "z-score range width");
  app.add_option("--labeled-fraction", config.labeled_fraction,
                 "fraction of the train half kept labeled");
  app.add_option("--min-hits", config.min_hits, "domain check: distinct lexicon words required");

  auto* gen = app.add_subcommand("dataset-gen", "generate a synthetic car dataset");
  int rows = 1500;
  std::string gen_out;
  gen->add_option("--rows", rows, "number of records");
  gen->add_option("--out", gen_out, "output CSV path");

  auto* train = app.add_subcommand("train", "train a model from the dataset");
  bool supervised_only = false;
  train->add_flag("--supervised-only", supervised_only,
                  "skip EM and train on the labeled pool alone");

  auto* classify_cmd = app.add_subcommand("classify", "classify one .txt document");
  std::string model_path, doc_path, lexicon_path, registry_path;
  bool spawn = false;
  classify_cmd->add_option("--model", model_path, "model file")->required();
  classify_cmd->add_option("--doc", doc_path, "document to classify")->required();
  classify_cmd->add_option("--lexicon", lexicon_path, "domain lexicon file");
  classify_cmd->add_option("--registry", registry_path, "class registry file");
  classify_cmd->add_flag("--spawn", spawn, "create a new class for novel documents");

  auto* eval_cmd = app.add_subcommand("evaluate", "score the model on the test split");
  std::string eval_model;
  eval_cmd->add_option("--model", eval_model, "model file")->required();

  auto* compare_cmd =
      app.add_subcommand("compare", "supervised vs semi-supervised sweep");
  std::string sizes_text;
  compare_cmd->add_option("--sizes", sizes_text,
                          "comma-separated labeled-set sizes (ascending)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      if (gen_out.empty()) {
        fs::create_directories(config.output_dir);
        gen_out = (fs::path(config.output_dir) / "car_dataset.csv").string();
      }
      return cmd_dataset_gen(config, rows, gen_out);
    }
    if (train->parsed()) {
      if (config.dataset.empty()) {
        std::cerr << "error: --dataset is required for train\n";
        return 2;
      }
      return cmd_train(config, supervised_only);
    }
    if (classify_cmd->parsed()) {
      return cmd_classify(config, model_path, doc_path, lexicon_path,
                          registry_path, spawn);
    }
    if (eval_cmd->parsed()) {
      if (config.dataset.empty()) {
        std::cerr << "error: --dataset is required for evaluate\n";
        return 2;
      }
      return cmd_evaluate(config, eval_model);
    }
    if (compare_cmd->parsed()) {
      if (config.dataset.empty()) {
        std::cerr << "error: --dataset is required for compare\n";
        return 2;
      }
      return cmd_compare(config, sizes_text);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
