#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ssemc/novelty.hpp"
#include "ssemc/rng.hpp"
#include "support/synthetic.hpp"

using namespace ssemc;
using namespace ssemc::testing;

namespace {

Document make_doc(const std::string& id, const std::vector<std::string>& tokens,
                  std::optional<std::string> label = std::nullopt) {
  Document doc;
  doc.id = id;
  doc.tokens = tokens;
  for (const std::string& t : tokens) doc.token_counts[t] += 1;
  doc.label = std::move(label);
  return doc;
}

void check_normalized(const GenerativeModel& model) {
  double prior_sum = 0.0;
  for (int c = 0; c < model.num_classes(); ++c) {
    prior_sum += std::exp(model.log_priors(c));
  }
  CHECK(prior_sum == doctest::Approx(1.0).epsilon(1e-12));
  for (int c = 0; c < model.num_classes(); ++c) {
    double row = 0.0;
    for (int w = 0; w < model.vocab_size(); ++w) {
      row += std::exp(model.log_conditionals(c, w));
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("zscore_bounds formula and degenerate cases") {
  const std::vector<double> flat = {10.0, 10.0, 10.0};
  const AttributeRange zero = zscore_bounds(flat, 2.0);
  CHECK(zero.low == 10.0);
  CHECK(zero.high == 10.0);

  const std::vector<double> pair = {0.0, 10.0};
  const AttributeRange range = zscore_bounds(pair, 2.0, "price");
  CHECK(range.mean == 5.0);
  CHECK(range.stddev == 5.0);
  CHECK(range.low == -5.0);
  CHECK(range.high == 15.0);
  CHECK(range.attribute == "price");

  const std::vector<double> single = {5.0};
  const AttributeRange point = zscore_bounds(single, 3.0);
  CHECK(point.low == 5.0);
  CHECK(point.high == 5.0);

  try {
    zscore_bounds(std::vector<double>{}, 2.0);
    FAIL("expected EmptyValues");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyValues);
  }
}

TEST_CASE("zscore_bounds matches a brute-force recomputation") {
  Rng rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values;
    const int n = 1 + static_cast<int>(rng.below(20));
    for (int i = 0; i < n; ++i) values.push_back(rng.uniform(-100.0, 100.0));
    const double k = 0.5 + rng.real01() * 4.0;
    const AttributeRange range = zscore_bounds(values, k);

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double stddev = std::sqrt(var / n);

    CHECK(range.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(range.stddev == doctest::Approx(stddev).epsilon(1e-12));
    CHECK(range.low == doctest::Approx(mean - k * stddev).epsilon(1e-12));
    CHECK(range.high == doctest::Approx(mean + k * stddev).epsilon(1e-12));
    CHECK(range.low <= range.high);
  }
}

TEST_CASE("check_ranges flags only strictly out-of-range numeric attributes") {
  AttributeRange price;
  price.attribute = "price";
  price.low = -5.0;
  price.high = 15.0;

  Document in_range = make_doc("d", {});
  in_range.attributes["price"] = 12.0;
  CHECK(check_ranges(in_range, {price}).empty());

  Document boundary = make_doc("d", {});
  boundary.attributes["price"] = 15.0;
  CHECK(check_ranges(boundary, {price}).empty());

  Document outside = make_doc("d", {});
  outside.attributes["price"] = 20.0;
  CHECK(check_ranges(outside, {price}) == std::vector<std::string>{"price"});

  Document no_numeric = make_doc("d", {"text", "only"});
  no_numeric.attributes["kind"] = std::string("sedan");
  CHECK(check_ranges(no_numeric, {price}).empty());
}

TEST_CASE("detect_novel flags evidence-free documents under three classes") {
  Vocabulary vocab;
  vocab.words = {"pa", "pb", "pc"};
  for (int i = 0; i < 3; ++i) vocab.index.emplace(vocab.words[i], i);
  const std::vector<Document> train = {
      make_doc("d1", {"pa"}, "aa"),
      make_doc("d2", {"pb"}, "bb"),
      make_doc("d3", {"pc"}, "cc"),
  };
  const GenerativeModel model = train_supervised(train, vocab, 1.0);

  const Document stranger = make_doc("q", {"zebra", "piano"});
  const NoveltyDecision decision = detect_novel(model, stranger, 0.5, {});
  CHECK(decision.is_novel);
  CHECK(decision.max_posterior == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(decision.out_of_range_attributes.empty());
}

TEST_CASE("detect_novel accepts confident in-range documents") {
  Rng rng(71);
  const CorpusModel truth = disjoint_three_class_model();
  const std::vector<Document> train = sample_corpus(truth, rng, 60, "t");
  const Vocabulary vocab = build_vocabulary(train);
  const GenerativeModel model = train_supervised(train, vocab, 1.0);

  const Document doc = sample_document(truth, rng, "q", true);
  const NoveltyDecision decision = detect_novel(model, doc, 0.5, {});
  CHECK(!decision.is_novel);
  CHECK(decision.known_class == *doc.label);
  CHECK(decision.max_posterior > 0.5);
}

TEST_CASE("detect_novel is novel when any attribute is out of range") {
  Vocabulary vocab;
  vocab.words = {"bad", "good"};
  vocab.index.emplace("bad", 0);
  vocab.index.emplace("good", 1);
  const std::vector<Document> train = {
      make_doc("d1", {"good", "good", "good"}, "g"),
      make_doc("d2", {"bad"}, "u"),
  };
  const GenerativeModel model = train_supervised(train, vocab, 1.0);

  Document doc = make_doc("q", {"good", "good"});
  doc.attributes["price"] = 20.0;
  AttributeRange price;
  price.attribute = "price";
  price.low = -5.0;
  price.high = 15.0;

  const NoveltyDecision in_class = detect_novel(model, doc, 0.5, {});
  CHECK(!in_class.is_novel);
  CHECK(in_class.max_posterior > 0.5);

  const NoveltyDecision out = detect_novel(model, doc, 0.5, {price});
  CHECK(out.is_novel);
  CHECK(out.out_of_range_attributes == std::vector<std::string>{"price"});
  CHECK(out.max_posterior == in_class.max_posterior);
}

TEST_CASE("detect_novel verdict is exactly the stated conjunction") {
  Rng rng(83);
  const CorpusModel truth = disjoint_three_class_model();
  const std::vector<Document> train = sample_corpus(truth, rng, 45, "t");
  const Vocabulary vocab = build_vocabulary(train);
  const GenerativeModel model = train_supervised(train, vocab, 1.0);

  AttributeRange price;
  price.attribute = "price";
  price.low = 0.0;
  price.high = 100.0;

  for (int trial = 0; trial < 200; ++trial) {
    Document doc = sample_document(truth, rng, "q", false);
    if (rng.real01() < 0.3) doc = make_doc("q", {"oov1", "oov2"});
    if (rng.real01() < 0.5) {
      doc.attributes["price"] = rng.uniform(-50.0, 150.0);
    }
    const double threshold = 0.05 + 0.9 * rng.real01();
    const NoveltyDecision decision = detect_novel(model, doc, threshold, {price});

    const Posterior post = posterior(model, doc);
    const bool out_of_range = !check_ranges(doc, {price}).empty();
    const bool expected_known = post.max_prob > threshold && !out_of_range;
    CHECK(decision.is_novel == !expected_known);
    CHECK(decision.max_posterior == post.max_prob);
    if (!decision.is_novel) CHECK(decision.known_class == post.argmax_class);
  }
}

TEST_CASE("detect_novel validates the threshold") {
  Vocabulary vocab;
  vocab.words = {"a"};
  vocab.index.emplace("a", 0);
  const GenerativeModel model =
      train_supervised({make_doc("d", {"a"}, "g")}, vocab, 1.0);
  CHECK_THROWS_AS(detect_novel(model, make_doc("q", {}), 0.0, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(detect_novel(model, make_doc("q", {}), 1.0, {}),
                  std::invalid_argument);
}

TEST_CASE("spawn_class adds novel-1 and renormalizes") {
  Vocabulary vocab;
  vocab.words = {"pa", "pb"};
  vocab.index.emplace("pa", 0);
  vocab.index.emplace("pb", 1);
  const std::vector<Document> train = {
      make_doc("d1", {"pa", "pa"}, "aa"),
      make_doc("d2", {"pb", "pb"}, "bb"),
  };
  const GenerativeModel model = train_supervised(train, vocab, 1.0);

  ClassRegistry registry = registry_from_classes(model.classes);
  const std::vector<Document> novel = {make_doc("n1", {"qq", "qq", "rr", "rr"})};
  const auto [spawned, name] = spawn_class(model, novel, registry);

  CHECK(name == "novel-1");
  CHECK(spawned.num_classes() == model.num_classes() + 1);
  CHECK(spawned.classes == std::vector<std::string>{"aa", "bb", "novel-1"});
  CHECK(registry.contains("novel-1"));
  CHECK(registry.spawned_count() == 1);
  check_normalized(spawned);

  // vocabulary extended with the repeated novel words
  CHECK(spawned.vocab.contains("qq"));
  CHECK(spawned.vocab.contains("rr"));

  // the spawned document now classifies into the new class
  CHECK(classify(spawned, novel[0]).first == "novel-1");

  // a second spawn counts up
  const auto [again, name2] = spawn_class(spawned, {make_doc("n2", {"ss", "ss"})},
                                          registry);
  CHECK(name2 == "novel-2");
  CHECK(registry.spawned_count() == 2);
  check_normalized(again);
}

TEST_CASE("spawn_class drops singleton words and requires documents") {
  Vocabulary vocab;
  vocab.words = {"pa"};
  vocab.index.emplace("pa", 0);
  const GenerativeModel model =
      train_supervised({make_doc("d", {"pa"}, "aa"), make_doc("e", {"pa"}, "bb")},
                       vocab, 1.0);
  ClassRegistry registry = registry_from_classes(model.classes);

  const auto [spawned, name] =
      spawn_class(model, {make_doc("n", {"zz", "zz", "once"})}, registry);
  CHECK(spawned.vocab.contains("zz"));
  CHECK(!spawned.vocab.contains("once"));

  try {
    spawn_class(model, {}, registry);
    FAIL("expected NoDocuments");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoDocuments);
  }
}

TEST_CASE("open-set separation on disjoint synthetic classes") {
  Rng rng(97);
  const CorpusModel truth = disjoint_three_class_model();

  // Balanced training corpus over the first two classes only.
  CorpusModel known = truth;
  known.classes.resize(2);
  known.priors = {1.0, 1.0};
  std::vector<Document> train;
  for (int i = 0; i < 40; ++i) {
    Document doc = sample_document(known, rng, "t" + doc_name(i), true);
    doc.label = known.classes[i % 2].name;  // force exact balance
    // resample tokens from the forced class block
    Document fresh;
    fresh.id = doc.id;
    fresh.label = doc.label;
    const int c = i % 2;
    const int length = 10;
    for (int t = 0; t < length; ++t) {
      const std::size_t w = rng.pick(known.classes[c].word_weights);
      fresh.tokens.push_back(known.words[w]);
      fresh.token_counts[known.words[w]] += 1;
    }
    train.push_back(std::move(fresh));
  }
  const Vocabulary vocab = build_vocabulary(train);
  const GenerativeModel model = train_supervised(train, vocab, 1.0);

  CorpusModel third = truth;
  third.classes = {truth.classes[2]};
  third.priors = {1.0};

  int novel_hits = 0;
  std::vector<Document> novel_docs;
  for (int i = 0; i < 50; ++i) {
    const Document doc = sample_document(third, rng, "h" + doc_name(i), false);
    const NoveltyDecision decision = detect_novel(model, doc, 0.5, {});
    if (decision.is_novel) {
      ++novel_hits;
      novel_docs.push_back(doc);
    }
  }
  CHECK(novel_hits >= 45);  // >= 90%

  int false_novel = 0;
  for (int i = 0; i < 50; ++i) {
    CorpusModel one = truth;
    one.classes = {truth.classes[i % 2]};
    one.priors = {1.0};
    const Document doc = sample_document(one, rng, "k" + doc_name(i), false);
    if (detect_novel(model, doc, 0.5, {}).is_novel) ++false_novel;
  }
  CHECK(false_novel <= 5);  // <= 10%

  ClassRegistry registry = registry_from_classes(model.classes);
  const auto [spawned, name] = spawn_class(model, novel_docs, registry);
  int reclassified = 0;
  for (const Document& doc : novel_docs) {
    if (classify(spawned, doc).first == name) ++reclassified;
  }
  CHECK(reclassified * 10 >= static_cast<int>(novel_docs.size()) * 9);
}
