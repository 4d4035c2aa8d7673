#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ssemc/model.hpp"
#include "ssemc/rng.hpp"
#include "support/oracles.hpp"
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

Vocabulary vocab_of(const std::vector<std::string>& words) {
  Vocabulary vocab;
  vocab.words = words;
  for (std::size_t i = 0; i < words.size(); ++i) {
    vocab.index.emplace(words[i], static_cast<int>(i));
    vocab.corpus_frequency[words[i]] = 2;
    vocab.doc_frequency[words[i]] = 2;
  }
  return vocab;
}

// The toy corpus used throughout: two docs of class g, one of class u.
struct Toy {
  Vocabulary vocab = vocab_of({"a", "b"});
  std::vector<Document> labeled = {
      make_doc("d1", {"a"}, "g"),
      make_doc("d2", {"a", "b"}, "g"),
      make_doc("d3", {"b"}, "u"),
  };
  GenerativeModel model = train_supervised(labeled, vocab, 1.0);
};

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

TEST_CASE("train_supervised smoothed priors match the count formula") {
  Vocabulary vocab = vocab_of({"a"});
  const std::vector<Document> docs = {
      make_doc("d1", {"a"}, "g"),
      make_doc("d2", {"a"}, "g"),
      make_doc("d3", {"a"}, "u"),
  };
  const GenerativeModel model = train_supervised(docs, vocab, 1.0);
  REQUIRE(model.classes == std::vector<std::string>{"g", "u"});
  CHECK(std::exp(model.log_priors(0)) == doctest::Approx(3.0 / 5.0).epsilon(1e-14));
  CHECK(std::exp(model.log_priors(1)) == doctest::Approx(2.0 / 5.0).epsilon(1e-14));
  check_normalized(model);
}

TEST_CASE("train_supervised smoothed conditionals match the count formula") {
  Vocabulary vocab = vocab_of({"a", "b"});
  const std::vector<Document> docs = {make_doc("d1", {"a"}, "g")};
  const GenerativeModel model = train_supervised(docs, vocab, 1.0);
  CHECK(std::exp(model.log_conditionals(0, 0)) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(std::exp(model.log_conditionals(0, 1)) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("train_supervised with a single class forces prior 1") {
  Vocabulary vocab = vocab_of({"a"});
  const std::vector<Document> docs = {make_doc("d1", {"a"}, "only")};
  const GenerativeModel model = train_supervised(docs, vocab, 0.5);
  CHECK(std::exp(model.log_priors(0)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("train_supervised rejects unlabeled input and missing vocab") {
  Vocabulary vocab = vocab_of({"a"});
  try {
    train_supervised({make_doc("d1", {"a"})}, vocab, 1.0);
    FAIL("expected NoLabeledData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoLabeledData);
  }
  try {
    train_supervised({}, vocab, 1.0);
    FAIL("expected NoLabeledData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoLabeledData);
  }
}

TEST_CASE("log_joint of an empty document is the log prior") {
  Toy toy;
  const Document empty = make_doc("e", {});
  CHECK(log_joint(toy.model, empty, "g") ==
        doctest::Approx(toy.model.log_priors(0)).epsilon(1e-15));
}

TEST_CASE("log_joint ignores out-of-vocabulary words") {
  Toy toy;
  const Document oov = make_doc("o", {"zebra", "quark"});
  CHECK(log_joint(toy.model, oov, "u") == toy.model.log_priors(1));
}

TEST_CASE("log_joint closed form under uniform conditionals") {
  Vocabulary vocab = vocab_of({"a", "b"});
  const std::vector<Document> docs = {make_doc("d1", {"a", "b"}, "g")};
  const GenerativeModel model = train_supervised(docs, vocab, 1.0);
  // both conditionals are (1+1)/(2+2) = 1/2
  const Document doc = make_doc("x", {"a", "b", "a"});
  CHECK(log_joint(model, doc, "g") ==
        doctest::Approx(model.log_priors(0) + 3.0 * std::log(0.5)).epsilon(1e-14));
}

TEST_CASE("log_joint rejects unknown classes") {
  Toy toy;
  try {
    log_joint(toy.model, toy.labeled[0], "nope");
    FAIL("expected UnknownClass");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownClass);
  }
}

TEST_CASE("log_joint doubling a document doubles the evidence term") {
  Toy toy;
  const Document once = make_doc("x", {"a", "b"});
  Document twice = make_doc("y", {"a", "b", "a", "b"});
  const double lp = toy.model.log_priors(0);
  const double evidence_once = log_joint(toy.model, once, "g") - lp;
  const double evidence_twice = log_joint(toy.model, twice, "g") - lp;
  CHECK(evidence_twice == doctest::Approx(2.0 * evidence_once).epsilon(1e-12));
}

TEST_CASE("marginal_log_likelihood trivial cases") {
  Toy toy;
  CHECK(marginal_log_likelihood(toy.model, {}) == 0.0);

  const Document empty_unlabeled = make_doc("e", {});
  CHECK(marginal_log_likelihood(toy.model, {empty_unlabeled}) ==
        doctest::Approx(0.0).epsilon(1e-12));

  const Document labeled = make_doc("l", {"a"}, "g");
  CHECK(marginal_log_likelihood(toy.model, {labeled}) ==
        doctest::Approx(log_joint(toy.model, labeled, "g")).epsilon(1e-15));
}

TEST_CASE("posterior of a symmetric model is exactly one half") {
  Vocabulary vocab = vocab_of({"x", "y"});
  const std::vector<Document> docs = {
      make_doc("d1", {"x"}, "a"),
      make_doc("d2", {"y"}, "b"),
  };
  const GenerativeModel model = train_supervised(docs, vocab, 1.0);
  const Posterior post = posterior(model, make_doc("q", {"x", "y"}));
  CHECK(post.per_class(0) == 0.5);
  CHECK(post.per_class(1) == 0.5);
  CHECK(post.argmax_class == "a");  // lexicographic tie-break
  CHECK(post.max_prob == 0.5);
}

TEST_CASE("posterior of an empty document equals the priors") {
  Toy toy;
  const Posterior post = posterior(toy.model, make_doc("e", {}));
  for (int c = 0; c < toy.model.num_classes(); ++c) {
    CHECK(post.per_class(c) ==
          doctest::Approx(std::exp(toy.model.log_priors(c))).epsilon(1e-12));
  }
}

TEST_CASE("posterior matches the hand-computed toy value") {
  Toy toy;
  // prior g=0.6, cond(a|g)=0.6; prior u=0.4, cond(a|u)=1/3
  const Posterior post = posterior(toy.model, make_doc("q", {"a"}));
  const double joint_g = 0.6 * 0.6;
  const double joint_u = 0.4 * (1.0 / 3.0);
  CHECK(post.prob_of("g") ==
        doctest::Approx(joint_g / (joint_g + joint_u)).epsilon(1e-12));
}

TEST_CASE("classify returns the posterior argmax") {
  Toy toy;
  const auto [winner, post] = classify(toy.model, make_doc("q", {"a"}));
  CHECK(winner == "g");
  CHECK(winner == post.argmax_class);
  // argmax of the posterior equals argmax of the raw joints (scale invariance)
  const Eigen::VectorXd joints = log_joints(toy.model, make_doc("q", {"a"}));
  Eigen::Index best = 0;
  joints.maxCoeff(&best);
  CHECK(toy.model.classes[best] == winner);
}

TEST_CASE("posterior normalization holds on randomized documents") {
  Rng rng(99);
  const CorpusModel truth = two_class_model(rng, 20);
  std::vector<Document> train = sample_corpus(truth, rng, 40, "t");
  const Vocabulary vocab = build_vocabulary(train);
  const GenerativeModel model = train_supervised(train, vocab, 1.0);
  check_normalized(model);

  for (int i = 0; i < 200; ++i) {
    Document doc = sample_document(truth, rng, "q", false);
    if (i % 7 == 0) doc = make_doc("q", {});                // empty
    if (i % 11 == 0) doc = make_doc("q", {"zzz", "qqq"});   // pure OOV
    const Posterior post = posterior(model, doc);
    CHECK(post.per_class.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(post.max_prob == post.per_class.maxCoeff());
  }
}

TEST_CASE("attribute statistics pool over all labeled documents") {
  Vocabulary vocab = vocab_of({"w"});
  Document d1 = make_doc("d1", {"w"}, "a");
  d1.attributes["price"] = 0.0;
  Document d2 = make_doc("d2", {"w"}, "b");
  d2.attributes["price"] = 10.0;
  d2.attributes["kind"] = std::string("sedan");  // categorical: not pooled
  const GenerativeModel model = train_supervised({d1, d2}, vocab, 1.0);
  REQUIRE(model.attribute_stats.count("price") == 1);
  CHECK(model.attribute_stats.at("price").mean == 5.0);
  CHECK(model.attribute_stats.at("price").stddev == 5.0);
  CHECK(model.attribute_stats.count("kind") == 0);
}

TEST_CASE("posterior matches the brute-force oracle on small instances") {
  Rng rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    const int vocab_size = 1 + static_cast<int>(rng.below(5));
    const int num_classes = 2 + static_cast<int>(rng.below(2));
    std::vector<std::string> words;
    for (int w = 0; w < vocab_size; ++w) words.push_back(word_name(w));
    Vocabulary vocab = vocab_of(words);

    std::vector<Document> train;
    for (int c = 0; c < num_classes; ++c) {
      for (int d = 0; d < 2; ++d) {
        std::vector<std::string> tokens;
        const int length = 1 + static_cast<int>(rng.below(4));
        for (int t = 0; t < length; ++t) {
          tokens.push_back(words[rng.below(static_cast<std::uint64_t>(vocab_size))]);
        }
        train.push_back(make_doc("d" + std::to_string(c * 2 + d), tokens,
                                 std::string("c") + static_cast<char>('a' + c)));
      }
    }
    const GenerativeModel model = train_supervised(train, vocab, 0.5 + rng.real01());

    for (int q = 0; q < 20; ++q) {
      std::vector<std::string> tokens;
      const int length = static_cast<int>(rng.below(5));  // 0..4
      for (int t = 0; t < length; ++t) {
        tokens.push_back(words[rng.below(static_cast<std::uint64_t>(vocab_size))]);
      }
      const Document doc = make_doc("q", tokens);
      const Posterior post = posterior(model, doc);
      const std::vector<double> expected = oracle_posterior(model, doc);
      for (int c = 0; c < model.num_classes(); ++c) {
        CHECK(post.per_class(c) == doctest::Approx(expected[c]).epsilon(1e-10));
      }
    }
  }
}
