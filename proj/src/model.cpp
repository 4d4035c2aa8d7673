#include "ssemc/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ssemc/numeric.hpp"

namespace ssemc {

double Posterior::prob_of(const std::string& name) const {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == name) return per_class(static_cast<Eigen::Index>(i));
  }
  throw Error(ErrorKind::UnknownClass, "posterior has no class '" + name + "'");
}

GenerativeModel model_from_weights(std::vector<std::string> classes,
                                   Eigen::VectorXd class_weight,
                                   Eigen::MatrixXd word_weight,
                                   Vocabulary vocab, double alpha,
                                   std::map<std::string, AttributeStat> attribute_stats) {
  if (alpha <= 0.0) {
    throw std::invalid_argument("smoothing alpha must be positive");
  }
  for (std::size_t c = 1; c < classes.size(); ++c) {
    if (!(classes[c - 1] < classes[c])) {
      throw std::invalid_argument("classes must be unique and lexicographic");
    }
  }
  const Eigen::Index num_classes = static_cast<Eigen::Index>(classes.size());
  const Eigen::Index vocab_size = vocab.size();
  if (class_weight.size() != num_classes ||
      word_weight.rows() != num_classes || word_weight.cols() != vocab_size) {
    throw Error(ErrorKind::DimensionMismatch,
                "weight shapes do not match class/vocabulary sizes");
  }

  GenerativeModel model;
  model.classes = std::move(classes);
  model.vocab = std::move(vocab);
  model.smoothing_alpha = alpha;
  model.attribute_stats = std::move(attribute_stats);

  double total_weight = 0.0;
  for (Eigen::Index c = 0; c < num_classes; ++c) total_weight += class_weight(c);
  const double prior_denominator =
      total_weight + alpha * static_cast<double>(num_classes);

  model.log_priors.resize(num_classes);
  model.log_conditionals.resize(num_classes, vocab_size);
  for (Eigen::Index c = 0; c < num_classes; ++c) {
    model.log_priors(c) = std::log((class_weight(c) + alpha) / prior_denominator);
    double class_total = 0.0;
    for (Eigen::Index w = 0; w < vocab_size; ++w) class_total += word_weight(c, w);
    const double cond_denominator =
        class_total + alpha * static_cast<double>(vocab_size);
    for (Eigen::Index w = 0; w < vocab_size; ++w) {
      model.log_conditionals(c, w) =
          std::log((word_weight(c, w) + alpha) / cond_denominator);
    }
  }
  model.class_weight = std::move(class_weight);
  model.word_weight = std::move(word_weight);
  return model;
}

std::map<std::string, AttributeStat> pooled_attribute_stats(
    const std::vector<const Document*>& docs, const std::vector<double>& weights) {
  struct Accumulator {
    double weight = 0.0;
    double weighted_sum = 0.0;
    std::vector<std::pair<double, double>> samples;  // (value, weight)
  };
  std::map<std::string, Accumulator> acc;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    for (const auto& [name, value] : docs[i]->attributes) {
      if (const double* number = std::get_if<double>(&value)) {
        Accumulator& a = acc[name];
        a.weight += w;
        a.weighted_sum += w * *number;
        a.samples.emplace_back(*number, w);
      }
    }
  }
  std::map<std::string, AttributeStat> stats;
  for (const auto& [name, a] : acc) {
    const double mean = a.weighted_sum / a.weight;
    double variance_sum = 0.0;
    for (const auto& [value, w] : a.samples) {
      variance_sum += w * (value - mean) * (value - mean);
    }
    stats[name] = AttributeStat{mean, std::sqrt(variance_sum / a.weight)};
  }
  return stats;
}

namespace {

std::vector<std::size_t> order_by_id(const std::vector<Document>& docs) {
  std::vector<std::size_t> order(docs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return docs[a].id < docs[b].id;
                   });
  return order;
}

}  // namespace

GenerativeModel train_supervised(const std::vector<Document>& labeled,
                                 const Vocabulary& vocab, double alpha) {
  if (labeled.empty()) {
    throw Error(ErrorKind::NoLabeledData, "train_supervised needs labeled documents");
  }
  if (vocab.size() == 0) {
    throw Error(ErrorKind::EmptyVocabulary, "train_supervised needs a vocabulary");
  }
  std::set<std::string> class_set;
  for (const Document& doc : labeled) {
    if (!doc.label) {
      throw Error(ErrorKind::NoLabeledData,
                  "document '" + doc.id + "' has no label");
    }
    class_set.insert(*doc.label);
  }
  std::vector<std::string> classes(class_set.begin(), class_set.end());

  std::map<std::string, int> class_index;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    class_index.emplace(classes[i], static_cast<int>(i));
  }

  Eigen::VectorXd class_weight = Eigen::VectorXd::Zero(classes.size());
  Eigen::MatrixXd word_weight =
      Eigen::MatrixXd::Zero(classes.size(), vocab.size());
  std::vector<const Document*> pool;
  std::vector<double> pool_weights;
  for (std::size_t idx : order_by_id(labeled)) {
    const Document& doc = labeled[idx];
    const int c = class_index.at(*doc.label);
    class_weight(c) += 1.0;
    for (const auto& [word, count] : doc.token_counts) {
      const int w = vocab.find(word);
      if (w >= 0) word_weight(c, w) += static_cast<double>(count);
    }
    pool.push_back(&doc);
    pool_weights.push_back(1.0);
  }
  return model_from_weights(std::move(classes), std::move(class_weight),
                            std::move(word_weight), vocab, alpha,
                            pooled_attribute_stats(pool, pool_weights));
}

double log_joint(const GenerativeModel& model, const Document& doc,
                 int class_idx) {
  double sum = model.log_priors(class_idx);
  // token_counts iterates in word order, keeping the summation reproducible.
  for (const auto& [word, count] : doc.token_counts) {
    const int w = model.vocab.find(word);
    if (w >= 0) {
      sum += static_cast<double>(count) * model.log_conditionals(class_idx, w);
    }
  }
  return sum;
}

double log_joint(const GenerativeModel& model, const Document& doc,
                 const std::string& class_name) {
  const int idx = model.class_index(class_name);
  if (idx < 0) {
    throw Error(ErrorKind::UnknownClass, "class '" + class_name + "' is not registered");
  }
  return log_joint(model, doc, idx);
}

Eigen::VectorXd log_joints(const GenerativeModel& model, const Document& doc) {
  Eigen::VectorXd joints(model.num_classes());
  for (int c = 0; c < model.num_classes(); ++c) {
    joints(c) = log_joint(model, doc, c);
  }
  return joints;
}

double marginal_log_likelihood(const GenerativeModel& model,
                               const std::vector<Document>& docs) {
  double total = 0.0;
  for (const Document& doc : docs) {
    if (doc.label) {
      total += log_joint(model, doc, *doc.label);
    } else {
      total += log_sum_exp(log_joints(model, doc));
    }
  }
  return total;
}

Posterior posterior(const GenerativeModel& model, const Document& doc) {
  const Eigen::VectorXd joints = log_joints(model, doc);
  Posterior post;
  post.classes = model.classes;
  post.per_class.resize(joints.size());
  double max_log = joints(0);
  for (Eigen::Index c = 1; c < joints.size(); ++c) {
    if (joints(c) > max_log) max_log = joints(c);
  }
  double sum = 0.0;
  for (Eigen::Index c = 0; c < joints.size(); ++c) {
    post.per_class(c) = std::exp(joints(c) - max_log);
    sum += post.per_class(c);
  }
  Eigen::Index argmax = 0;
  for (Eigen::Index c = 0; c < joints.size(); ++c) {
    post.per_class(c) /= sum;
    if (post.per_class(c) > post.per_class(argmax)) argmax = c;
  }
  post.argmax_class = post.classes[static_cast<std::size_t>(argmax)];
  post.max_prob = post.per_class(argmax);
  return post;
}

std::pair<std::string, Posterior> classify(const GenerativeModel& model,
                                           const Document& doc) {
  Posterior post = posterior(model, doc);
  std::string winner = post.argmax_class;
  return {std::move(winner), std::move(post)};
}

}  // namespace ssemc
