#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ssemc/corpus.hpp"

namespace ssemc {

struct AttributeStat {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

/// Multinomial naive Bayes parameters in log space, plus the (possibly
/// fractional) training weights they were estimated from. Keeping the
/// weights makes class spawning an exact re-estimation instead of a patch.
/// Immutable after construction; all inference paths are read-only.
struct GenerativeModel {
  std::vector<std::string> classes;   // lexicographic
  Eigen::VectorXd log_priors;         // C
  Eigen::MatrixXd log_conditionals;   // C x V, rows normalize to 1 under exp
  Eigen::VectorXd class_weight;       // C, document weight per class
  Eigen::MatrixXd word_weight;        // C x V, word weight per class
  Vocabulary vocab;
  double smoothing_alpha = 1.0;
  std::map<std::string, AttributeStat> attribute_stats;

  int num_classes() const { return static_cast<int>(classes.size()); }
  int vocab_size() const { return vocab.size(); }

  int class_index(const std::string& name) const {
    for (std::size_t i = 0; i < classes.size(); ++i) {
      if (classes[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

struct Posterior {
  std::vector<std::string> classes;
  Eigen::VectorXd per_class;  // sums to 1
  std::string argmax_class;   // lexicographic tie-break
  double max_prob = 0.0;

  double prob_of(const std::string& name) const;
};

/// Smoothed multinomial estimates from the weighted counts:
///   prior(c) = (W_c + alpha) / (sum W + alpha C)
///   cond(w|c) = (T_cw + alpha) / (sum_w T_cw + alpha V)
GenerativeModel model_from_weights(std::vector<std::string> classes,
                                   Eigen::VectorXd class_weight,
                                   Eigen::MatrixXd word_weight,
                                   Vocabulary vocab, double alpha,
                                   std::map<std::string, AttributeStat> attribute_stats);

/// Weighted class-independent pooling of numeric attribute values;
/// zero-weight documents are skipped entirely.
std::map<std::string, AttributeStat> pooled_attribute_stats(
    const std::vector<const Document*>& docs, const std::vector<double>& weights);

/// Classic supervised training: every document contributes weight 1 to its
/// gold class. Classes are the distinct labels observed, sorted.
GenerativeModel train_supervised(const std::vector<Document>& labeled,
                                 const Vocabulary& vocab, double alpha);

/// log p(doc, class) = log prior + sum over in-vocabulary words of
/// count * log cond. Out-of-vocabulary words are ignored.
double log_joint(const GenerativeModel& model, const Document& doc,
                 int class_idx);
double log_joint(const GenerativeModel& model, const Document& doc,
                 const std::string& class_name);

/// All per-class joints of one document, in class order.
Eigen::VectorXd log_joints(const GenerativeModel& model, const Document& doc);

/// Sum over documents of log p(doc): labeled documents contribute their
/// single-class joint, unlabeled ones the log-sum-exp marginal.
double marginal_log_likelihood(const GenerativeModel& model,
                               const std::vector<Document>& docs);

Posterior posterior(const GenerativeModel& model, const Document& doc);

std::pair<std::string, Posterior> classify(const GenerativeModel& model,
                                           const Document& doc);

}  // namespace ssemc
