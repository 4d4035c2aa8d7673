#include "ssemc/em.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include "ssemc/numeric.hpp"

namespace ssemc {

void EmConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda must be in [0, 1]");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
}

void EmTrace::write_csv(std::ostream& out) const {
  out << "iteration,objective,max_resp_change\n";
  char buf[128];
  for (const EmIteration& it : iterations) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", it.iteration,
                  it.objective, it.max_resp_change);
    out << buf;
  }
}

Responsibilities e_step(const GenerativeModel& model,
                        const std::vector<Document>& unlabeled) {
  Responsibilities resp;
  resp.classes = model.classes;
  resp.doc_ids.reserve(unlabeled.size());
  resp.matrix.resize(static_cast<Eigen::Index>(unlabeled.size()),
                     model.num_classes());
  for (std::size_t d = 0; d < unlabeled.size(); ++d) {
    resp.doc_ids.push_back(unlabeled[d].id);
    const Posterior post = posterior(model, unlabeled[d]);
    resp.matrix.row(static_cast<Eigen::Index>(d)) = post.per_class.transpose();
  }
  return resp;
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

GenerativeModel m_step(const std::vector<Document>& labeled,
                       const std::vector<Document>& unlabeled,
                       const Responsibilities& resp, const Vocabulary& vocab,
                       const EmConfig& config) {
  config.validate();
  if (static_cast<std::size_t>(resp.matrix.rows()) != unlabeled.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "responsibilities have " + std::to_string(resp.matrix.rows()) +
                    " rows for " + std::to_string(unlabeled.size()) +
                    " unlabeled documents");
  }

  // Class set comes from the responsibilities; with no unlabeled documents
  // (or a default-constructed matrix) it falls back to the labels observed,
  // which reduces m_step to supervised training.
  std::vector<std::string> classes = resp.classes;
  if (classes.empty()) {
    std::set<std::string> class_set;
    for (const Document& doc : labeled) {
      if (doc.label) class_set.insert(*doc.label);
    }
    classes.assign(class_set.begin(), class_set.end());
  }
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
    if (!doc.label) {
      throw Error(ErrorKind::NoLabeledData,
                  "document '" + doc.id + "' in the labeled set has no label");
    }
    const auto it = class_index.find(*doc.label);
    if (it == class_index.end()) {
      throw Error(ErrorKind::UnknownClass,
                  "label '" + *doc.label + "' is not in the class set");
    }
    const int c = it->second;
    class_weight(c) += 1.0;
    for (const auto& [word, count] : doc.token_counts) {
      const int w = vocab.find(word);
      if (w >= 0) word_weight(c, w) += static_cast<double>(count);
    }
    pool.push_back(&doc);
    pool_weights.push_back(1.0);
  }

  if (config.lambda > 0.0 && !unlabeled.empty()) {
    for (std::size_t idx : order_by_id(unlabeled)) {
      const Document& doc = unlabeled[idx];
      const Eigen::Index row = static_cast<Eigen::Index>(idx);
      for (std::size_t c = 0; c < classes.size(); ++c) {
        const double w = config.lambda * resp.matrix(row, static_cast<Eigen::Index>(c));
        class_weight(static_cast<Eigen::Index>(c)) += w;
        for (const auto& [word, count] : doc.token_counts) {
          const int v = vocab.find(word);
          if (v >= 0) {
            word_weight(static_cast<Eigen::Index>(c), v) +=
                w * static_cast<double>(count);
          }
        }
      }
      pool.push_back(&doc);
      pool_weights.push_back(config.lambda);
    }
  }

  return model_from_weights(std::move(classes), std::move(class_weight),
                            std::move(word_weight), vocab, config.alpha,
                            pooled_attribute_stats(pool, pool_weights));
}

double log_prior_penalty(const GenerativeModel& model) {
  double sum = 0.0;
  for (Eigen::Index c = 0; c < model.log_priors.size(); ++c) {
    sum += model.log_priors(c);
  }
  for (Eigen::Index c = 0; c < model.log_conditionals.rows(); ++c) {
    for (Eigen::Index w = 0; w < model.log_conditionals.cols(); ++w) {
      sum += model.log_conditionals(c, w);
    }
  }
  return model.smoothing_alpha * sum;
}

double weighted_objective(const GenerativeModel& model,
                          const std::vector<Document>& labeled,
                          const std::vector<Document>& unlabeled,
                          double lambda) {
  double objective = 0.0;
  for (const Document& doc : labeled) {
    if (!doc.label) {
      throw Error(ErrorKind::NoLabeledData,
                  "document '" + doc.id + "' in the labeled set has no label");
    }
    objective += log_joint(model, doc, *doc.label);
  }
  if (lambda > 0.0) {
    double unlabeled_term = 0.0;
    for (const Document& doc : unlabeled) {
      unlabeled_term += log_sum_exp(log_joints(model, doc));
    }
    objective += lambda * unlabeled_term;
  }
  return objective + log_prior_penalty(model);
}

double q_function(const GenerativeModel& candidate,
                  const GenerativeModel& current,
                  const std::vector<Document>& labeled,
                  const std::vector<Document>& unlabeled, double lambda) {
  if (candidate.classes != current.classes ||
      candidate.vocab.words != current.vocab.words) {
    throw Error(ErrorKind::ClassSetMismatch,
                "candidate and current models must share classes and vocabulary");
  }
  double q = 0.0;
  for (const Document& doc : labeled) {
    if (!doc.label) {
      throw Error(ErrorKind::NoLabeledData,
                  "document '" + doc.id + "' in the labeled set has no label");
    }
    q += log_joint(candidate, doc, *doc.label);
  }
  if (lambda > 0.0) {
    double expectation = 0.0;
    for (const Document& doc : unlabeled) {
      const Posterior post = posterior(current, doc);
      for (int c = 0; c < candidate.num_classes(); ++c) {
        expectation += post.per_class(c) * log_joint(candidate, doc, c);
      }
    }
    q += lambda * expectation;
  }
  return q + log_prior_penalty(candidate);
}

std::pair<GenerativeModel, EmTrace> em_fit(const std::vector<Document>& labeled,
                                           const std::vector<Document>& unlabeled,
                                           const Vocabulary& vocab,
                                           const EmConfig& config) {
  config.validate();
  if (labeled.empty()) {
    throw Error(ErrorKind::NoLabeledData, "em_fit needs labeled documents");
  }

  GenerativeModel model = train_supervised(labeled, vocab, config.alpha);
  EmTrace trace;
  double objective = weighted_objective(model, labeled, unlabeled, config.lambda);
  trace.iterations.push_back(EmIteration{0, objective, 0.0});

  Eigen::MatrixXd previous_resp;
  bool have_previous_resp = false;

  for (int t = 1; t <= config.max_iterations; ++t) {
    const Responsibilities resp = e_step(model, unlabeled);
    double resp_change = 0.0;
    if (have_previous_resp) {
      resp_change = (resp.matrix - previous_resp).cwiseAbs().maxCoeff();
    } else if (resp.matrix.size() > 0) {
      resp_change = 1.0;  // no predecessor for the first E-step
    }
    previous_resp = resp.matrix;
    have_previous_resp = resp.matrix.size() > 0;

    GenerativeModel next = m_step(labeled, unlabeled, resp, vocab, config);
    if (config.check_q_improvement) {
      const double q_next = q_function(next, model, labeled, unlabeled, config.lambda);
      const double q_cur = q_function(model, model, labeled, unlabeled, config.lambda);
      if (q_next < q_cur - 1e-9) {
        throw Error(ErrorKind::NonMonotoneObjective,
                    "Q decreased at iteration " + std::to_string(t));
      }
    }
    const double next_objective =
        weighted_objective(next, labeled, unlabeled, config.lambda);
    if (next_objective < objective - 1e-9) {
      throw Error(ErrorKind::NonMonotoneObjective,
                  "objective decreased from " + std::to_string(objective) +
                      " to " + std::to_string(next_objective) + " at iteration " +
                      std::to_string(t));
    }
    trace.iterations.push_back(EmIteration{t, next_objective, resp_change});
    model = std::move(next);

    const double change = std::abs(next_objective - objective);
    objective = next_objective;
    if (change <= config.tolerance * std::max(1.0, std::abs(objective))) {
      break;
    }
  }
  return {std::move(model), std::move(trace)};
}

}  // namespace ssemc
