#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ssemc/model.hpp"

namespace ssemc {

struct EmConfig {
  int max_iterations = 100;
  double tolerance = 1e-6;  // relative objective change
  double lambda = 1.0;      // unlabeled weight in [0, 1]
  double alpha = 1.0;       // additive smoothing
  std::uint64_t seed = 0;
  bool check_q_improvement = false;  // assert Q(next|cur) >= Q(cur|cur) each step

  void validate() const;
};

/// Per-unlabeled-document class posteriors under the current model.
/// Each row sums to 1.
struct Responsibilities {
  std::vector<std::string> doc_ids;
  std::vector<std::string> classes;
  Eigen::MatrixXd matrix;  // docs x classes
};

struct EmIteration {
  int iteration;
  double objective;        // penalized weighted log likelihood
  double max_resp_change;  // max abs responsibility change vs previous E-step
};

struct EmTrace {
  std::vector<EmIteration> iterations;

  /// CSV: iteration,objective,max_resp_change
  void write_csv(std::ostream& out) const;
};

Responsibilities e_step(const GenerativeModel& model,
                        const std::vector<Document>& unlabeled);

/// Re-estimates the model from weighted counts: labeled documents carry
/// weight 1 to their gold class, unlabeled document d carries
/// lambda * resp(d, c) to class c. Accumulation runs over documents sorted
/// by id so traces are reproducible.
GenerativeModel m_step(const std::vector<Document>& labeled,
                       const std::vector<Document>& unlabeled,
                       const Responsibilities& resp, const Vocabulary& vocab,
                       const EmConfig& config);

/// The Dirichlet-MAP term matching the smoothing:
/// alpha * (sum_c log prior_c + sum_{c,w} log cond_cw). Including it in the
/// objective makes EM monotonicity exact for the smoothed M-step.
double log_prior_penalty(const GenerativeModel& model);

/// sum_labeled log p(doc, label) + lambda * sum_unlabeled log sum_c p(doc, c)
/// + log_prior_penalty(model).
double weighted_objective(const GenerativeModel& model,
                          const std::vector<Document>& labeled,
                          const std::vector<Document>& unlabeled,
                          double lambda);

/// Expected complete-data objective of `candidate` under `current`'s
/// responsibilities (penalty included).
double q_function(const GenerativeModel& candidate,
                  const GenerativeModel& current,
                  const std::vector<Document>& labeled,
                  const std::vector<Document>& unlabeled, double lambda);

/// Initializes from the labeled documents, then alternates E and M steps
/// until the relative objective change drops below config.tolerance or
/// max_iterations is reached. The trace records the objective after every
/// M-step (iteration 0 is the initial model). Throws NonMonotoneObjective
/// if the objective ever decreases by more than 1e-9 — that signals an
/// implementation bug, not a data condition.
std::pair<GenerativeModel, EmTrace> em_fit(const std::vector<Document>& labeled,
                                           const std::vector<Document>& unlabeled,
                                           const Vocabulary& vocab,
                                           const EmConfig& config);

}  // namespace ssemc
