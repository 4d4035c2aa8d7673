#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ssemc/em.hpp"
#include "ssemc/model.hpp"

namespace ssemc {

struct ClassCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;
};

struct ConfusionCounts {
  std::map<std::string, ClassCounts> per_class;
  long total = 0;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::map<std::string, ClassMetrics> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;

  /// CSV: class,precision,recall,f1 rows, then macro and accuracy rows.
  void write_csv(std::ostream& out) const;
};

/// One-vs-rest counting per class over (gold, predicted) pairs.
ConfusionCounts tally(const std::vector<std::pair<std::string, std::string>>& predictions,
                      const std::vector<std::string>& classes);

/// Correct predictions over total predictions.
double accuracy(const ConfusionCounts& counts);

/// precision = tp/(tp+fp), recall = tp/(tp+fn), f1 = 2pr/(p+r).
/// Conventions: a metric whose denominator is zero is 1 (vacuous class);
/// f1 is 0 when p + r = 0. f1 is evaluated as 2tp/(2tp+fp+fn), the
/// single-division form of the same formula, so exact values survive.
ClassMetrics precision_recall_f1(const ConfusionCounts& counts,
                                 const std::string& class_name);

/// Classifies every test document against its gold label and derives the
/// full report. Macro metrics are unweighted means over the model classes.
MetricsReport evaluate(const GenerativeModel& model,
                       const std::vector<Document>& test);

struct ComparisonRow {
  int n = 0;
  double accuracy_supervised = 0.0;
  double accuracy_semisupervised = 0.0;
  double f1_supervised = 0.0;
  double f1_semisupervised = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;

  /// CSV: n,accuracy_supervised,accuracy_semisupervised,f1_supervised,
  /// f1_semisupervised
  void write_csv(std::ostream& out) const;
};

/// For each n in sizes: supervised training on the first n labeled
/// documents vs em_fit on the same n plus all unlabeled documents, both
/// evaluated on the test set. F1 columns carry the macro F1.
ComparisonTable compare_runs(const std::vector<Document>& labeled,
                             const std::vector<Document>& unlabeled,
                             const std::vector<Document>& test,
                             const std::vector<int>& sizes,
                             const EmConfig& config);

}  // namespace ssemc
