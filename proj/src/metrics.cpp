#include "ssemc/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>

namespace ssemc {

namespace {

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void MetricsReport::write_csv(std::ostream& out) const {
  out << "class,precision,recall,f1\n";
  for (const auto& [name, m] : per_class) {
    out << name << ',' << format_value(m.precision) << ',' << format_value(m.recall)
        << ',' << format_value(m.f1) << '\n';
  }
  out << "macro," << format_value(macro_precision) << ','
      << format_value(macro_recall) << ',' << format_value(macro_f1) << '\n';
  out << "accuracy," << format_value(accuracy) << ",,\n";
}

void ComparisonTable::write_csv(std::ostream& out) const {
  out << "n,accuracy_supervised,accuracy_semisupervised,f1_supervised,"
         "f1_semisupervised\n";
  for (const ComparisonRow& row : rows) {
    out << row.n << ',' << format_value(row.accuracy_supervised) << ','
        << format_value(row.accuracy_semisupervised) << ','
        << format_value(row.f1_supervised) << ','
        << format_value(row.f1_semisupervised) << '\n';
  }
}

ConfusionCounts tally(const std::vector<std::pair<std::string, std::string>>& predictions,
                      const std::vector<std::string>& classes) {
  const std::set<std::string> registered(classes.begin(), classes.end());
  ConfusionCounts counts;
  for (const std::string& name : classes) counts.per_class[name];
  counts.total = static_cast<long>(predictions.size());
  for (const auto& [gold, predicted] : predictions) {
    if (!registered.count(gold)) {
      throw Error(ErrorKind::UnknownClass, "gold class '" + gold + "' not registered");
    }
    if (!registered.count(predicted)) {
      throw Error(ErrorKind::UnknownClass,
                  "predicted class '" + predicted + "' not registered");
    }
    for (const std::string& name : classes) {
      ClassCounts& c = counts.per_class[name];
      const bool is_gold = gold == name;
      const bool is_pred = predicted == name;
      if (is_gold && is_pred) ++c.tp;
      else if (is_gold && !is_pred) ++c.fn;
      else if (!is_gold && is_pred) ++c.fp;
      else ++c.tn;
    }
  }
  return counts;
}

double accuracy(const ConfusionCounts& counts) {
  if (counts.total == 0) {
    throw Error(ErrorKind::EmptyEvaluation, "no predictions to score");
  }
  long correct = 0;
  for (const auto& [name, c] : counts.per_class) correct += c.tp;
  return static_cast<double>(correct) / static_cast<double>(counts.total);
}

ClassMetrics precision_recall_f1(const ConfusionCounts& counts,
                                 const std::string& class_name) {
  const auto it = counts.per_class.find(class_name);
  if (it == counts.per_class.end()) {
    throw Error(ErrorKind::UnknownClass, "class '" + class_name + "' not tallied");
  }
  const ClassCounts& c = it->second;
  ClassMetrics m;
  m.precision = (c.tp + c.fp == 0)
                    ? 1.0
                    : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  m.recall = (c.tp + c.fn == 0)
                 ? 1.0
                 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  const long f1_denominator = 2 * c.tp + c.fp + c.fn;
  m.f1 = (f1_denominator == 0)
             ? 1.0
             : static_cast<double>(2 * c.tp) / static_cast<double>(f1_denominator);
  return m;
}

MetricsReport evaluate(const GenerativeModel& model,
                       const std::vector<Document>& test) {
  if (test.empty()) {
    throw Error(ErrorKind::EmptyEvaluation, "empty test set");
  }
  std::vector<std::size_t> order(test.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return test[a].id < test[b].id;
  });

  std::vector<std::pair<std::string, std::string>> predictions;
  predictions.reserve(test.size());
  for (std::size_t idx : order) {
    const Document& doc = test[idx];
    if (!doc.label) {
      throw std::invalid_argument("evaluate: test document '" + doc.id +
                                  "' has no gold label");
    }
    predictions.emplace_back(*doc.label, classify(model, doc).first);
  }

  const ConfusionCounts counts = tally(predictions, model.classes);
  MetricsReport report;
  report.accuracy = accuracy(counts);
  double precision_sum = 0.0, recall_sum = 0.0, f1_sum = 0.0;
  for (const std::string& name : model.classes) {
    const ClassMetrics m = precision_recall_f1(counts, name);
    report.per_class[name] = m;
    precision_sum += m.precision;
    recall_sum += m.recall;
    f1_sum += m.f1;
  }
  const double num_classes = static_cast<double>(model.classes.size());
  report.macro_precision = precision_sum / num_classes;
  report.macro_recall = recall_sum / num_classes;
  report.macro_f1 = f1_sum / num_classes;
  return report;
}

ComparisonTable compare_runs(const std::vector<Document>& labeled,
                             const std::vector<Document>& unlabeled,
                             const std::vector<Document>& test,
                             const std::vector<int>& sizes,
                             const EmConfig& config) {
  config.validate();
  if (sizes.empty()) {
    throw Error(ErrorKind::InsufficientData, "no sizes requested");
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1 || (i > 0 && sizes[i] <= sizes[i - 1])) {
      throw Error(ErrorKind::InsufficientData, "sizes must be positive and ascending");
    }
    if (static_cast<std::size_t>(sizes[i]) > labeled.size()) {
      throw Error(ErrorKind::InsufficientData,
                  "size " + std::to_string(sizes[i]) + " exceeds the " +
                      std::to_string(labeled.size()) + " labeled documents");
    }
  }

  ComparisonTable table;
  for (int n : sizes) {
    const std::vector<Document> subset(labeled.begin(), labeled.begin() + n);

    const Vocabulary supervised_vocab = build_vocabulary(subset);
    const GenerativeModel supervised =
        train_supervised(subset, supervised_vocab, config.alpha);
    const MetricsReport supervised_report = evaluate(supervised, test);

    std::vector<Document> pool = subset;
    pool.insert(pool.end(), unlabeled.begin(), unlabeled.end());
    const Vocabulary semi_vocab = build_vocabulary(pool);
    const auto [semi, trace] = em_fit(subset, unlabeled, semi_vocab, config);
    const MetricsReport semi_report = evaluate(semi, test);

    table.rows.push_back(ComparisonRow{n, supervised_report.accuracy,
                                       semi_report.accuracy,
                                       supervised_report.macro_f1,
                                       semi_report.macro_f1});
  }
  return table;
}

}  // namespace ssemc
