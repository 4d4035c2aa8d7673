#include "ssemc/novelty.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ssemc {

AttributeRange zscore_bounds(std::span<const double> values, double k,
                             std::string attribute) {
  if (values.empty()) {
    throw Error(ErrorKind::EmptyValues, "zscore_bounds needs at least one value");
  }
  if (!(k > 0.0)) {
    throw std::invalid_argument("zscore_bounds: k must be positive");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double variance_sum = 0.0;
  for (double v : values) variance_sum += (v - mean) * (v - mean);
  const double stddev = std::sqrt(variance_sum / static_cast<double>(values.size()));
  AttributeRange range;
  range.attribute = std::move(attribute);
  range.mean = mean;
  range.stddev = stddev;
  range.k = k;
  range.low = mean - k * stddev;
  range.high = mean + k * stddev;
  return range;
}

std::vector<AttributeRange> zscore_ranges(const GenerativeModel& model, double k) {
  if (!(k > 0.0)) {
    throw std::invalid_argument("zscore_ranges: k must be positive");
  }
  std::vector<AttributeRange> ranges;
  for (const auto& [name, stat] : model.attribute_stats) {
    AttributeRange range;
    range.attribute = name;
    range.mean = stat.mean;
    range.stddev = stat.stddev;
    range.k = k;
    range.low = stat.mean - k * stat.stddev;
    range.high = stat.mean + k * stat.stddev;
    ranges.push_back(std::move(range));
  }
  return ranges;
}

std::vector<std::string> check_ranges(const Document& doc,
                                      const std::vector<AttributeRange>& ranges) {
  std::vector<std::string> out_of_range;
  for (const AttributeRange& range : ranges) {
    const auto it = doc.attributes.find(range.attribute);
    if (it == doc.attributes.end()) continue;
    const double* value = std::get_if<double>(&it->second);
    if (!value) continue;
    if (*value < range.low || *value > range.high) {
      out_of_range.push_back(range.attribute);
    }
  }
  return out_of_range;
}

NoveltyDecision detect_novel(const GenerativeModel& model, const Document& doc,
                             double threshold,
                             const std::vector<AttributeRange>& ranges) {
  if (!(threshold > 0.0) || !(threshold < 1.0)) {
    throw std::invalid_argument("detect_novel: threshold must be in (0, 1)");
  }
  const Posterior post = posterior(model, doc);
  NoveltyDecision decision;
  decision.max_posterior = post.max_prob;
  decision.out_of_range_attributes = check_ranges(doc, ranges);
  decision.threshold = threshold;
  if (post.max_prob > threshold && decision.out_of_range_attributes.empty()) {
    decision.is_novel = false;
    decision.known_class = post.argmax_class;
  } else {
    decision.is_novel = true;
  }
  return decision;
}

std::pair<GenerativeModel, std::string> spawn_class(
    const GenerativeModel& model, const std::vector<Document>& docs,
    ClassRegistry& registry) {
  if (docs.empty()) {
    throw Error(ErrorKind::NoDocuments, "spawn_class needs at least one document");
  }
  const std::string name = "novel-" + std::to_string(registry.spawned_count() + 1);
  registry = append_class(registry, name, ClassOrigin::Spawned);

  // Combined counts of the novel documents; words unseen by the old
  // vocabulary are admitted under the usual frequency rule (total >= 2).
  std::map<std::string, long> novel_counts;
  std::map<std::string, long> novel_doc_freq;
  for (const Document& doc : docs) {
    for (const auto& [word, count] : doc.token_counts) {
      novel_counts[word] += count;
      novel_doc_freq[word] += 1;
    }
  }

  Vocabulary vocab = model.vocab;
  std::vector<std::string> added;
  for (const auto& [word, count] : novel_counts) {
    if (vocab.contains(word)) {
      vocab.corpus_frequency[word] += count;
      vocab.doc_frequency[word] += novel_doc_freq[word];
    } else if (count >= 2) {
      added.push_back(word);
      vocab.corpus_frequency[word] = count;
      vocab.doc_frequency[word] = novel_doc_freq[word];
    }
  }
  if (!added.empty()) {
    vocab.words.insert(vocab.words.end(), added.begin(), added.end());
    std::sort(vocab.words.begin(), vocab.words.end());
    vocab.index.clear();
    for (std::size_t i = 0; i < vocab.words.size(); ++i) {
      vocab.index.emplace(vocab.words[i], static_cast<int>(i));
    }
  }

  // Enlarged class list stays lexicographic; remap the old rows.
  std::vector<std::string> classes = model.classes;
  classes.push_back(name);
  std::sort(classes.begin(), classes.end());
  const Eigen::Index num_classes = static_cast<Eigen::Index>(classes.size());
  const Eigen::Index vocab_size = vocab.size();

  Eigen::VectorXd class_weight = Eigen::VectorXd::Zero(num_classes);
  Eigen::MatrixXd word_weight = Eigen::MatrixXd::Zero(num_classes, vocab_size);
  for (int old_c = 0; old_c < model.num_classes(); ++old_c) {
    const auto it = std::find(classes.begin(), classes.end(), model.classes[old_c]);
    const Eigen::Index c = it - classes.begin();
    class_weight(c) = model.class_weight(old_c);
    for (int old_w = 0; old_w < model.vocab_size(); ++old_w) {
      word_weight(c, vocab.find(model.vocab.words[old_w])) =
          model.word_weight(old_c, old_w);
    }
  }
  const auto novel_it = std::find(classes.begin(), classes.end(), name);
  const Eigen::Index novel_c = novel_it - classes.begin();
  class_weight(novel_c) = static_cast<double>(docs.size());
  for (const auto& [word, count] : novel_counts) {
    const int w = vocab.find(word);
    if (w >= 0) word_weight(novel_c, w) += static_cast<double>(count);
  }

  // Attribute statistics keep describing the original training pool; the
  // spawned documents are outliers by the z-score test that routed them here.
  GenerativeModel spawned = model_from_weights(
      std::move(classes), std::move(class_weight), std::move(word_weight),
      std::move(vocab), model.smoothing_alpha, model.attribute_stats);
  return {std::move(spawned), name};
}

}  // namespace ssemc
