#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ssemc/model.hpp"
#include "ssemc/store.hpp"

namespace ssemc {

/// Interval mean +/- k*std inside which a numeric attribute is considered
/// normal.
struct AttributeRange {
  std::string attribute;
  double mean = 0.0;
  double stddev = 0.0;  // population
  double k = 0.0;
  double low = 0.0;
  double high = 0.0;
};

struct NoveltyDecision {
  bool is_novel = false;
  std::string known_class;  // argmax class when not novel, empty otherwise
  double max_posterior = 0.0;
  std::vector<std::string> out_of_range_attributes;
  double threshold = 0.0;
};

/// Population mean/std of the values with bounds mean +/- k*std. A zero
/// standard deviation yields the degenerate range [mean, mean].
AttributeRange zscore_bounds(std::span<const double> values, double k,
                             std::string attribute = {});

/// Ranges derived from the model's pooled attribute statistics.
std::vector<AttributeRange> zscore_ranges(const GenerativeModel& model, double k);

/// Names of the document's numeric attributes lying strictly outside their
/// range. Attributes without a range, and ranges without a document value,
/// are skipped.
std::vector<std::string> check_ranges(const Document& doc,
                                      const std::vector<AttributeRange>& ranges);

/// Known(argmax) iff the max posterior strictly exceeds the threshold and
/// no numeric attribute is out of range; Novel otherwise. The posterior
/// must clear the threshold, not merely meet it: an evidence-free document
/// under two balanced classes sits exactly at 0.5 and is not a fit.
NoveltyDecision detect_novel(const GenerativeModel& model, const Document& doc,
                             double threshold,
                             const std::vector<AttributeRange>& ranges);

/// Creates class `novel-<n>` (n = 1 + previously spawned classes), extends
/// the vocabulary with the documents' qualifying words, re-estimates every
/// prior and conditional over the enlarged class set with the documents
/// counted as labeled members of the new class, and appends the class to
/// the registry (persisting it when the registry is file-backed).
std::pair<GenerativeModel, std::string> spawn_class(
    const GenerativeModel& model, const std::vector<Document>& docs,
    ClassRegistry& registry);

}  // namespace ssemc
