#pragma once

#include <vector>

#include "ssemc/corpus.hpp"
#include "ssemc/model.hpp"

namespace ssemc {

/// One WordSet per model class: the vocabulary words observed in that
/// class's labeled documents, with probabilities from the model.
std::vector<WordSet> build_word_sets(const std::vector<Document>& labeled_docs,
                                     const Vocabulary& vocab,
                                     const GenerativeModel& model);

/// For each class whose word set shares at least two distinct in-vocabulary
/// words with the document, reports the intersection and the per-word
/// probabilities. Classes with smaller intersections are omitted.
std::vector<WordSetMatch> match_word_sets(const Document& doc,
                                          const std::vector<WordSet>& sets);

}  // namespace ssemc
