#include "ssemc/word_sets.hpp"

#include <cmath>

namespace ssemc {

std::vector<WordSet> build_word_sets(const std::vector<Document>& labeled_docs,
                                     const Vocabulary& vocab,
                                     const GenerativeModel& model) {
  std::vector<WordSet> sets;
  sets.reserve(model.classes.size());
  for (const std::string& name : model.classes) {
    sets.push_back(WordSet{name, {}, {}});
  }
  for (const Document& doc : labeled_docs) {
    if (!doc.label) continue;
    const int c = model.class_index(*doc.label);
    if (c < 0) {
      throw Error(ErrorKind::UnknownClass,
                  "document '" + doc.id + "' labeled with unregistered class '" +
                      *doc.label + "'");
    }
    WordSet& set = sets[static_cast<std::size_t>(c)];
    for (const auto& [word, count] : doc.token_counts) {
      const int w = vocab.find(word);
      if (w < 0) continue;
      set.words.insert(word);
      set.probabilities[word] = std::exp(model.log_conditionals(c, w));
    }
  }
  return sets;
}

std::vector<WordSetMatch> match_word_sets(const Document& doc,
                                          const std::vector<WordSet>& sets) {
  std::vector<WordSetMatch> matches;
  for (const WordSet& set : sets) {
    WordSetMatch match;
    match.class_name = set.class_name;
    for (const auto& [word, count] : doc.token_counts) {
      auto it = set.words.find(word);
      if (it != set.words.end()) {
        match.matched_words.push_back(word);
        match.matched_probabilities.push_back(set.probabilities.at(word));
      }
    }
    // "containing items more than one": subset matches need size >= 2
    if (match.matched_words.size() >= 2) {
      matches.push_back(std::move(match));
    }
  }
  return matches;
}

}  // namespace ssemc
