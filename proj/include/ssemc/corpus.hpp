#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ssemc/errors.hpp"
#include "ssemc/rng.hpp"

namespace ssemc {

/// A document that passed format validation but has not been tokenized.
struct RawDocument {
  std::string source_name;
  std::string body;  // guaranteed valid UTF-8
};

using AttributeValue = std::variant<double, std::string>;

struct Document {
  std::string id;
  std::vector<std::string> tokens;            // lowercased, in text order
  std::map<std::string, long> token_counts;   // multiset summary of tokens
  std::optional<std::string> label;
  std::map<std::string, AttributeValue> attributes;

  long count(const std::string& word) const {
    auto it = token_counts.find(word);
    return it == token_counts.end() ? 0 : it->second;
  }
};

/// Words admitted by the frequency rule (total corpus occurrences >= 2),
/// kept in lexicographic order so every downstream index is deterministic.
struct Vocabulary {
  std::vector<std::string> words;
  std::map<std::string, int> index;
  std::map<std::string, long> doc_frequency;
  std::map<std::string, long> corpus_frequency;

  int size() const { return static_cast<int>(words.size()); }

  int find(const std::string& word) const {
    auto it = index.find(word);
    return it == index.end() ? -1 : it->second;
  }

  bool contains(const std::string& word) const { return find(word) >= 0; }
};

/// Per-class collection of observed vocabulary words with their conditional
/// probabilities under the trained model.
struct WordSet {
  std::string class_name;
  std::set<std::string> words;
  std::map<std::string, double> probabilities;
};

struct WordSetMatch {
  std::string class_name;
  std::vector<std::string> matched_words;      // sorted
  std::vector<double> matched_probabilities;   // aligned with matched_words
};

struct CarRecord {
  std::string buying;
  std::string maintenance;
  double price = 0.0;
  double mileage = 0.0;
  std::string safety;
  std::string label;

  bool operator==(const CarRecord&) const = default;
};

inline const std::vector<std::string>& car_attribute_names() {
  static const std::vector<std::string> names = {"buying", "maintenance",
                                                 "price", "mileage", "safety"};
  return names;
}

inline const std::vector<std::string>& predefined_car_classes() {
  static const std::vector<std::string> classes = {"good", "unacceptable",
                                                   "very good"};
  return classes;
}

/// Bundled English stopword list; override with load_stopwords().
const std::set<std::string>& default_stopwords();

/// One word per line, UTF-8; blank lines ignored.
std::set<std::string> load_stopwords(const std::string& path);

/// Accepts the document iff the path ends in .txt (case-insensitive), the
/// body is valid UTF-8 and it contains at least one non-whitespace byte.
RawDocument validate_document(const std::string& path, std::string_view body);

/// Reads the file and runs validate_document on its contents.
RawDocument load_document(const std::string& path);

/// Splits the body into maximal runs of letters/digits (punctuation and
/// whitespace separate tokens), lowercases ASCII, and drops stopwords.
Document tokenize(const RawDocument& raw, const std::set<std::string>& stopwords);

/// Admits every word whose total occurrence count across the corpus is >= 2.
Vocabulary build_vocabulary(const std::vector<Document>& docs);

/// True iff the document mentions at least min_hits distinct lexicon words.
bool domain_check(const Document& doc, const std::set<std::string>& lexicon,
                  int min_hits = 1);

std::vector<CarRecord> load_car_dataset(const std::string& path,
                                        bool strict = false,
                                        const std::vector<std::string>& known_labels = {});

void write_car_dataset(const std::vector<CarRecord>& records,
                       const std::string& path);

/// "buying <v> maintenance <v> price <v> mileage <v> safety <v>", tokenized
/// with no stopword removal; carries the record's label and attributes.
Document render_record(const CarRecord& rec, const std::string& id);

/// Attribute names plus every attribute value observed in the records,
/// rendered the same way render_record renders them.
std::set<std::string> domain_lexicon(const std::vector<CarRecord>& records);

/// Canonical text for a numeric attribute value (integers print bare).
std::string format_numeric(double value);

/// Scans the token stream for `<name> <number>` pairs and records them as
/// numeric attributes, so free-text documents can be range-checked the same
/// way rendered records are. Existing attribute entries are not overwritten.
void mine_numeric_attributes(Document& doc, const std::vector<std::string>& names);

/// Seeded shuffle, then the first ceil(n/2) items are train and the rest
/// test. No item is duplicated or dropped.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_dataset(
    const std::vector<T>& items, std::uint64_t seed) {
  if (items.empty()) {
    throw Error(ErrorKind::InsufficientData, "split_dataset: empty input");
  }
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const std::size_t train_size = (items.size() + 1) / 2;
  std::pair<std::vector<T>, std::vector<T>> out;
  out.first.reserve(train_size);
  out.second.reserve(items.size() - train_size);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < train_size ? out.first : out.second).push_back(items[order[i]]);
  }
  return out;
}

}  // namespace ssemc
