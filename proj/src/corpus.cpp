#include "ssemc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ssemc {

namespace {

// Decodes one UTF-8 sequence starting at `i`; returns false on any invalid
// byte, overlong encoding, surrogate, or out-of-range codepoint.
bool decode_utf8(std::string_view s, std::size_t& i, std::uint32_t& cp) {
  const auto byte = [&](std::size_t k) {
    return static_cast<std::uint8_t>(s[k]);
  };
  const std::uint8_t b0 = byte(i);
  if (b0 < 0x80) {
    cp = b0;
    i += 1;
    return true;
  }
  int len = 0;
  std::uint32_t value = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    value = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    value = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    value = b0 & 0x07;
  } else {
    return false;
  }
  if (i + len > s.size()) return false;
  for (int k = 1; k < len; ++k) {
    const std::uint8_t b = byte(i + k);
    if ((b & 0xC0) != 0x80) return false;
    value = (value << 6) | (b & 0x3F);
  }
  static const std::uint32_t min_for_len[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (value < min_for_len[len]) return false;           // overlong
  if (value >= 0xD800 && value <= 0xDFFF) return false;  // surrogate
  if (value > 0x10FFFF) return false;
  cp = value;
  i += len;
  return true;
}

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  std::uint32_t cp = 0;
  while (i < s.size()) {
    if (!decode_utf8(s, i, cp)) return false;
  }
  return true;
}

// Non-ASCII codepoints count as word characters unless they fall in a
// common punctuation/separator block. ASCII is classified exactly.
bool is_word_codepoint(std::uint32_t cp) {
  if (cp < 0x80) {
    return std::isalnum(static_cast<unsigned char>(cp)) != 0;
  }
  if (cp == 0xA0) return false;                    // no-break space
  if (cp >= 0xA1 && cp <= 0xBF) return false;      // latin-1 punctuation
  if (cp >= 0x2000 && cp <= 0x206F) return false;  // general punctuation
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  if (cp >= 0xFF01 && cp <= 0xFF0F) return false;
  if (cp >= 0xFF1A && cp <= 0xFF20) return false;
  if (cp >= 0xFF3B && cp <= 0xFF40) return false;
  if (cp >= 0xFF5B && cp <= 0xFF65) return false;
  return true;
}

void append_codepoint_lowered(std::string& out, std::string_view src,
                              std::size_t begin, std::size_t end,
                              std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(cp))));
  } else {
    out.append(src.substr(begin, end - begin));
  }
}

std::string lowercase_ascii(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, int line_no, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError,
                "line " + std::to_string(line_no) + ": bad " + what + " '" +
                    text + "'");
  }
}

}  // namespace

RawDocument validate_document(const std::string& path, std::string_view body) {
  const auto dot = path.find_last_of('.');
  const std::string ext =
      dot == std::string::npos ? "" : lowercase_ascii(path.substr(dot));
  if (ext != ".txt") {
    throw Error(ErrorKind::InvalidFormat,
                path + ": not a .txt document, declared invalid");
  }
  if (!valid_utf8(body)) {
    throw Error(ErrorKind::InvalidEncoding, path + ": body is not valid UTF-8");
  }
  const bool all_space = std::all_of(body.begin(), body.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
  });
  if (body.empty() || all_space) {
    throw Error(ErrorKind::EmptyDocument, path + ": no non-whitespace content");
  }
  std::string name = path;
  const auto slash = name.find_last_of("/\\");
  if (slash != std::string::npos) name = name.substr(slash + 1);
  return RawDocument{name, std::string(body)};
}

RawDocument load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open document " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return validate_document(path, buf.str());
}

Document tokenize(const RawDocument& raw, const std::set<std::string>& stopwords) {
  Document doc;
  doc.id = raw.source_name;
  const std::string_view body = raw.body;
  std::string current;
  const auto flush = [&] {
    if (!current.empty() && stopwords.find(current) == stopwords.end()) {
      doc.tokens.push_back(current);
      doc.token_counts[current] += 1;
    }
    current.clear();
  };
  std::size_t i = 0;
  while (i < body.size()) {
    const std::size_t begin = i;
    std::uint32_t cp = 0;
    // The body was validated at load; decode cannot fail here.
    decode_utf8(body, i, cp);
    if (is_word_codepoint(cp)) {
      append_codepoint_lowered(current, body, begin, i, cp);
    } else {
      flush();
    }
  }
  flush();
  return doc;
}

Vocabulary build_vocabulary(const std::vector<Document>& docs) {
  if (docs.empty()) {
    throw Error(ErrorKind::EmptyVocabulary, "no documents");
  }
  std::map<std::string, long> corpus_freq;
  std::map<std::string, long> doc_freq;
  for (const Document& doc : docs) {
    for (const auto& [word, count] : doc.token_counts) {
      corpus_freq[word] += count;
      doc_freq[word] += 1;
    }
  }
  Vocabulary vocab;
  for (const auto& [word, count] : corpus_freq) {
    if (count >= 2) {
      vocab.index.emplace(word, static_cast<int>(vocab.words.size()));
      vocab.words.push_back(word);
      vocab.corpus_frequency[word] = count;
      vocab.doc_frequency[word] = doc_freq[word];
    }
  }
  if (vocab.words.empty()) {
    throw Error(ErrorKind::EmptyVocabulary,
                "no word occurs more than once in the corpus");
  }
  return vocab;
}

bool domain_check(const Document& doc, const std::set<std::string>& lexicon,
                  int min_hits) {
  int hits = 0;
  for (const auto& [word, count] : doc.token_counts) {
    if (lexicon.count(word)) {
      if (++hits >= min_hits) return true;
    }
  }
  return hits >= min_hits;
}

std::vector<CarRecord> load_car_dataset(const std::string& path, bool strict,
                                        const std::vector<std::string>& known_labels) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open dataset " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::ParseError, "line 1: missing header");
  }
  const std::string expected = "buying,maintenance,price,mileage,safety,class";
  if (trim(line) != expected) {
    throw Error(ErrorKind::ParseError,
                "line 1: expected header '" + expected + "'");
  }
  const std::vector<std::string>& registry =
      known_labels.empty() ? predefined_car_classes() : known_labels;
  std::vector<CarRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 6) {
      throw Error(ErrorKind::ParseError,
                  "line " + std::to_string(line_no) + ": expected 6 fields, got " +
                      std::to_string(fields.size()));
    }
    CarRecord rec;
    rec.buying = lowercase_ascii(trim(fields[0]));
    rec.maintenance = lowercase_ascii(trim(fields[1]));
    rec.price = parse_number(trim(fields[2]), line_no, "price");
    rec.mileage = parse_number(trim(fields[3]), line_no, "mileage");
    rec.safety = lowercase_ascii(trim(fields[4]));
    rec.label = lowercase_ascii(trim(fields[5]));
    if (strict &&
        std::find(registry.begin(), registry.end(), rec.label) == registry.end()) {
      throw Error(ErrorKind::UnknownLabel,
                  "line " + std::to_string(line_no) + ": label '" + rec.label +
                      "' not in the class registry");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_car_dataset(const std::vector<CarRecord>& records,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::IoError, "cannot write dataset " + path);
  }
  out << "buying,maintenance,price,mileage,safety,class\n";
  for (const CarRecord& rec : records) {
    out << rec.buying << ',' << rec.maintenance << ',' << format_numeric(rec.price)
        << ',' << format_numeric(rec.mileage) << ',' << rec.safety << ','
        << rec.label << '\n';
  }
  if (!out) {
    throw Error(ErrorKind::IoError, "write failed for " + path);
  }
}

std::string format_numeric(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

Document render_record(const CarRecord& rec, const std::string& id) {
  std::string text = "buying " + rec.buying + " maintenance " + rec.maintenance +
                     " price " + format_numeric(rec.price) + " mileage " +
                     format_numeric(rec.mileage) + " safety " + rec.safety;
  Document doc = tokenize(RawDocument{id, text}, {});
  doc.id = id;
  doc.label = rec.label;
  doc.attributes["buying"] = rec.buying;
  doc.attributes["maintenance"] = rec.maintenance;
  doc.attributes["price"] = rec.price;
  doc.attributes["mileage"] = rec.mileage;
  doc.attributes["safety"] = rec.safety;
  return doc;
}

std::set<std::string> domain_lexicon(const std::vector<CarRecord>& records) {
  std::set<std::string> lexicon(car_attribute_names().begin(),
                                car_attribute_names().end());
  for (const CarRecord& rec : records) {
    lexicon.insert(rec.buying);
    lexicon.insert(rec.maintenance);
    lexicon.insert(rec.safety);
    lexicon.insert(format_numeric(rec.price));
    lexicon.insert(format_numeric(rec.mileage));
  }
  return lexicon;
}

void mine_numeric_attributes(Document& doc, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i + 1 < doc.tokens.size(); ++i) {
    if (std::find(names.begin(), names.end(), doc.tokens[i]) == names.end()) {
      continue;
    }
    const std::string& next = doc.tokens[i + 1];
    try {
      std::size_t pos = 0;
      const double value = std::stod(next, &pos);
      if (pos == next.size() && !doc.attributes.count(doc.tokens[i])) {
        doc.attributes[doc.tokens[i]] = value;
      }
    } catch (const std::exception&) {
      // not a number; keep scanning
    }
  }
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open stopword file " + path);
  }
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const std::string word = trim(line);
    if (!word.empty()) words.insert(lowercase_ascii(word));
  }
  return words;
}

}  // namespace ssemc
