#include "ssemc/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

namespace ssemc {

namespace {

std::string hex_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", value);
  return buf;
}

double parse_hex_double(const std::string& text, int line_no) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE) {
    throw Error(ErrorKind::CorruptModel,
                "line " + std::to_string(line_no) + ": bad float '" + text + "'");
  }
  return value;
}

// Splits "some class name <num> <num>" into the trailing numbers and the
// name prefix; class names may contain spaces.
void split_name_and_floats(const std::string& line, int line_no, int num_floats,
                           std::string& name, std::vector<double>& values) {
  std::vector<std::string> parts;
  std::istringstream stream(line);
  std::string part;
  while (stream >> part) parts.push_back(part);
  if (static_cast<int>(parts.size()) < num_floats + 1) {
    throw Error(ErrorKind::CorruptModel,
                "line " + std::to_string(line_no) + ": expected name and " +
                    std::to_string(num_floats) + " numbers");
  }
  values.clear();
  for (int i = num_floats; i >= 1; --i) {
    values.push_back(parse_hex_double(parts[parts.size() - i], line_no));
  }
  name.clear();
  for (std::size_t i = 0; i + num_floats < parts.size(); ++i) {
    if (!name.empty()) name += ' ';
    name += parts[i];
  }
}

class FileLock {
 public:
  explicit FileLock(const std::string& path) {
    fd_ = ::open((path + ".lock").c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ >= 0) ::flock(fd_, LOCK_EX);
  }
  ~FileLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

void atomic_write(const std::string& path, const std::string& content) {
  const std::string temp = path + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorKind::IoError, "cannot write " + temp);
    }
    out << content;
    out.flush();
    if (!out) {
      throw Error(ErrorKind::IoError, "write failed for " + temp);
    }
  }
  if (std::rename(temp.c_str(), path.c_str()) != 0) {
    std::remove(temp.c_str());
    throw Error(ErrorKind::IoError,
                "cannot rename " + temp + " to " + path + ": " +
                    std::strerror(errno));
  }
}

struct LineReader {
  std::istream& in;
  int line_no = 0;

  std::string next(const char* what) {
    std::string line;
    if (!std::getline(in, line)) {
      throw Error(ErrorKind::CorruptModel,
                  "line " + std::to_string(line_no + 1) + ": missing " + what);
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }
};

long parse_count(const std::string& line, const std::string& keyword, int line_no) {
  std::istringstream stream(line);
  std::string word;
  long count = -1;
  if (!(stream >> word >> count) || word != keyword || count < 0) {
    throw Error(ErrorKind::CorruptModel,
                "line " + std::to_string(line_no) + ": expected '" + keyword +
                    " <count>'");
  }
  return count;
}

}  // namespace

const char* to_string(ClassOrigin origin) {
  return origin == ClassOrigin::Predefined ? "predefined" : "spawned";
}

ClassOrigin class_origin_from_string(const std::string& text) {
  if (text == "predefined") return ClassOrigin::Predefined;
  if (text == "spawned") return ClassOrigin::Spawned;
  throw Error(ErrorKind::ParseError, "unknown class origin '" + text + "'");
}

bool ClassRegistry::contains(const std::string& name) const {
  return std::any_of(classes.begin(), classes.end(),
                     [&](const ClassEntry& e) { return e.name == name; });
}

int ClassRegistry::spawned_count() const {
  return static_cast<int>(
      std::count_if(classes.begin(), classes.end(), [](const ClassEntry& e) {
        return e.origin == ClassOrigin::Spawned;
      }));
}

ClassRegistry default_registry(std::string path) {
  return registry_from_classes(predefined_car_classes(), std::move(path));
}

ClassRegistry registry_from_classes(const std::vector<std::string>& names,
                                    std::string path) {
  ClassRegistry registry;
  registry.path = std::move(path);
  for (const std::string& name : names) {
    registry.classes.push_back(
        ClassEntry{name, ClassOrigin::Predefined, "1970-01-01T00:00:00Z"});
  }
  return registry;
}

ClassRegistry load_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open registry " + path);
  }
  ClassRegistry registry;
  registry.path = path;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto last = line.rfind(',');
    const auto second_last = last == std::string::npos ? std::string::npos
                                                       : line.rfind(',', last - 1);
    if (last == std::string::npos || second_last == std::string::npos) {
      throw Error(ErrorKind::ParseError,
                  "registry line " + std::to_string(line_no) + ": expected "
                  "name,origin,created_at");
    }
    ClassEntry entry;
    entry.name = line.substr(0, second_last);
    entry.origin = class_origin_from_string(
        line.substr(second_last + 1, last - second_last - 1));
    entry.created_at = line.substr(last + 1);
    if (registry.contains(entry.name)) {
      throw Error(ErrorKind::DuplicateClass,
                  "registry line " + std::to_string(line_no) + ": duplicate '" +
                      entry.name + "'");
    }
    registry.classes.push_back(std::move(entry));
  }
  return registry;
}

void save_registry(const ClassRegistry& registry) {
  if (registry.path.empty()) return;
  FileLock lock(registry.path);
  std::string content;
  for (const ClassEntry& entry : registry.classes) {
    content += entry.name;
    content += ',';
    content += to_string(entry.origin);
    content += ',';
    content += entry.created_at;
    content += '\n';
  }
  atomic_write(registry.path, content);
}

ClassRegistry append_class(const ClassRegistry& registry, const std::string& name,
                           ClassOrigin origin, std::string created_at) {
  if (registry.contains(name)) {
    throw Error(ErrorKind::DuplicateClass, "class '" + name + "' already registered");
  }
  ClassRegistry updated = registry;
  updated.classes.push_back(ClassEntry{
      name, origin,
      created_at.empty() ? current_utc_timestamp() : std::move(created_at)});
  save_registry(updated);
  return updated;
}

std::string current_utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void save_model(const GenerativeModel& model, const std::string& path) {
  std::ostringstream out;
  out << "ssemc-model v1\n";
  out << "alpha " << hex_double(model.smoothing_alpha) << '\n';
  out << "classes " << model.num_classes() << '\n';
  for (int c = 0; c < model.num_classes(); ++c) {
    out << model.classes[c] << ' ' << hex_double(model.log_priors(c)) << ' '
        << hex_double(model.class_weight(c)) << '\n';
  }
  out << "vocabulary " << model.vocab_size() << '\n';
  for (const std::string& word : model.vocab.words) {
    out << word << '\n';
  }
  for (int c = 0; c < model.num_classes(); ++c) {
    out << "conditionals " << model.classes[c] << '\n';
    for (int w = 0; w < model.vocab_size(); ++w) {
      out << model.vocab.words[w] << ' ' << hex_double(model.log_conditionals(c, w))
          << ' ' << hex_double(model.word_weight(c, w)) << '\n';
    }
  }
  out << "attributes " << model.attribute_stats.size() << '\n';
  for (const auto& [name, stat] : model.attribute_stats) {
    out << name << ' ' << hex_double(stat.mean) << ' ' << hex_double(stat.stddev)
        << '\n';
  }
  out << "end\n";
  atomic_write(path, out.str());
}

GenerativeModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open model " + path);
  }
  LineReader reader{in};

  const std::string version = reader.next("version line");
  if (version != "ssemc-model v1") {
    throw Error(ErrorKind::CorruptModel,
                "line 1: unsupported version '" + version + "'");
  }

  GenerativeModel model;
  {
    const std::string line = reader.next("alpha line");
    std::istringstream stream(line);
    std::string word, value;
    if (!(stream >> word >> value) || word != "alpha") {
      throw Error(ErrorKind::CorruptModel,
                  "line " + std::to_string(reader.line_no) + ": expected alpha");
    }
    model.smoothing_alpha = parse_hex_double(value, reader.line_no);
    if (!(model.smoothing_alpha > 0.0)) {
      throw Error(ErrorKind::CorruptModel,
                  "line " + std::to_string(reader.line_no) + ": alpha must be positive");
    }
  }

  const long num_classes =
      parse_count(reader.next("classes header"), "classes", reader.line_no);
  if (num_classes < 1) {
    throw Error(ErrorKind::CorruptModel, "model must have at least one class");
  }
  model.log_priors.resize(num_classes);
  model.class_weight.resize(num_classes);
  for (long c = 0; c < num_classes; ++c) {
    std::string name;
    std::vector<double> values;
    split_name_and_floats(reader.next("class line"), reader.line_no, 2, name, values);
    if (!model.classes.empty() && !(model.classes.back() < name)) {
      throw Error(ErrorKind::CorruptModel,
                  "line " + std::to_string(reader.line_no) +
                      ": classes must be strictly lexicographic");
    }
    model.classes.push_back(name);
    model.log_priors(c) = values[0];
    model.class_weight(c) = values[1];
    if (values[1] < 0.0) {
      throw Error(ErrorKind::CorruptModel,
                  "line " + std::to_string(reader.line_no) + ": negative class weight");
    }
  }

  const long vocab_size =
      parse_count(reader.next("vocabulary header"), "vocabulary", reader.line_no);
  if (vocab_size < 1) {
    throw Error(ErrorKind::CorruptModel, "model must have a non-empty vocabulary");
  }
  for (long w = 0; w < vocab_size; ++w) {
    const std::string word = reader.next("vocabulary word");
    if (word.empty() || (!model.vocab.words.empty() && !(model.vocab.words.back() < word))) {
      throw Error(ErrorKind::CorruptModel,
                  "line " + std::to_string(reader.line_no) +
                      ": vocabulary must be strictly lexicographic");
    }
    model.vocab.index.emplace(word, static_cast<int>(model.vocab.words.size()));
    model.vocab.words.push_back(word);
  }

  model.log_conditionals.resize(num_classes, vocab_size);
  model.word_weight.resize(num_classes, vocab_size);
  for (long c = 0; c < num_classes; ++c) {
    const std::string header = reader.next("conditionals header");
    const std::string expected = "conditionals " + model.classes[c];
    if (header != expected) {
      throw Error(ErrorKind::CorruptModel,
                  "line " + std::to_string(reader.line_no) + ": expected '" +
                      expected + "'");
    }
    for (long w = 0; w < vocab_size; ++w) {
      std::string word;
      std::vector<double> values;
      split_name_and_floats(reader.next("conditional line"), reader.line_no, 2,
                            word, values);
      if (word != model.vocab.words[w]) {
        throw Error(ErrorKind::CorruptModel,
                    "line " + std::to_string(reader.line_no) + ": expected word '" +
                        model.vocab.words[w] + "'");
      }
      model.log_conditionals(c, w) = values[0];
      model.word_weight(c, w) = values[1];
      if (values[1] < 0.0) {
        throw Error(ErrorKind::CorruptModel,
                    "line " + std::to_string(reader.line_no) + ": negative word weight");
      }
    }
  }

  const long num_attributes =
      parse_count(reader.next("attributes header"), "attributes", reader.line_no);
  for (long a = 0; a < num_attributes; ++a) {
    std::string name;
    std::vector<double> values;
    split_name_and_floats(reader.next("attribute line"), reader.line_no, 2, name,
                          values);
    model.attribute_stats[name] = AttributeStat{values[0], values[1]};
  }

  if (reader.next("end marker") != "end") {
    throw Error(ErrorKind::CorruptModel,
                "line " + std::to_string(reader.line_no) + ": missing end marker");
  }

  double prior_sum = 0.0;
  for (long c = 0; c < num_classes; ++c) prior_sum += std::exp(model.log_priors(c));
  if (std::abs(prior_sum - 1.0) > 1e-12) {
    throw Error(ErrorKind::CorruptModel,
                "class priors sum to " + std::to_string(prior_sum) + ", not 1");
  }
  for (long c = 0; c < num_classes; ++c) {
    double row_sum = 0.0;
    for (long w = 0; w < vocab_size; ++w) {
      row_sum += std::exp(model.log_conditionals(c, w));
    }
    if (std::abs(row_sum - 1.0) > 1e-12) {
      throw Error(ErrorKind::CorruptModel,
                  "conditionals for class '" + model.classes[c] + "' sum to " +
                      std::to_string(row_sum) + ", not 1");
    }
  }
  return model;
}

}  // namespace ssemc
