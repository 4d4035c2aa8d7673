#pragma once

#include <string>
#include <vector>

#include "ssemc/model.hpp"

namespace ssemc {

enum class ClassOrigin { Predefined, Spawned };

const char* to_string(ClassOrigin origin);
ClassOrigin class_origin_from_string(const std::string& text);

struct ClassEntry {
  std::string name;
  ClassOrigin origin = ClassOrigin::Predefined;
  std::string created_at;  // ISO 8601 UTC
};

/// Ordered class registry, optionally backed by a file. With an empty path
/// the registry is purely in-memory and never persisted.
struct ClassRegistry {
  std::string path;
  std::vector<ClassEntry> classes;

  bool contains(const std::string& name) const;
  int spawned_count() const;
};

/// The three predefined car-evaluation classes.
ClassRegistry default_registry(std::string path = {});

/// Registry over an arbitrary class list, all marked Predefined.
ClassRegistry registry_from_classes(const std::vector<std::string>& names,
                                    std::string path = {});

/// File format: one `name,origin,created_at_iso8601` line per class.
ClassRegistry load_registry(const std::string& path);

/// Atomic write (temp file in the same directory, then rename) under an
/// exclusive advisory lock. A crash mid-write leaves the old file intact.
void save_registry(const ClassRegistry& registry);

/// Returns the registry with the class appended; persists when the registry
/// is file-backed. Empty created_at means "now".
ClassRegistry append_class(const ClassRegistry& registry, const std::string& name,
                           ClassOrigin origin, std::string created_at = {});

std::string current_utc_timestamp();

/// Canonical text format, first line `ssemc-model v1`. All probabilities
/// and weights are written as hexadecimal floats so load(save(m)) is
/// bit-identical. Write is atomic (temp + rename).
void save_model(const GenerativeModel& model, const std::string& path);

/// Re-verifies every model invariant (version, normalization, shapes) and
/// reports CorruptModel with a line number when one fails.
GenerativeModel load_model(const std::string& path);

}  // namespace ssemc
