#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "lpcode/errors.hpp"
#include "lpcode/types.hpp"

namespace lpcode {

namespace detail {

inline std::string required_string(const nlohmann::json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    throw FormatError("line " + std::to_string(line) + ": missing string field '" + key + "'");
  return it->get<std::string>();
}

}  // namespace detail

inline nlohmann::json to_json(const SourceUnit& u) {
  return {{"id", u.id},
          {"language", to_string(u.language)},
          {"generator", to_string(u.generator)},
          {"origin_id", u.origin_id},
          {"text", u.text}};
}

/// Parses one JSONL record. `line` only feeds error messages.
inline SourceUnit unit_from_json(const nlohmann::json& obj, std::size_t line = 0) {
  if (!obj.is_object()) throw FormatError("line " + std::to_string(line) + ": not a JSON object");
  SourceUnit u;
  u.id = detail::required_string(obj, "id", line);
  auto lang = detail::required_string(obj, "language", line);
  auto gen = detail::required_string(obj, "generator", line);
  auto l = language_from_string(lang);
  if (!l) throw FormatError("line " + std::to_string(line) + ": unknown language '" + lang + "'");
  auto g = generator_from_string(gen);
  if (!g) throw FormatError("line " + std::to_string(line) + ": unknown generator '" + gen + "'");
  u.language = *l;
  u.generator = *g;
  if (auto it = obj.find("origin_id"); it != obj.end() && !it->is_null()) {
    if (!it->is_string())
      throw FormatError("line " + std::to_string(line) + ": origin_id must be a string");
    u.origin_id = it->get<std::string>();
  }
  u.text = detail::required_string(obj, "text", line);
  try {
    u.validate();
  } catch (const InvalidUnit& e) {
    throw FormatError("line " + std::to_string(line) + ": " + e.what());
  }
  return u;
}

/// Reads a corpus, one unit per non-blank line. Duplicate ids are rejected.
inline std::vector<SourceUnit> read_corpus(std::istream& in) {
  std::vector<SourceUnit> units;
  std::unordered_set<std::string> seen;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError("line " + std::to_string(n) + ": " + e.what());
    }
    auto u = unit_from_json(obj, n);
    if (!seen.insert(u.id).second)
      throw FormatError("line " + std::to_string(n) + ": duplicate id '" + u.id + "'");
    units.push_back(std::move(u));
  }
  return units;
}

inline std::vector<SourceUnit> read_corpus_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_corpus(in);
}

inline void write_corpus(std::ostream& out, const std::vector<SourceUnit>& units) {
  for (const auto& u : units)
    out << to_json(u).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

inline void write_corpus_file(const std::filesystem::path& path, const std::vector<SourceUnit>& units) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  write_corpus(out, units);
}

}  // namespace lpcode
