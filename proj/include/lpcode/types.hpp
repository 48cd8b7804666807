#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "lpcode/errors.hpp"

namespace lpcode {

enum class Language { C, Cpp, Java, Python };

enum class Generator { Human, ChatGPT, GeminiPro, WizardCoder, DeepSeekCoder };

inline constexpr std::array<Language, 4> kLanguages = {
    Language::C, Language::Cpp, Language::Java, Language::Python};

inline constexpr std::array<Generator, 5> kGenerators = {
    Generator::Human, Generator::ChatGPT, Generator::GeminiPro,
    Generator::WizardCoder, Generator::DeepSeekCoder};

/// The four paraphrasing models, in Task 2 class-index order.
inline constexpr std::array<Generator, 4> kLlmGenerators = {
    Generator::ChatGPT, Generator::GeminiPro, Generator::WizardCoder,
    Generator::DeepSeekCoder};

// Spellings below are the corpus JSONL contract.

inline std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::C: return "c";
    case Language::Cpp: return "cpp";
    case Language::Java: return "java";
    case Language::Python: return "python";
  }
  return "?";
}

inline std::string_view to_string(Generator gen) {
  switch (gen) {
    case Generator::Human: return "human";
    case Generator::ChatGPT: return "chatgpt";
    case Generator::GeminiPro: return "gemini_pro";
    case Generator::WizardCoder: return "wizardcoder";
    case Generator::DeepSeekCoder: return "deepseek_coder";
  }
  return "?";
}

inline std::optional<Language> language_from_string(std::string_view s) {
  for (Language l : kLanguages)
    if (to_string(l) == s) return l;
  return std::nullopt;
}

inline std::optional<Generator> generator_from_string(std::string_view s) {
  for (Generator g : kGenerators)
    if (to_string(g) == s) return g;
  return std::nullopt;
}

/// Class index of an LLM generator for Task 2; throws for Human.
inline int llm_index(Generator gen) {
  for (std::size_t i = 0; i < kLlmGenerators.size(); ++i)
    if (kLlmGenerators[i] == gen) return static_cast<int>(i);
  throw InvalidUnit("human code has no LLM class index");
}

/// One source file of the corpus.
struct SourceUnit {
  std::string id;
  Language language = Language::C;
  Generator generator = Generator::Human;
  std::string origin_id;  // human original this unit paraphrases; empty for human code
  std::string text;

  bool is_human() const { return generator == Generator::Human; }

  void validate() const {
    if (id.empty()) throw InvalidUnit("unit without id");
    if (text.empty()) throw InvalidUnit("unit '" + id + "' has empty text");
    if (is_human() && !origin_id.empty())
      throw InvalidUnit("human unit '" + id + "' carries an origin_id");
  }
};

}  // namespace lpcode
