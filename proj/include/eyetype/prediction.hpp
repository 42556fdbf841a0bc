#pragma once

// Count-based word and letter prediction.
//
// The model keeps unigram counts in a sorted map (which doubles as the prefix
// index for completions), bigram counts keyed by the previous word, where the
// empty previous word marks a sentence start, and per-prefix letter
// continuation counts weighted by word frequency.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eyetype/layout.hpp"

namespace eyetype {

using Count = std::uint64_t;

/// Lowercases and splits each line on non-alphabetic characters.
inline std::vector<std::vector<std::string>> tokenize_lines(std::string_view text) {
  std::vector<std::vector<std::string>> lines(1);
  std::string word;
  auto flush = [&] {
    if (!word.empty()) lines.back().push_back(std::exchange(word, {}));
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalpha(c) && c < 0x80) {
      word.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
      if (ch == '\n') lines.emplace_back();
    }
  }
  flush();
  std::erase_if(lines, [](const auto& l) { return l.empty(); });
  return lines;
}

class LanguageModel {
 public:
  using WordCounts = std::map<std::string, Count, std::less<>>;

  LanguageModel() = default;

  Count unigram(std::string_view w) const {
    auto it = unigrams_.find(w);
    return it == unigrams_.end() ? 0 : it->second;
  }

  Count bigram(std::string_view prev, std::string_view next) const {
    auto it = bigrams_.find(prev);
    if (it == bigrams_.end()) return 0;
    auto jt = it->second.find(next);
    return jt == it->second.end() ? 0 : jt->second;
  }

  /// Successor counts for a previous word; "" gives sentence-initial counts.
  const WordCounts* successors(std::string_view prev) const {
    auto it = bigrams_.find(prev);
    return it == bigrams_.end() ? nullptr : &it->second;
  }

  /// Letter continuation counts for a prefix; nullptr when nothing extends it.
  const std::array<Count, 26>* continuations(std::string_view prefix) const {
    auto it = letter_counts_.find(prefix);
    return it == letter_counts_.end() ? nullptr : &it->second;
  }

  const WordCounts& vocabulary() const { return unigrams_; }
  std::size_t vocabulary_size() const { return unigrams_.size(); }

  void add_line(const std::vector<std::string>& words) {
    std::string_view prev;
    for (const auto& w : words) {
      add_word(w, 1);
      ++bigrams_[std::string(prev)][w];
      prev = w;
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json bigrams = nlohmann::json::object();
    for (const auto& [prev, next] : bigrams_) bigrams[prev] = next;
    return {{"unigrams", unigrams_}, {"bigrams", std::move(bigrams)}};
  }

  static LanguageModel from_json(const nlohmann::json& j) {
    LanguageModel m;
    for (const auto& [w, c] : j.at("unigrams").items()) m.add_word(w, c.get<Count>());
    for (const auto& [prev, next] : j.at("bigrams").items())
      for (const auto& [w, c] : next.items()) m.bigrams_[prev][w] = c.get<Count>();
    return m;
  }

 private:
  void add_word(const std::string& w, Count n) {
    unigrams_[w] += n;
    for (std::size_t i = 0; i < w.size(); ++i)
      letter_counts_[w.substr(0, i)][static_cast<std::size_t>(w[i] - 'a')] += n;
  }

  WordCounts unigrams_;
  std::map<std::string, WordCounts, std::less<>> bigrams_;
  std::map<std::string, std::array<Count, 26>, std::less<>> letter_counts_;
};

inline LanguageModel train_model(std::string_view corpus) {
  const auto lines = tokenize_lines(corpus);
  if (lines.empty()) throw std::invalid_argument("corpus contains no words");
  LanguageModel model;
  for (const auto& line : lines) model.add_line(line);
  return model;
}

/// 64-bit FNV-1a, used to key cached models by corpus content.
inline std::uint64_t corpus_hash(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace detail {

inline std::vector<std::string> top_words(const LanguageModel::WordCounts& counts,
                                          std::size_t limit) {
  std::vector<std::pair<std::string_view, Count>> ranked(counts.begin(), counts.end());
  // map order is alphabetical, so a stable sort on count keeps ties alphabetical
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && out.size() < limit; ++i)
    if (ranked[i].second > 0) out.emplace_back(ranked[i].first);
  return out;
}

}  // namespace detail

/// Up to four most likely next letters for the current word prefix.
/// `prev_word` is accepted for interface stability but not used yet.
inline std::vector<char> next_letters(const LanguageModel& model, std::string_view prefix,
                                      std::string_view /*prev_word*/ = {}) {
  const auto* counts = model.continuations(prefix);
  if (!counts) return {};
  std::array<int, 26> order{};
  for (int i = 0; i < 26; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return (*counts)[static_cast<std::size_t>(a)] > (*counts)[static_cast<std::size_t>(b)];
  });
  std::vector<char> out;
  for (int i : order) {
    if (out.size() == 4 || (*counts)[static_cast<std::size_t>(i)] == 0) break;
    out.push_back(static_cast<char>('a' + i));
  }
  return out;
}

/// Up to three vocabulary words starting with `prefix`, most frequent first.
inline std::vector<std::string> word_completions(const LanguageModel& model,
                                                 std::string_view prefix) {
  if (prefix.empty()) return {};
  const auto& vocab = model.vocabulary();
  std::vector<std::pair<std::string_view, Count>> matches;
  for (auto it = vocab.lower_bound(prefix); it != vocab.end() && it->first.starts_with(prefix);
       ++it)
    matches.emplace_back(it->first, it->second);
  std::stable_sort(matches.begin(), matches.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (const auto& [w, c] : matches) {
    if (out.size() == 3) break;
    if (c > 0) out.emplace_back(w);
  }
  return out;
}

/// Up to three candidates for the word following `prev_word`. Falls back to
/// the unigram ranking when the bigram mass for `prev_word` is zero.
inline std::vector<std::string> next_words(const LanguageModel& model,
                                           std::string_view prev_word) {
  if (const auto* succ = model.successors(prev_word)) {
    auto ranked = detail::top_words(*succ, 3);
    if (!ranked.empty()) return ranked;
  }
  return detail::top_words(model.vocabulary(), 3);
}

enum class Slot { Up, Left, Right };

inline std::optional<Slot> arrow_slot(KeyId k) {
  switch (k) {
    case KeyId::ArrowUp: return Slot::Up;
    case KeyId::ArrowLeft: return Slot::Left;
    case KeyId::ArrowRight: return Slot::Right;
    default: return std::nullopt;
  }
}

inline KeyId slot_key(Slot s) {
  switch (s) {
    case Slot::Up: return KeyId::ArrowUp;
    case Slot::Left: return KeyId::ArrowLeft;
    case Slot::Right: return KeyId::ArrowRight;
  }
  return KeyId::ArrowUp;
}

inline std::string to_string(Slot s) {
  switch (s) {
    case Slot::Up: return "up";
    case Slot::Left: return "left";
    case Slot::Right: return "right";
  }
  return "?";
}

enum class PredictionMode { Completion, NextWord };

struct PredictionSet {
  PredictionMode mode = PredictionMode::NextWord;
  std::string prefix;
  std::vector<char> top_letters;
  std::vector<std::string> completions;
  std::vector<std::string> next_words;
  std::array<std::string, 3> slots;  // up, left, right; empty string = no word

  const std::string& slot(Slot s) const { return slots[static_cast<std::size_t>(s)]; }

  std::optional<Slot> slot_of(std::string_view word) const {
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (!slots[i].empty() && slots[i] == word) return static_cast<Slot>(i);
    return std::nullopt;
  }
};

/// Suffix of the buffer after the last space.
inline std::string_view current_prefix(std::string_view buffer) {
  const auto pos = buffer.rfind(' ');
  return pos == std::string_view::npos ? buffer : buffer.substr(pos + 1);
}

/// Last space-terminated word of the buffer, or "" at phrase start.
inline std::string_view last_finalized_word(std::string_view buffer) {
  const auto prefix_len = current_prefix(buffer).size();
  std::string_view head = buffer.substr(0, buffer.size() - prefix_len);
  while (!head.empty() && head.back() == ' ') head.remove_suffix(1);
  const auto pos = head.rfind(' ');
  return pos == std::string_view::npos ? head : head.substr(pos + 1);
}

/// Predictions for the current buffer. `with_words` fills the arrow slots.
inline PredictionSet make_predictions(const LanguageModel& model, std::string_view buffer,
                                      bool with_words) {
  PredictionSet p;
  p.prefix = std::string(current_prefix(buffer));
  const auto prev = last_finalized_word(buffer);
  p.top_letters = next_letters(model, p.prefix, prev);
  if (!with_words) return p;
  if (!p.prefix.empty()) {
    p.mode = PredictionMode::Completion;
    p.completions = word_completions(model, p.prefix);
  } else {
    p.mode = PredictionMode::NextWord;
    p.next_words = next_words(model, prev);
  }
  const auto& active = p.mode == PredictionMode::Completion ? p.completions : p.next_words;
  for (std::size_t i = 0; i < active.size() && i < p.slots.size(); ++i) p.slots[i] = active[i];
  return p;
}

/// Pursuit distance for a key given the current top letters. A letter is
/// shortened only when it is predicted and is the single predicted letter in
/// its cluster.
inline double lp_travel(const InterfaceLayout& layout, const Key& key,
                        const std::vector<char>& top_letters) {
  const auto& p = layout.params;
  if (is_arrow(key.id)) return p.arrow_distance_px;
  if (!layout.uses_letter_prediction() || !is_letter(key.id)) return p.move_distance_px;
  auto predicted = [&](KeyId id) {
    return is_letter(id) && std::find(top_letters.begin(), top_letters.end(), key_letter(id)) !=
                                top_letters.end();
  };
  if (!predicted(key.id)) return p.move_distance_px;
  const auto& cluster = layout.cluster(key.cluster_index);
  const auto members = std::count_if(cluster.keys.begin(), cluster.keys.end(),
                                     [&](const Key& k) { return predicted(k.id); });
  return members == 1 ? p.lp_move_distance_px : p.move_distance_px;
}

inline std::vector<double> cluster_travels(const InterfaceLayout& layout, const Cluster& cluster,
                                           const std::vector<char>& top_letters) {
  std::vector<double> out;
  out.reserve(cluster.keys.size());
  for (const auto& k : cluster.keys) out.push_back(lp_travel(layout, k, top_letters));
  return out;
}

class EmptySlotError : public std::runtime_error {
 public:
  explicit EmptySlotError(Slot s)
      : std::runtime_error("no predicted word in slot " + to_string(s)) {}
};

/// Commits the word in `slot`. In completion mode the current prefix is
/// replaced; in next-word mode the word is appended. A space always follows.
inline std::pair<std::string, std::string> apply_word_selection(std::string_view buffer,
                                                                Slot slot,
                                                                const PredictionSet& predictions) {
  const std::string& word = predictions.slot(slot);
  if (word.empty()) throw EmptySlotError(slot);
  std::string out(buffer);
  if (predictions.mode == PredictionMode::Completion)
    out.resize(out.size() - current_prefix(out).size());
  out += word;
  out += ' ';
  return {std::move(out), word};
}

}  // namespace eyetype
