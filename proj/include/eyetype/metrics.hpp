#pragma once

// Text-entry performance measures: WPM, AdjWPM, MSD-based uncorrected error
// rate, corrected error rate and keystroke savings.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eyetype/engine.hpp"

namespace eyetype {

/// Words per minute with one word = five characters.
inline double wpm(std::size_t transcribed_len_chars, std::int64_t duration_ms) {
  if (duration_ms <= 0) throw std::domain_error("wpm needs a positive duration");
  return (static_cast<double>(transcribed_len_chars) / 5.0) /
         (static_cast<double>(duration_ms) / 60000.0);
}

inline double adj_wpm(double wpm_value, double uer_value, double a = 1.0) {
  if (!(uer_value >= 0.0 && uer_value <= 1.0))
    throw std::domain_error("uncorrected error rate must lie in [0, 1]");
  return wpm_value * std::pow(1.0 - uer_value, a);
}

/// Minimum string distance (Levenshtein, unit costs).
inline std::size_t msd(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

inline double uer(std::string_view target, std::string_view transcribed) {
  if (target.empty()) throw std::invalid_argument("target phrase must not be empty");
  return static_cast<double>(msd(target, transcribed)) /
         static_cast<double>(std::max(target.size(), transcribed.size()));
}

struct TrialRecord {
  std::string target;
  std::string transcribed;  // final buffer, trailing space included if typed
  std::int64_t duration_ms = 0;
  int key_activations = 0;
  int del_activations = 0;
  int arrow_activations = 0;
};

/// Backspace entries per key activation.
inline double cer(const TrialRecord& r) {
  if (r.key_activations <= 0) throw std::domain_error("cer needs at least one key activation");
  return static_cast<double>(r.del_activations) / static_cast<double>(r.key_activations);
}

/// 1 - activations / characters; the baseline is one activation per character.
inline double keystroke_savings(std::size_t final_text_len, int key_activations) {
  if (final_text_len == 0) throw std::invalid_argument("keystroke savings need a non-empty text");
  return 1.0 - static_cast<double>(key_activations) / static_cast<double>(final_text_len);
}

inline std::string_view trim_trailing_spaces(std::string_view s) {
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

struct SessionMetrics {
  double wpm = 0.0;
  double adj_wpm = 0.0;
  double cer = 0.0;
  double uer = 0.0;
  double ks = 0.0;
};

inline SessionMetrics trial_metrics(const TrialRecord& r) {
  const auto text = trim_trailing_spaces(r.transcribed);
  SessionMetrics m;
  m.wpm = wpm(text.size(), r.duration_ms);
  m.uer = uer(r.target, text);
  m.adj_wpm = adj_wpm(m.wpm, m.uer);
  m.cer = cer(r);
  m.ks = keystroke_savings(r.transcribed.size(), r.key_activations);
  return m;
}

/// Unweighted mean of per-trial metrics.
inline SessionMetrics aggregate_session(std::span<const TrialRecord> trials) {
  if (trials.empty()) throw std::invalid_argument("cannot aggregate an empty session");
  SessionMetrics sum;
  for (const auto& t : trials) {
    const auto m = trial_metrics(t);
    sum.wpm += m.wpm;
    sum.adj_wpm += m.adj_wpm;
    sum.cer += m.cer;
    sum.uer += m.uer;
    sum.ks += m.ks;
  }
  const double n = static_cast<double>(trials.size());
  return {sum.wpm / n, sum.adj_wpm / n, sum.cer / n, sum.uer / n, sum.ks / n};
}

struct MetricSummary {
  SessionMetrics mean;
  SessionMetrics sd;  // sample standard deviation, 0 for a single trial
  std::size_t n = 0;
};

inline MetricSummary summarize(std::span<const SessionMetrics> values) {
  if (values.empty()) throw std::invalid_argument("cannot summarize an empty set");
  auto field_stats = [&](double SessionMetrics::*f, double& mean, double& sd) {
    double s = 0.0;
    for (const auto& v : values) s += v.*f;
    mean = s / static_cast<double>(values.size());
    double ss = 0.0;
    for (const auto& v : values) ss += (v.*f - mean) * (v.*f - mean);
    sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  };
  MetricSummary out;
  out.n = values.size();
  field_stats(&SessionMetrics::wpm, out.mean.wpm, out.sd.wpm);
  field_stats(&SessionMetrics::adj_wpm, out.mean.adj_wpm, out.sd.adj_wpm);
  field_stats(&SessionMetrics::cer, out.mean.cer, out.sd.cer);
  field_stats(&SessionMetrics::uer, out.mean.uer, out.sd.uer);
  field_stats(&SessionMetrics::ks, out.mean.ks, out.sd.ks);
  return out;
}

/// Rebuilds a trial record from an engine event log. The clock runs from the
/// first to the last KeySelected event.
inline TrialRecord record_from_events(std::string target, std::span<const EngineEvent> events) {
  TrialRecord r;
  r.target = std::move(target);
  std::optional<std::int64_t> first, last;
  bool arrow_pending = false;
  for (const auto& e : events) {
    switch (e.kind) {
      case EventKind::KeySelected: {
        const KeyId k = std::get<KeyId>(e.payload);
        if (!first) first = e.t_ms;
        last = e.t_ms;
        ++r.key_activations;
        if (k == KeyId::Delete) ++r.del_activations;
        if (is_arrow(k)) {
          ++r.arrow_activations;
          arrow_pending = true;
        } else if (is_letter(k)) {
          r.transcribed += key_letter(k);
        } else if (k == KeyId::Space) {
          r.transcribed += ' ';
        }
        break;
      }
      case EventKind::WordCommitted:
        if (arrow_pending) {
          r.transcribed.resize(r.transcribed.size() - current_prefix(r.transcribed).size());
          r.transcribed += std::get<std::string>(e.payload);
          r.transcribed += ' ';
          arrow_pending = false;
        }
        break;
      case EventKind::CharDeleted:
        if (!r.transcribed.empty()) r.transcribed.pop_back();
        break;
      default: break;
    }
  }
  if (first) r.duration_ms = *last - *first;
  return r;
}

}  // namespace eyetype
