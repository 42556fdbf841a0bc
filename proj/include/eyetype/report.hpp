#pragma once

// Experiment reports: one row per trial plus per-condition, per-session
// means and sample SDs. Output is byte-stable for identical input rows.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "eyetype/metrics.hpp"

namespace eyetype {

struct TrialRow {
  std::string condition;  // e.g. "L+WP" or "L+WP@390"
  Variant variant = Variant::NoP;
  Revision revision = Revision::Exp1;
  double speed_px_s = 250.0;
  int user = 0;
  int session = 1;
  int trial = 0;
  std::string phrase;
  TrialRecord record;
  SessionMetrics metrics;
};

struct SessionSummary {
  std::string condition;
  int session = 1;
  MetricSummary stats;
};

struct Report {
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
  std::vector<TrialRow> rows;

  /// Summaries ordered by first appearance of the condition, then session.
  std::vector<SessionSummary> summaries() const {
    std::vector<std::string> order;
    std::map<std::string, std::map<int, std::vector<SessionMetrics>>> groups;
    for (const auto& r : rows) {
      if (!groups.contains(r.condition)) order.push_back(r.condition);
      groups[r.condition][r.session].push_back(r.metrics);
    }
    std::vector<SessionSummary> out;
    for (const auto& c : order)
      for (const auto& [session, values] : groups.at(c)) out.push_back({c, session, summarize(values)});
    return out;
  }

  const SessionSummary* find(const std::vector<SessionSummary>& all, const std::string& condition,
                             int session) const {
    for (const auto& s : all)
      if (s.condition == condition && s.session == session) return &s;
    return nullptr;
  }
};

namespace detail {

inline std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline nlohmann::ordered_json metrics_json(const SessionMetrics& m) {
  nlohmann::ordered_json j;
  j["wpm"] = m.wpm;
  j["adj_wpm"] = m.adj_wpm;
  j["cer"] = m.cer;
  j["uer"] = m.uer;
  j["ks"] = m.ks;
  return j;
}

}  // namespace detail

inline std::string report_csv(const Report& report) {
  std::string out =
      "condition,variant,revision,speed_px_s,user,session,trial,phrase,transcribed,duration_ms,"
      "key_activations,del_activations,arrow_activations,wpm,adj_wpm,cer,uer,ks\n";
  for (const auto& r : report.rows) {
    const auto& m = r.metrics;
    out += r.condition + ',' + to_string(r.variant) + ',' + to_string(r.revision) + ',' +
           detail::fixed(r.speed_px_s, 1) + ',' + std::to_string(r.user) + ',' +
           std::to_string(r.session) + ',' + std::to_string(r.trial) + ",\"" + r.phrase + "\",\"" +
           r.record.transcribed + "\"," + std::to_string(r.record.duration_ms) + ',' +
           std::to_string(r.record.key_activations) + ',' +
           std::to_string(r.record.del_activations) + ',' +
           std::to_string(r.record.arrow_activations) + ',' + detail::fixed(m.wpm) + ',' +
           detail::fixed(m.adj_wpm) + ',' + detail::fixed(m.cer) + ',' + detail::fixed(m.uer) +
           ',' + detail::fixed(m.ks) + '\n';
  }
  return out;
}

inline nlohmann::ordered_json report_json(const Report& report) {
  nlohmann::ordered_json j;
  j["metadata"] = report.metadata;
  j["trials"] = report.rows.size();
  auto sessions = nlohmann::ordered_json::array();
  for (const auto& s : report.summaries()) {
    nlohmann::ordered_json e;
    e["condition"] = s.condition;
    e["session"] = s.session;
    e["n"] = s.stats.n;
    e["mean"] = detail::metrics_json(s.stats.mean);
    e["sd"] = detail::metrics_json(s.stats.sd);
    sessions.push_back(std::move(e));
  }
  j["sessions"] = std::move(sessions);
  return j;
}

/// Fixed report metadata describing how the measures are computed.
inline nlohmann::ordered_json metric_conventions() {
  nlohmann::ordered_json j;
  j["wpm_clock"] = "first_to_last_key_selection";
  j["adj_wpm_exponent"] = 1.0;
  j["uer"] = "msd / max(len(target), len(transcribed))";
  j["cer"] = "del_activations / key_activations";
  j["ks"] = "1 - key_activations / len(final_text)";
  return j;
}

}  // namespace eyetype
