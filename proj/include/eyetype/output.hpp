#pragma once

// On-disk experiment output:
//   report.csv, report.json
//   manifest.jsonl     one "experiment" line, then one "trial" line per trial
//   traces/<id>.jsonl  gaze trace of each trial
//   events/<id>.jsonl  engine events of each trial
// load_report() rebuilds the report from the manifest and event logs alone.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "eyetype/report.hpp"
#include "eyetype/simharness.hpp"
#include "eyetype/trace_io.hpp"

namespace eyetype {

inline std::string trial_id(std::size_t condition, const TrialRow& row) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "c%zu-s%02d-u%02d-t%02d", condition, row.session, row.user, row.trial);
  return buf;
}

inline std::string report_json_text(const Report& r) { return report_json(r).dump(2) + "\n"; }

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

}  // namespace detail

inline void write_experiment(const std::filesystem::path& dir, const ExperimentConfig& config,
                             const ExperimentResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "traces");
  fs::create_directories(dir / "events");

  std::string manifest;
  nlohmann::ordered_json head;
  head["type"] = "experiment";
  head["metadata"] = result.report.metadata;
  manifest += head.dump() + '\n';

  std::map<std::string, std::size_t> condition_index;
  for (std::size_t i = 0; i < config.conditions.size(); ++i) condition_index[config.conditions[i].name()] = i;

  for (const auto& t : result.trials) {
    const auto id = trial_id(condition_index.at(t.row.condition), t.row);
    std::string trace;
    for (const auto& r : t.trace) trace += trace_line(r) + '\n';
    detail::write_text(dir / "traces" / (id + ".jsonl"), trace);
    detail::write_text(dir / "events" / (id + ".jsonl"), events_text(t.events));

    nlohmann::ordered_json line;
    line["type"] = "trial";
    line["id"] = id;
    line["condition"] = t.row.condition;
    line["variant"] = to_string(t.row.variant);
    line["revision"] = to_string(t.row.revision);
    line["speed_px_s"] = t.row.speed_px_s;
    line["user"] = t.row.user;
    line["session"] = t.row.session;
    line["trial"] = t.row.trial;
    line["phrase"] = t.row.phrase;
    line["trace"] = "traces/" + id + ".jsonl";
    line["events"] = "events/" + id + ".jsonl";
    manifest += line.dump() + '\n';
  }
  detail::write_text(dir / "manifest.jsonl", manifest);
  detail::write_text(dir / "report.csv", report_csv(result.report));
  detail::write_text(dir / "report.json", report_json_text(result.report));
}

/// Recomputes a report from a simulate output directory.
inline Report load_report(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.jsonl");
  if (!in) throw std::runtime_error("cannot open " + (dir / "manifest.jsonl").string());
  Report report;
  detail::for_each_line(in, [&](const std::string& text, std::size_t n) {
    try {
      const auto j = nlohmann::ordered_json::parse(text);
      if (j.at("type") == "experiment") {
        report.metadata = j.at("metadata");
        return;
      }
      TrialRow row;
      row.condition = j.at("condition").get<std::string>();
      row.variant = parse_variant(j.at("variant").get<std::string>());
      row.revision = parse_revision(j.at("revision").get<std::string>());
      row.speed_px_s = j.at("speed_px_s").get<double>();
      row.user = j.at("user").get<int>();
      row.session = j.at("session").get<int>();
      row.trial = j.at("trial").get<int>();
      row.phrase = j.at("phrase").get<std::string>();
      std::ifstream ev(dir / j.at("events").get<std::string>());
      if (!ev) throw std::runtime_error("missing event log " + j.at("events").get<std::string>());
      const auto events = read_events(ev);
      row.record = record_from_events(row.phrase, events);
      row.metrics = trial_metrics(row.record);
      report.rows.push_back(std::move(row));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(n, e.what());
    }
  });
  return report;
}

}  // namespace eyetype
