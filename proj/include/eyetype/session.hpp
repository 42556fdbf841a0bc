#pragma once

// One live typing session: turns client wire messages into engine calls and
// server wire messages, and logs what it applied.
//
// Client -> server: {"type":"gaze","t_ms","x","y"}, {"type":"calibrate_start"},
// {"type":"start_phrase","text"}, {"type":"metrics"}.
// Server -> client: "layout", "event", "predictions", "metrics", "warning",
// "error". Every server message carries "session_id".

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eyetype/engine.hpp"
#include "eyetype/metrics.hpp"
#include "eyetype/trace_io.hpp"

namespace eyetype {

/// Appends complete lines and flushes after each, so a crash never leaves a
/// partial JSON document behind.
class LineLog {
 public:
  LineLog() = default;
  explicit LineLog(const std::filesystem::path& path) : out_(path, std::ios::out | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open log " + path.string());
  }

  void write(const std::string& line) {
    if (!out_.is_open()) return;
    out_.write((line + '\n').data(), static_cast<std::streamsize>(line.size() + 1));
    out_.flush();
  }

 private:
  std::ofstream out_;
};

inline nlohmann::ordered_json predictions_json(const Engine& engine) {
  const auto& p = engine.predictions();
  nlohmann::ordered_json j;
  j["mode"] = p.mode == PredictionMode::Completion ? "completion" : "next_word";
  j["prefix"] = p.prefix;
  j["text"] = engine.buffer();
  std::string letters(p.top_letters.begin(), p.top_letters.end());
  j["top_letters"] = letters;
  j["slots"] = {p.slots[0], p.slots[1], p.slots[2]};
  nlohmann::ordered_json travels = nlohmann::ordered_json::object();
  for (const auto& c : engine.layout().clusters)
    for (const auto& k : c.keys) travels[to_string(k.id)] = lp_travel(engine.layout(), k, p.top_letters);
  j["travels"] = std::move(travels);
  return j;
}

class LiveSession {
 public:
  /// `log_dir` empty disables logging.
  LiveSession(std::string id, std::shared_ptr<const InterfaceLayout> layout,
              std::shared_ptr<const LanguageModel> model, const std::filesystem::path& log_dir = {})
      : id_(std::move(id)), engine_(std::move(layout), std::move(model)) {
    if (!log_dir.empty()) {
      std::filesystem::create_directories(log_dir);
      trace_log_ = LineLog(log_dir / (id_ + ".trace.jsonl"));
      event_log_ = LineLog(log_dir / (id_ + ".events.jsonl"));
    }
  }

  const std::string& id() const { return id_; }
  const Engine& engine() const { return engine_; }
  const std::vector<EngineEvent>& events() const { return events_; }

  /// Messages sent once when the client connects.
  std::vector<std::string> hello() const {
    auto layout = message("layout");
    layout["layout"] = to_json(engine_.layout());
    auto preds = message("predictions");
    preds.update(predictions_json(engine_));
    return {layout.dump(), preds.dump()};
  }

  /// Handles one client message and returns the replies in order.
  std::vector<std::string> handle(std::string_view text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      return {error("malformed JSON: " + std::string(e.what()))};
    }
    if (j.is_object() && j.value("type", std::string()) == "metrics") return {metrics_message()};

    TraceRecord record;
    try {
      record = trace_record_from_json(j);
    } catch (const std::exception& e) {
      return {error(std::string("invalid message: ") + e.what())};
    }

    std::vector<EngineEvent> ev;
    try {
      ev = apply_record(engine_, record);
    } catch (const OutOfOrderSample& e) {
      auto w = message("warning");
      w["message"] = std::string("sample dropped: ") + e.what();
      return {w.dump()};
    }
    trace_log_.write(trace_line(record));
    if (const auto* p = std::get_if<StartPhrase>(&record)) {
      target_ = p->text;
      events_.clear();
    }

    std::vector<std::string> out;
    bool committed = std::holds_alternative<StartPhrase>(record);
    for (const auto& e : ev) {
      event_log_.write(event_line(e));
      events_.push_back(e);
      auto m = message("event");
      m.update(to_json(e));
      out.push_back(m.dump());
      if (e.kind == EventKind::KeySelected) committed = true;
    }
    if (committed) {
      auto p = message("predictions");
      p.update(predictions_json(engine_));
      out.push_back(p.dump());
      if (auto m = live_metrics()) out.push_back(*m);
    }
    return out;
  }

 private:
  nlohmann::ordered_json message(const char* type) const {
    nlohmann::ordered_json j;
    j["type"] = type;
    j["session_id"] = id_;
    return j;
  }

  std::string error(const std::string& what) const {
    auto j = message("error");
    j["message"] = what;
    return j.dump();
  }

  std::optional<std::string> live_metrics() const {
    if (target_.empty()) return std::nullopt;
    const auto record = record_from_events(target_, events_);
    if (record.key_activations < 2 || record.duration_ms <= 0) return std::nullopt;
    return metrics_json(record);
  }

  std::string metrics_message() const {
    if (target_.empty()) return error("metrics need a phrase; send start_phrase first");
    const auto record = record_from_events(target_, events_);
    if (record.key_activations < 2 || record.duration_ms <= 0)
      return error("metrics need at least two key selections");
    return metrics_json(record);
  }

  std::string metrics_json(const TrialRecord& record) const {
    const auto m = trial_metrics(record);
    auto j = message("metrics");
    j["target"] = target_;
    j["transcribed"] = record.transcribed;
    j["complete"] = trim_trailing_spaces(record.transcribed) == target_;
    j["wpm"] = m.wpm;
    j["adj_wpm"] = m.adj_wpm;
    j["cer"] = m.cer;
    j["uer"] = m.uer;
    j["ks"] = m.ks;
    return j.dump();
  }

  std::string id_;
  Engine engine_;
  std::string target_;
  std::vector<EngineEvent> events_;
  LineLog trace_log_;
  LineLog event_log_;
};

}  // namespace eyetype
