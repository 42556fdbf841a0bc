#pragma once

// JSON-lines traces and event logs, and deterministic replay.
//
// A trace line is either a gaze sample {"t_ms":..,"x":..,"y":..} (an optional
// "type":"gaze" is accepted) or a control record: {"type":"calibrate_start"}
// or {"type":"start_phrase","text":".."}. Live sessions log exactly the
// records they applied, so replaying the log reproduces their events.

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "eyetype/engine.hpp"
#include "eyetype/metrics.hpp"

namespace eyetype {

struct CalibrateStart {
  friend bool operator==(const CalibrateStart&, const CalibrateStart&) = default;
};

struct StartPhrase {
  std::string text;
  friend bool operator==(const StartPhrase&, const StartPhrase&) = default;
};

using TraceRecord = std::variant<GazeSample, CalibrateStart, StartPhrase>;

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline nlohmann::ordered_json to_json(const GazeSample& s) {
  nlohmann::ordered_json j;
  j["t_ms"] = s.t_ms;
  j["x"] = s.x;
  j["y"] = s.y;
  return j;
}

inline std::string trace_line(const TraceRecord& r) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GazeSample>) {
          return to_json(v).dump();
        } else if constexpr (std::is_same_v<T, CalibrateStart>) {
          return R"({"type":"calibrate_start"})";
        } else {
          nlohmann::ordered_json j;
          j["type"] = "start_phrase";
          j["text"] = v.text;
          return j.dump();
        }
      },
      r);
}

/// Interprets an already-parsed JSON object as a trace record.
inline TraceRecord trace_record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("trace record must be a JSON object");
  const std::string type = j.value("type", std::string("gaze"));
  if (type == "gaze") {
    GazeSample s;
    s.t_ms = j.at("t_ms").get<std::int64_t>();
    s.x = j.at("x").get<double>();
    s.y = j.at("y").get<double>();
    if (!std::isfinite(s.x) || !std::isfinite(s.y))
      throw std::invalid_argument("gaze coordinates must be finite");
    return s;
  }
  if (type == "calibrate_start") return CalibrateStart{};
  if (type == "start_phrase") return StartPhrase{j.at("text").get<std::string>()};
  throw std::invalid_argument("unknown record type: " + type);
}

inline TraceRecord parse_trace_line(std::string_view line, std::size_t line_no = 0) {
  try {
    return trace_record_from_json(nlohmann::json::parse(line));
  } catch (const std::exception& e) {
    throw ParseError(line_no, e.what());
  }
}

namespace detail {

template <typename F>
void for_each_line(std::istream& in, F&& f) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    f(line, line_no);
  }
}

}  // namespace detail

inline std::vector<TraceRecord> read_trace(std::istream& in) {
  std::vector<TraceRecord> out;
  detail::for_each_line(in, [&](const std::string& line, std::size_t n) {
    out.push_back(parse_trace_line(line, n));
  });
  return out;
}

inline std::vector<EngineEvent> read_events(std::istream& in) {
  std::vector<EngineEvent> out;
  detail::for_each_line(in, [&](const std::string& line, std::size_t n) {
    try {
      out.push_back(event_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw ParseError(n, e.what());
    }
  });
  return out;
}

inline void write_trace(std::ostream& out, std::span<const TraceRecord> records) {
  for (const auto& r : records) out << trace_line(r) << '\n';
}

inline void write_events(std::ostream& out, std::span<const EngineEvent> events) {
  for (const auto& e : events) out << event_line(e) << '\n';
}

inline std::string events_text(std::span<const EngineEvent> events) {
  std::string s;
  for (const auto& e : events) {
    s += event_line(e);
    s += '\n';
  }
  return s;
}

/// Applies one record to the engine. Gaze samples that are not strictly
/// later than the previous one raise OutOfOrderSample and leave the engine
/// untouched.
inline std::vector<EngineEvent> apply_record(Engine& engine, const TraceRecord& record) {
  if (const auto* s = std::get_if<GazeSample>(&record)) return engine.ingest(*s);
  if (std::holds_alternative<CalibrateStart>(record)) {
    engine.begin_calibration();
    return {};
  }
  engine.reset_text();
  return {};
}

struct ReplayResult {
  std::vector<EngineEvent> events;
  std::vector<std::string> warnings;
  std::string target;  // text of the last start_phrase record, if any
};

/// Runs a trace through a fresh engine with the same rules as a live session.
inline ReplayResult replay(std::span<const TraceRecord> trace, Engine& engine) {
  ReplayResult out;
  for (const auto& r : trace) {
    if (const auto* p = std::get_if<StartPhrase>(&r)) {
      out.target = p->text;
      out.events.clear();
    }
    try {
      auto ev = apply_record(engine, r);
      out.events.insert(out.events.end(), ev.begin(), ev.end());
    } catch (const OutOfOrderSample& e) {
      out.warnings.emplace_back(e.what());
    }
  }
  return out;
}

/// Metrics for a replayed phrase; requires a target and at least two key
/// activations.
inline SessionMetrics replay_metrics(const ReplayResult& r, std::string target = {}) {
  if (target.empty()) target = r.target;
  if (target.empty()) throw std::invalid_argument("metrics need a target phrase");
  const auto record = record_from_events(std::move(target), r.events);
  if (record.key_activations == 0) throw std::invalid_argument("trace contains no key selections");
  return trial_metrics(record);
}

}  // namespace eyetype
