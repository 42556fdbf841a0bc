#pragma once

// Deterministic gaze scripts for tests: 60 Hz timestamps, exact positions.

#include <cstdint>
#include <vector>

#include "eyetype/engine.hpp"
#include "eyetype/layout.hpp"

namespace eyetype::testing {

/// Timestamp of the k-th sample at 60 Hz, in whole milliseconds.
inline std::int64_t sample_time(std::int64_t k) { return (k * 1000) / 60; }

class Script {
 public:
  explicit Script(Engine& engine, std::int64_t first_index = 0) : engine_(engine), k_(first_index) {}

  std::vector<EngineEvent> look(Point p) {
    const GazeSample s{sample_time(k_++), p.x, p.y};
    samples_.push_back(s);
    auto ev = engine_.ingest(s);
    events_.insert(events_.end(), ev.begin(), ev.end());
    return ev;
  }

  void rest(Point center, int n) {
    for (int i = 0; i < n; ++i) look(center);
  }

  /// Looks at the key's home until its cluster starts moving (bounded).
  bool dwell_on(const Key& key, int max_samples = 120) {
    for (int i = 0; i < max_samples; ++i) {
      const auto ev = look(key.home_position);
      for (const auto& e : ev)
        if (e.kind == EventKind::MovementStarted) {
          onset_ = e.t_ms;
          return true;
        }
    }
    return false;
  }

  /// Follows the key exactly until the engine leaves the moving phase.
  std::vector<EngineEvent> pursue(const Key& key, double travel_px) {
    const auto& params = engine_.layout().params;
    std::vector<EngineEvent> last;
    while (std::holds_alternative<Engine::Moving>(engine_.phase())) {
      const double elapsed = static_cast<double>(sample_time(k_) - onset_);
      last = look(key_position_at(key, elapsed, params.move_speed_px_s, travel_px));
    }
    return last;
  }

  /// Rest, dwell and pursue one key; returns the events of the final sample.
  std::vector<EngineEvent> select(const Key& key, double travel_px, int rest_samples = 6) {
    rest(engine_.layout().screen.center, rest_samples);
    if (!dwell_on(key)) return {};
    return pursue(key, travel_px);
  }

  std::vector<EngineEvent> select(KeyId id) {
    const auto& layout = engine_.layout();
    const Key* key = layout.find_key(id);
    return select(*key, lp_travel(layout, *key, engine_.predictions().top_letters));
  }

  const std::vector<GazeSample>& samples() const { return samples_; }
  const std::vector<EngineEvent>& events() const { return events_; }
  std::int64_t onset() const { return onset_; }
  std::int64_t next_index() const { return k_; }

 private:
  Engine& engine_;
  std::int64_t k_;
  std::int64_t onset_ = 0;
  std::vector<GazeSample> samples_;
  std::vector<EngineEvent> events_;
};

inline std::vector<KeyId> selected_keys(const std::vector<EngineEvent>& events) {
  std::vector<KeyId> out;
  for (const auto& e : events)
    if (e.kind == EventKind::KeySelected) out.push_back(std::get<KeyId>(e.payload));
  return out;
}

}  // namespace eyetype::testing
