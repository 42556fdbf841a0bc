#pragma once

// Sample-driven interaction engine.
//
// Phases: Idle -> Highlight (a cluster is looked at) -> Moving (the cluster's
// keys travel outward and the gaze is recorded) -> Idle. All timing is taken
// from sample timestamps, so replaying a trace reproduces the same events.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "eyetype/geometry.hpp"
#include "eyetype/layout.hpp"
#include "eyetype/prediction.hpp"

namespace eyetype {

struct GazeSample {
  std::int64_t t_ms = 0;
  double x = 0.0;
  double y = 0.0;

  Point position() const { return {x, y}; }
  friend bool operator==(const GazeSample&, const GazeSample&) = default;
};

struct OffsetCorrection {
  double dx = 0.0;
  double dy = 0.0;

  Point apply(Point p) const { return {p.x + dx, p.y + dy}; }
};

inline constexpr std::size_t kMinCalibrationSamples = 10;

class CalibrationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Offset that moves the mean of the fixation samples onto the target.
inline OffsetCorrection calibrate_one_point(std::span<const GazeSample> samples, Point target) {
  if (samples.size() < kMinCalibrationSamples)
    throw CalibrationError("one-point calibration needs at least " +
                           std::to_string(kMinCalibrationSamples) + " samples, got " +
                           std::to_string(samples.size()));
  Point sum;
  for (const auto& s : samples) sum = sum + s.position();
  const Point mean = sum * (1.0 / static_cast<double>(samples.size()));
  return {target.x - mean.x, target.y - mean.y};
}

/// Angle of the ray from `center` to the gaze point, 0 = right, 90 = up.
inline double gaze_angle(Point gaze, Point center) {
  if (gaze == center) throw std::domain_error("gaze angle is undefined at the center");
  return screen_angle_deg(gaze - center);
}

inline double gaze_angle(const GazeSample& sample, Point center) {
  return gaze_angle(sample.position(), center);
}

// Events ----------------------------------------------------------------------

enum class EventKind {
  ClusterHighlighted,
  HighlightCleared,
  MovementStarted,
  KeySelected,
  WordCommitted,
  CharDeleted,
  ResetToIdle,
  NoSelection,
};

inline std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::ClusterHighlighted: return "ClusterHighlighted";
    case EventKind::HighlightCleared: return "HighlightCleared";
    case EventKind::MovementStarted: return "MovementStarted";
    case EventKind::KeySelected: return "KeySelected";
    case EventKind::WordCommitted: return "WordCommitted";
    case EventKind::CharDeleted: return "CharDeleted";
    case EventKind::ResetToIdle: return "ResetToIdle";
    case EventKind::NoSelection: return "NoSelection";
  }
  return "?";
}

inline EventKind parse_event_kind(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(EventKind::NoSelection); ++i)
    if (to_string(static_cast<EventKind>(i)) == s) return static_cast<EventKind>(i);
  throw std::invalid_argument("unknown event kind: " + std::string(s));
}

/// Cluster index, key id, committed/deleted text, or nothing.
using EventPayload = std::variant<std::monostate, int, KeyId, std::string>;

struct EngineEvent {
  std::int64_t t_ms = 0;
  EventKind kind = EventKind::ResetToIdle;
  EventPayload payload;

  friend bool operator==(const EngineEvent&, const EngineEvent&) = default;
};

inline nlohmann::ordered_json to_json(const EngineEvent& e) {
  nlohmann::ordered_json j;
  j["t_ms"] = e.t_ms;
  j["kind"] = to_string(e.kind);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::monostate>) j["payload"] = nullptr;
        else if constexpr (std::is_same_v<T, KeyId>) j["payload"] = to_string(p);
        else j["payload"] = p;
      },
      e.payload);
  return j;
}

inline EngineEvent event_from_json(const nlohmann::json& j) {
  EngineEvent e;
  e.t_ms = j.at("t_ms").get<std::int64_t>();
  e.kind = parse_event_kind(j.at("kind").get<std::string>());
  const auto& p = j.at("payload");
  switch (e.kind) {
    case EventKind::KeySelected: e.payload = parse_key_id(p.get<std::string>()); break;
    case EventKind::WordCommitted:
    case EventKind::CharDeleted: e.payload = p.get<std::string>(); break;
    case EventKind::ResetToIdle: break;
    default: e.payload = p.get<int>(); break;
  }
  return e;
}

inline std::string event_line(const EngineEvent& e) { return to_json(e).dump(); }

// Pursuit classification ------------------------------------------------------

struct EngineOptions {
  /// Minimum pursuit distance as a fraction of the key's travel.
  double min_pursuit_fraction = 1.0 / 3.0;
  /// While a cluster is highlighted, gaze this far outside its sector still
  /// counts toward its dwell.
  double switch_hysteresis_deg = 10.0;
  /// Samples consumed by `begin_calibration`.
  std::size_t calibration_samples = 60;
};

namespace detail {

inline Point mean_position(std::span<const GazeSample> s) {
  Point sum;
  for (const auto& g : s) sum = sum + g.position();
  return sum * (1.0 / static_cast<double>(s.size()));
}

}  // namespace detail

/// Decides which key of the moving cluster the gaze followed, if any.
///
/// Letter clusters move radially, so the key is identified by the angle of
/// the gaze about the screen midpoint over the second half of the window.
/// Arrow keys move along fixed screen directions, so they are identified by
/// the direction of the net gaze displacement (late third minus early third).
/// Either way the nearest trajectory wins only when its angular error is
/// below half the smallest trajectory separation in the cluster, and the
/// gaze must have travelled at least `min_pursuit_fraction` of that key's
/// travel along its trajectory. Only sample order is used, never timestamps.
inline std::optional<KeyId> classify_pursuit(std::span<const GazeSample> window,
                                             const Cluster& cluster, Point center,
                                             std::span<const double> travels,
                                             double min_pursuit_fraction = 1.0 / 3.0) {
  const std::size_t n = window.size();
  if (n < 3 || cluster.keys.size() < 2 || travels.size() != cluster.keys.size())
    return std::nullopt;
  const std::size_t third = n / 3;
  const Point head = detail::mean_position(window.first(third));
  const Point tail = detail::mean_position(window.last(third));
  const Point displacement = tail - head;

  double observed_deg = 0.0;
  if (cluster.kind == ClusterKind::Letters) {
    Point sum;
    for (const auto& g : window.subspan(n / 2)) sum = sum + (g.position() - center);
    if (norm(sum) == 0.0) return std::nullopt;
    observed_deg = screen_angle_deg(sum);
  } else {
    if (norm(displacement) == 0.0) return std::nullopt;
    observed_deg = screen_angle_deg(displacement);
  }

  std::size_t best = 0;
  double best_err = 360.0;
  for (std::size_t i = 0; i < cluster.keys.size(); ++i) {
    const double err = angular_distance_deg(observed_deg, cluster.keys[i].trajectory_angle_deg);
    if (err < best_err) {
      best_err = err;
      best = i;
    }
  }
  if (!(best_err < cluster.min_trajectory_separation_deg() / 2.0)) return std::nullopt;

  const Key& key = cluster.keys[best];
  const Point dir = screen_direction(key.trajectory_angle_deg);
  const double min_px = travels[best] * min_pursuit_fraction;
  const double along = dot(displacement, dir);
  if (cluster.kind == ClusterKind::Letters) {
    const double progress = dot(tail - key.home_position, dir);
    if (progress < min_px || !(along > 0.0)) return std::nullopt;
  } else if (along < min_px) {
    return std::nullopt;
  }
  return key.id;
}

// Engine ----------------------------------------------------------------------

class OutOfOrderSample : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Engine {
 public:
  struct Idle {
    std::optional<int> prev_sector;
    /// False right after a selection until the gaze has visited the idle area.
    bool armed = true;
  };
  struct Highlight {
    int cluster = 0;
    double dwell_ms = 0.0;
    std::optional<int> stray_sector;
  };
  struct Moving {
    int cluster = 0;
    std::int64_t onset_t = 0;
    std::vector<GazeSample> window;
    std::vector<double> travels;
    double duration_ms = 0.0;
    double abort_before_ms = 0.0;
  };
  using Phase = std::variant<Idle, Highlight, Moving>;

  explicit Engine(std::shared_ptr<const InterfaceLayout> layout,
                  std::shared_ptr<const LanguageModel> model = nullptr, EngineOptions options = {})
      : layout_(std::move(layout)), model_(std::move(model)), options_(options) {
    if (!layout_) throw std::invalid_argument("engine requires a layout");
    refresh_predictions();
  }

  const InterfaceLayout& layout() const { return *layout_; }
  const EngineOptions& options() const { return options_; }
  const Phase& phase() const { return phase_; }
  const std::string& buffer() const { return buffer_; }
  std::string_view current_word_prefix() const { return current_prefix(buffer_); }
  const PredictionSet& predictions() const { return predictions_; }
  const OffsetCorrection& offset() const { return offset_; }
  bool calibrating() const { return calibration_.has_value(); }

  void set_offset(OffsetCorrection offset) { offset_ = offset; }

  /// The next `options().calibration_samples` samples are fixations on the
  /// screen midpoint and are used to compute the offset correction.
  void begin_calibration() {
    calibration_.emplace();
    phase_ = Idle{};
  }

  /// Clears the text for a new phrase.
  void reset_text() {
    buffer_.clear();
    refresh_predictions();
  }

  std::vector<EngineEvent> ingest(const GazeSample& raw) {
    if (last_t_ && raw.t_ms <= *last_t_)
      throw OutOfOrderSample("sample at t=" + std::to_string(raw.t_ms) +
                             " ms is not after t=" + std::to_string(*last_t_) + " ms");
    const std::int64_t prev_t = last_t_.value_or(raw.t_ms);
    last_t_ = raw.t_ms;

    if (calibration_) {
      calibration_->push_back(raw);
      if (calibration_->size() >= options_.calibration_samples) {
        offset_ = calibrate_one_point(*calibration_, layout_->screen.center);
        calibration_.reset();
      }
      return {};
    }

    const Point corrected = offset_.apply(raw.position());
    const GazeSample s{raw.t_ms, corrected.x, corrected.y};
    std::vector<EngineEvent> out;
    std::visit([&](auto& phase) { step(phase, s, static_cast<double>(s.t_ms - prev_t), out); },
               phase_);
    return out;
  }

  /// Applies a key to the text buffer, emitting the resulting events.
  std::vector<EngineEvent> commit_key(KeyId key, std::int64_t t_ms) {
    const Key* k = layout_->find_key(key);
    if (!k) throw std::invalid_argument("key " + to_string(key) + " is not part of the layout");
    std::vector<EngineEvent> out;
    if (auto slot = arrow_slot(key)) {
      try {
        auto [text, word] = apply_word_selection(buffer_, *slot, predictions_);
        out.push_back({t_ms, EventKind::KeySelected, key});
        buffer_ = std::move(text);
        out.push_back({t_ms, EventKind::WordCommitted, std::move(word)});
      } catch (const EmptySlotError&) {
        out.push_back({t_ms, EventKind::NoSelection, k->cluster_index});
        return out;
      }
    } else if (is_letter(key)) {
      out.push_back({t_ms, EventKind::KeySelected, key});
      buffer_ += key_letter(key);
    } else if (key == KeyId::Space) {
      out.push_back({t_ms, EventKind::KeySelected, key});
      std::string word(current_prefix(buffer_));
      buffer_ += ' ';
      out.push_back({t_ms, EventKind::WordCommitted, std::move(word)});
    } else {
      out.push_back({t_ms, EventKind::KeySelected, key});
      if (!buffer_.empty()) {
        std::string removed(1, buffer_.back());
        buffer_.pop_back();
        out.push_back({t_ms, EventKind::CharDeleted, std::move(removed)});
      }
    }
    refresh_predictions();
    return out;
  }

 private:
  bool in_idle_area(Point p) const {
    return distance(p, layout_->screen.center) < layout_->params.idle_radius_px;
  }

  int sector_at(Point p) const { return layout_->sector_of(gaze_angle(p, layout_->screen.center)); }

  double outside_by_deg(const Cluster& c, double angle) const {
    if (c.contains(angle)) return 0.0;
    return std::min(angular_distance_deg(angle, c.sector_start_deg),
                    angular_distance_deg(angle, c.sector_end_deg));
  }

  void step(Idle& idle, const GazeSample& s, double, std::vector<EngineEvent>& out) {
    if (in_idle_area(s.position())) {
      idle = Idle{};
      return;
    }
    if (!idle.armed) return;
    const int sector = sector_at(s.position());
    if (idle.prev_sector == sector) {
      out.push_back({s.t_ms, EventKind::ClusterHighlighted, sector});
      phase_ = Highlight{sector, 0.0, std::nullopt};
      return;
    }
    idle.prev_sector = sector;
  }

  void step(Highlight& h, const GazeSample& s, double dt, std::vector<EngineEvent>& out) {
    if (in_idle_area(s.position())) {
      out.push_back({s.t_ms, EventKind::HighlightCleared, h.cluster});
      out.push_back({s.t_ms, EventKind::ResetToIdle, {}});
      phase_ = Idle{};
      return;
    }
    const double angle = gaze_angle(s.position(), layout_->screen.center);
    const Cluster& current = layout_->cluster(h.cluster);
    if (outside_by_deg(current, angle) <= options_.switch_hysteresis_deg) {
      h.stray_sector.reset();
    } else {
      const int sector = layout_->sector_of(angle);
      if (h.stray_sector == sector) {
        out.push_back({s.t_ms, EventKind::HighlightCleared, h.cluster});
        out.push_back({s.t_ms, EventKind::ClusterHighlighted, sector});
        phase_ = Highlight{sector, 0.0, std::nullopt};
        return;
      }
      h.stray_sector = sector;
    }
    h.dwell_ms += dt;
    if (h.dwell_ms >= layout_->params.search_threshold_ms) start_movement(h.cluster, s, out);
  }

  void step(Moving& m, const GazeSample& s, double, std::vector<EngineEvent>& out) {
    const double elapsed = static_cast<double>(s.t_ms - m.onset_t);
    if (elapsed < m.abort_before_ms && in_idle_area(s.position())) {
      out.push_back({s.t_ms, EventKind::ResetToIdle, {}});
      phase_ = Idle{};
      return;
    }
    m.window.push_back(s);
    if (elapsed < m.duration_ms) return;

    const Cluster& cluster = layout_->cluster(m.cluster);
    const auto key = classify_pursuit(m.window, cluster, layout_->screen.center, m.travels,
                                      options_.min_pursuit_fraction);
    const int cluster_index = m.cluster;
    phase_ = Idle{std::nullopt, false};
    if (!key) {
      out.push_back({s.t_ms, EventKind::NoSelection, cluster_index});
      return;
    }
    auto committed = commit_key(*key, s.t_ms);
    out.insert(out.end(), committed.begin(), committed.end());
  }

  void start_movement(int cluster_index, const GazeSample& s, std::vector<EngineEvent>& out) {
    const auto& params = layout_->params;
    const Cluster& cluster = layout_->cluster(cluster_index);
    Moving m;
    m.cluster = cluster_index;
    m.onset_t = s.t_ms;
    m.window.push_back(s);
    m.travels = cluster_travels(*layout_, cluster, predictions_.top_letters);
    const auto [lo, hi] = std::minmax_element(m.travels.begin(), m.travels.end());
    m.duration_ms = params.travel_time_ms(*hi);
    if (cluster.kind == ClusterKind::Arrows)
      m.duration_ms += params.arrow_extra_samples * params.sample_period_ms();
    m.abort_before_ms = params.travel_time_ms(*lo) / 2.0;
    out.push_back({s.t_ms, EventKind::MovementStarted, cluster_index});
    phase_ = std::move(m);
  }

  void refresh_predictions() {
    if (model_) predictions_ = make_predictions(*model_, buffer_, layout_->uses_word_prediction());
    else {
      predictions_ = PredictionSet{};
      predictions_.prefix = std::string(current_prefix(buffer_));
    }
  }

  std::shared_ptr<const InterfaceLayout> layout_;
  std::shared_ptr<const LanguageModel> model_;
  EngineOptions options_;
  Phase phase_ = Idle{};
  std::string buffer_;
  PredictionSet predictions_;
  OffsetCorrection offset_;
  std::optional<std::int64_t> last_t_;
  std::optional<std::vector<GazeSample>> calibration_;
};

}  // namespace eyetype
