#pragma once

// Circular keyboard geometry for the hybrid pursuit interface.
//
// Clusters occupy equal angular sectors around the screen midpoint. Each
// letter cluster holds four keys whose trajectories fan evenly across the
// sector; the optional arrow cluster sits in the bottom sector and moves its
// three keys up, left and right.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eyetype/geometry.hpp"

namespace eyetype {

enum class KeyId : std::uint8_t {
  A, B, C, D, E, F, G, H, I, J, K, L, M,
  N, O, P, Q, R, S, T, U, V, W, X, Y, Z,
  Space,
  Delete,
  ArrowUp,
  ArrowLeft,
  ArrowRight,
};

inline constexpr std::size_t kKeyIdCount = 31;

inline bool is_letter(KeyId k) { return k <= KeyId::Z; }
inline bool is_arrow(KeyId k) { return k >= KeyId::ArrowUp; }

inline char key_letter(KeyId k) {
  return static_cast<char>('a' + static_cast<int>(k));
}

inline std::optional<KeyId> letter_key(char c) {
  if (c >= 'a' && c <= 'z') return static_cast<KeyId>(c - 'a');
  if (c >= 'A' && c <= 'Z') return static_cast<KeyId>(c - 'A');
  return std::nullopt;
}

inline std::string to_string(KeyId k) {
  if (is_letter(k)) return std::string(1, static_cast<char>('A' + static_cast<int>(k)));
  switch (k) {
    case KeyId::Space: return "SP";
    case KeyId::Delete: return "DEL";
    case KeyId::ArrowUp: return "ARROW_UP";
    case KeyId::ArrowLeft: return "ARROW_LEFT";
    case KeyId::ArrowRight: return "ARROW_RIGHT";
    default: break;
  }
  throw std::logic_error("unreachable key id");
}

inline KeyId parse_key_id(std::string_view s) {
  if (s.size() == 1) {
    if (auto k = letter_key(s[0])) return *k;
  }
  if (s == "SP") return KeyId::Space;
  if (s == "DEL") return KeyId::Delete;
  if (s == "ARROW_UP") return KeyId::ArrowUp;
  if (s == "ARROW_LEFT") return KeyId::ArrowLeft;
  if (s == "ARROW_RIGHT") return KeyId::ArrowRight;
  throw std::invalid_argument("unknown key id: " + std::string(s));
}

enum class Variant { NoP, LP, LWP };
enum class Revision { Exp1, Exp2 };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::NoP: return "NoP";
    case Variant::LP: return "LP";
    case Variant::LWP: return "L+WP";
  }
  return "?";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "NoP" || s == "nop") return Variant::NoP;
  if (s == "LP" || s == "lp") return Variant::LP;
  if (s == "L+WP" || s == "L_WP" || s == "LWP" || s == "l+wp" || s == "lwp") return Variant::LWP;
  throw std::invalid_argument("unknown variant: " + std::string(s));
}

inline std::string to_string(Revision r) { return r == Revision::Exp1 ? "exp1" : "exp2"; }

inline Revision parse_revision(std::string_view s) {
  if (s == "exp1") return Revision::Exp1;
  if (s == "exp2") return Revision::Exp2;
  throw std::invalid_argument("unknown revision: " + std::string(s));
}

struct ScreenConfig {
  int width_px = 1920;
  int height_px = 1200;
  Point center{960.0, 600.0};
  double px_per_degree = 39.0;

  void validate() const {
    if (width_px <= 0 || height_px <= 0)
      throw std::invalid_argument("screen dimensions must be positive");
    if (!(center.x >= 0.0 && center.x < width_px && center.y >= 0.0 && center.y < height_px))
      throw std::invalid_argument("screen center must lie inside the screen");
    if (!(px_per_degree > 0.0)) throw std::invalid_argument("px_per_degree must be positive");
  }
};

/// Angular speed (deg/s of visual angle) to screen speed.
inline double speed_px_per_s(double deg_per_s, const ScreenConfig& screen) {
  return deg_per_s * screen.px_per_degree;
}

struct LayoutParams {
  double idle_radius_px = 160.0;
  double key_ring_radius_px = 280.0;
  double move_distance_px = 94.0;
  double lp_move_distance_px = 68.0;
  double arrow_distance_px = 141.0;
  double move_speed_px_s = 250.0;
  double search_threshold_ms = 600.0;
  int arrow_extra_samples = 15;
  double sample_rate_hz = 60.0;

  void validate() const {
    if (!(idle_radius_px > 0.0 && idle_radius_px < key_ring_radius_px))
      throw std::invalid_argument("require 0 < idle_radius_px < key_ring_radius_px");
    if (!(lp_move_distance_px > 0.0 && lp_move_distance_px < move_distance_px &&
          move_distance_px < arrow_distance_px))
      throw std::invalid_argument(
          "require 0 < lp_move_distance_px < move_distance_px < arrow_distance_px");
    if (!(move_speed_px_s > 0.0)) throw std::invalid_argument("move_speed_px_s must be positive");
    if (!(search_threshold_ms > 0.0))
      throw std::invalid_argument("search_threshold_ms must be positive");
    if (arrow_extra_samples < 0) throw std::invalid_argument("arrow_extra_samples must be >= 0");
    if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("sample_rate_hz must be positive");
  }

  double sample_period_ms() const { return 1000.0 / sample_rate_hz; }
  double travel_time_ms(double travel_px) const { return travel_px / move_speed_px_s * 1000.0; }
};

struct Key {
  KeyId id = KeyId::A;
  int cluster_index = 0;
  Point home_position;
  double trajectory_angle_deg = 0.0;
  double travel_px = 0.0;
};

enum class ClusterKind { Letters, Arrows };

struct Cluster {
  int index = 0;
  ClusterKind kind = ClusterKind::Letters;
  double sector_start_deg = 0.0;  // inclusive
  double sector_end_deg = 0.0;    // exclusive; may wrap past 0
  std::vector<Key> keys;

  double sector_width_deg() const {
    const double w = normalize_deg(sector_end_deg - sector_start_deg);
    return w == 0.0 ? 360.0 : w;
  }

  bool contains(double angle_deg) const {
    return normalize_deg(angle_deg - sector_start_deg) < sector_width_deg();
  }

  double bisector_deg() const { return normalize_deg(sector_start_deg + sector_width_deg() / 2.0); }

  const Key* find(KeyId id) const {
    auto it = std::find_if(keys.begin(), keys.end(), [id](const Key& k) { return k.id == id; });
    return it == keys.end() ? nullptr : &*it;
  }

  /// Smallest pairwise angular separation between key trajectories.
  double min_trajectory_separation_deg() const {
    double best = 360.0;
    for (std::size_t i = 0; i < keys.size(); ++i)
      for (std::size_t j = i + 1; j < keys.size(); ++j)
        best = std::min(best, angular_distance_deg(keys[i].trajectory_angle_deg,
                                                   keys[j].trajectory_angle_deg));
    return best;
  }
};

/// Index of the cluster whose half-open sector contains the angle.
inline int sector_of(const std::vector<Cluster>& clusters, double angle_deg) {
  const double a = normalize_deg(angle_deg);
  for (const auto& c : clusters)
    if (c.contains(a)) return c.index;
  throw std::logic_error("cluster sectors do not cover the full circle");
}

struct InterfaceLayout {
  Variant variant = Variant::NoP;
  Revision revision = Revision::Exp1;
  ScreenConfig screen;
  LayoutParams params;
  std::vector<Cluster> clusters;

  int sector_of(double angle_deg) const { return eyetype::sector_of(clusters, angle_deg); }

  const Cluster& cluster(int index) const { return clusters.at(static_cast<std::size_t>(index)); }

  const Key* find_key(KeyId id) const {
    for (const auto& c : clusters)
      if (const Key* k = c.find(id)) return k;
    return nullptr;
  }

  std::optional<int> arrow_cluster() const {
    for (const auto& c : clusters)
      if (c.kind == ClusterKind::Arrows) return c.index;
    return std::nullopt;
  }

  std::size_t key_count() const {
    std::size_t n = 0;
    for (const auto& c : clusters) n += c.keys.size();
    return n;
  }

  bool uses_letter_prediction() const { return variant != Variant::NoP; }
  bool uses_word_prediction() const { return variant == Variant::LWP; }
};

namespace detail {

inline std::vector<std::array<KeyId, 4>> letter_groups(Revision revision) {
  using enum KeyId;
  std::vector<std::array<KeyId, 4>> groups{
      {A, B, C, D}, {E, F, G, H}, {I, J, K, L}, {M, N, O, P},
      {Q, R, S, T}, {U, V, W, X}, {Y, Z, Space, Delete},
  };
  if (revision == Revision::Exp2) std::swap(groups[5][3], groups[6][3]);
  return groups;
}

inline void check_consistency(const InterfaceLayout& layout) {
  std::array<int, kKeyIdCount> seen{};
  for (const auto& c : layout.clusters)
    for (const auto& k : c.keys) ++seen[static_cast<std::size_t>(k.id)];
  for (int i = 0; i <= static_cast<int>(KeyId::Delete); ++i)
    if (seen[static_cast<std::size_t>(i)] != 1)
      throw std::logic_error("layout must contain key " + to_string(static_cast<KeyId>(i)) +
                             " exactly once");
  const int arrows = seen[static_cast<std::size_t>(KeyId::ArrowUp)] +
                     seen[static_cast<std::size_t>(KeyId::ArrowLeft)] +
                     seen[static_cast<std::size_t>(KeyId::ArrowRight)];
  if (arrows != (layout.variant == Variant::LWP ? 3 : 0))
    throw std::logic_error("arrow keys inconsistent with variant");
}

}  // namespace detail

/// Builds the keyboard for a variant and revision. Letter clusters are laid
/// out clockwise starting from the upper-left sector; L+WP reserves the
/// bottom sector for the arrow cluster, which always gets the last index.
inline InterfaceLayout build_layout(Variant variant, Revision revision,
                                    const ScreenConfig& screen = {},
                                    const LayoutParams& params = {}) {
  screen.validate();
  params.validate();

  InterfaceLayout layout{variant, revision, screen, params, {}};
  const bool with_arrows = variant == Variant::LWP;
  const int sectors = with_arrows ? 8 : 7;
  const double width = 360.0 / sectors;
  constexpr double kFirstBisector = 135.0;  // upper-left
  const int arrow_slot = with_arrows ? 5 : -1;  // 135 - 5 * 45 = -90, the bottom

  auto key_at = [&](KeyId id, int cluster, double trajectory_deg, double home_deg,
                    double travel) {
    Key k;
    k.id = id;
    k.cluster_index = cluster;
    k.home_position = screen.center + screen_direction(home_deg) * params.key_ring_radius_px;
    k.trajectory_angle_deg = normalize_deg(trajectory_deg);
    k.travel_px = travel;
    return k;
  };

  const auto groups = detail::letter_groups(revision);
  std::size_t next_group = 0;
  std::optional<Cluster> arrow_cluster;
  for (int slot = 0; slot < sectors; ++slot) {
    const double bisector = normalize_deg(kFirstBisector - slot * width);
    Cluster c;
    c.sector_start_deg = normalize_deg(bisector - width / 2.0);
    c.sector_end_deg = normalize_deg(bisector + width / 2.0);
    if (slot == arrow_slot) {
      c.kind = ClusterKind::Arrows;
      c.index = sectors - 1;
      const double spread = width / 3.0;
      c.keys.push_back(key_at(KeyId::ArrowUp, c.index, 90.0, bisector, params.arrow_distance_px));
      c.keys.push_back(key_at(KeyId::ArrowLeft, c.index, 180.0, bisector - spread,
                              params.arrow_distance_px));
      c.keys.push_back(key_at(KeyId::ArrowRight, c.index, 0.0, bisector + spread,
                              params.arrow_distance_px));
      arrow_cluster = std::move(c);
      continue;
    }
    c.kind = ClusterKind::Letters;
    c.index = static_cast<int>(next_group);
    const auto& group = groups.at(next_group++);
    const double spacing = width / static_cast<double>(group.size());
    const double half = (static_cast<double>(group.size()) - 1.0) / 2.0;
    for (std::size_t j = 0; j < group.size(); ++j) {
      // clockwise within the cluster: first key gets the largest angle
      const double angle = bisector + (half - static_cast<double>(j)) * spacing;
      c.keys.push_back(key_at(group[j], c.index, angle, angle, params.move_distance_px));
    }
    layout.clusters.push_back(std::move(c));
  }
  if (arrow_cluster) layout.clusters.push_back(std::move(*arrow_cluster));

  detail::check_consistency(layout);
  return layout;
}

/// Key position after `elapsed_ms` of outward movement with an explicit travel.
inline Point key_position_at(const Key& key, double elapsed_ms, double speed_px_s,
                             double travel_px) {
  const double moved = std::min(speed_px_s * std::max(elapsed_ms, 0.0) / 1000.0, travel_px);
  return key.home_position + screen_direction(key.trajectory_angle_deg) * moved;
}

inline Point key_position_at(const Key& key, double elapsed_ms, const LayoutParams& params) {
  return key_position_at(key, elapsed_ms, params.move_speed_px_s, key.travel_px);
}

// JSON ------------------------------------------------------------------------

inline nlohmann::json to_json(const ScreenConfig& s) {
  return {{"width_px", s.width_px},
          {"height_px", s.height_px},
          {"center", {s.center.x, s.center.y}},
          {"px_per_degree", s.px_per_degree}};
}

inline nlohmann::json to_json(const LayoutParams& p) {
  return {{"idle_radius_px", p.idle_radius_px},
          {"key_ring_radius_px", p.key_ring_radius_px},
          {"move_distance_px", p.move_distance_px},
          {"lp_move_distance_px", p.lp_move_distance_px},
          {"arrow_distance_px", p.arrow_distance_px},
          {"move_speed_px_s", p.move_speed_px_s},
          {"search_threshold_ms", p.search_threshold_ms},
          {"arrow_extra_samples", p.arrow_extra_samples},
          {"sample_rate_hz", p.sample_rate_hz}};
}

inline nlohmann::json to_json(const InterfaceLayout& layout) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : layout.clusters) {
    nlohmann::json keys = nlohmann::json::array();
    for (const auto& k : c.keys)
      keys.push_back({{"id", to_string(k.id)},
                      {"cluster_index", k.cluster_index},
                      {"home", {k.home_position.x, k.home_position.y}},
                      {"trajectory_angle_deg", k.trajectory_angle_deg},
                      {"travel_px", k.travel_px}});
    clusters.push_back({{"index", c.index},
                        {"kind", c.kind == ClusterKind::Arrows ? "arrows" : "letters"},
                        {"sector_start_deg", c.sector_start_deg},
                        {"sector_end_deg", c.sector_end_deg},
                        {"keys", std::move(keys)}});
  }
  return {{"variant", to_string(layout.variant)},
          {"revision", to_string(layout.revision)},
          {"screen", to_json(layout.screen)},
          {"params", to_json(layout.params)},
          {"clusters", std::move(clusters)}};
}

/// Reads LayoutParams from JSON; missing keys keep their defaults.
inline LayoutParams layout_params_from_json(const nlohmann::json& j, LayoutParams p = {}) {
  p.idle_radius_px = j.value("idle_radius_px", p.idle_radius_px);
  p.key_ring_radius_px = j.value("key_ring_radius_px", p.key_ring_radius_px);
  p.move_distance_px = j.value("move_distance_px", p.move_distance_px);
  p.lp_move_distance_px = j.value("lp_move_distance_px", p.lp_move_distance_px);
  p.arrow_distance_px = j.value("arrow_distance_px", p.arrow_distance_px);
  p.move_speed_px_s = j.value("move_speed_px_s", p.move_speed_px_s);
  p.search_threshold_ms = j.value("search_threshold_ms", p.search_threshold_ms);
  p.arrow_extra_samples = j.value("arrow_extra_samples", p.arrow_extra_samples);
  p.sample_rate_hz = j.value("sample_rate_hz", p.sample_rate_hz);
  p.validate();
  return p;
}

inline ScreenConfig screen_from_json(const nlohmann::json& j, ScreenConfig s = {}) {
  s.width_px = j.value("width_px", s.width_px);
  s.height_px = j.value("height_px", s.height_px);
  if (j.contains("center")) {
    const auto& c = j.at("center");
    s.center = {c.at(0).get<double>(), c.at(1).get<double>()};
  } else {
    s.center = {s.width_px / 2.0, s.height_px / 2.0};
  }
  s.px_per_degree = j.value("px_per_degree", s.px_per_degree);
  s.validate();
  return s;
}

}  // namespace eyetype
