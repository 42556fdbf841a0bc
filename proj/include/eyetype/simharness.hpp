#pragma once

// Synthetic users and desk-scale experiment runner.
//
// A trial is planned open-loop (which keys the user will pursue, including
// slips and corrections), turned into a 60 Hz gaze trace by a user that
// watches a shadow engine the way a person watches the screen, and finally
// replayed through a fresh engine to produce the logged events.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "eyetype/engine.hpp"
#include "eyetype/layout.hpp"
#include "eyetype/metrics.hpp"
#include "eyetype/phrase_set.hpp"
#include "eyetype/prediction.hpp"
#include "eyetype/report.hpp"
#include "eyetype/trace_io.hpp"

namespace eyetype {

using Rng = std::mt19937_64;

// User model ------------------------------------------------------------------

/// Practice effect: multiplier(s) = floor + (1 - floor) * exp(-(s - 1) / tau).
struct SkillCurve {
  double floor = 0.6;
  double tau_sessions = 2.0;

  double progress(int session) const {
    return 1.0 - std::exp(-static_cast<double>(std::max(session, 1) - 1) / tau_sessions);
  }
  double multiplier(int session) const { return 1.0 - (1.0 - floor) * progress(session); }
};

struct UserModel {
  double fixation_noise_sigma_deg = 0.5;
  double locate_latency_mean_ms = 2000.0;
  double locate_latency_sd_ms = 500.0;
  double pursuit_latency_ms = 100.0;
  double pursuit_gain = 0.9;
  double prediction_scan_ms = 600.0;
  /// Adoption probability once practiced; starts at initial_adoption_prob.
  double prediction_adoption_prob = 0.9;
  double initial_adoption_prob = 0.2;
  double slip_prob = 0.05;
  /// An unpracticed user's slip probability scales with
  /// (speed / 250 px/s) ^ exponent; the extra fades with practice.
  double slip_speed_exponent = 2.0;
  /// Chance that a slip is noticed and corrected with DEL.
  double notice_prob = 0.9;
  /// Systematic tracker offset per trial, removed by calibration.
  double tracker_offset_sigma_deg = 0.5;
  /// Between-user log-normal spread of latencies and slip rate.
  double user_spread = 0.15;
  SkillCurve skill_curve;
  std::uint64_t rng_seed = 1;

  void validate() const {
    auto prob = [](double p, const char* name) {
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
    };
    prob(prediction_adoption_prob, "prediction_adoption_prob");
    prob(initial_adoption_prob, "initial_adoption_prob");
    prob(slip_prob, "slip_prob");
    prob(notice_prob, "notice_prob");
    if (!(fixation_noise_sigma_deg >= 0.0 && tracker_offset_sigma_deg >= 0.0 && user_spread >= 0.0))
      throw std::invalid_argument("noise and spread parameters must be >= 0");
    if (!(locate_latency_mean_ms >= 0.0 && locate_latency_sd_ms >= 0.0 &&
          pursuit_latency_ms >= 0.0 && prediction_scan_ms >= 0.0))
      throw std::invalid_argument("latencies must be >= 0");
    if (!(pursuit_gain > 0.0 && pursuit_gain <= 1.0))
      throw std::invalid_argument("pursuit_gain must lie in (0, 1]");
    if (!(skill_curve.floor > 0.0 && skill_curve.tau_sessions > 0.0))
      throw std::invalid_argument("skill curve multipliers must be > 0");
  }

  /// The user as they behave in `session` at the given key speed. The
  /// returned model has the practice effect folded in.
  UserModel for_session(int session, double speed_px_s) const {
    UserModel u = *this;
    const double m = skill_curve.multiplier(session);
    u.locate_latency_mean_ms *= m;
    u.locate_latency_sd_ms *= m;
    u.pursuit_latency_ms *= m;
    u.prediction_scan_ms *= m;
    // a faster speed costs accuracy mainly before the user has adapted to it
    const double speed_penalty = std::pow(speed_px_s / 250.0, slip_speed_exponent) - 1.0;
    const double adapted = 1.0 + speed_penalty * (1.0 - skill_curve.progress(session));
    u.slip_prob = std::min(1.0, slip_prob * m * adapted);
    u.prediction_adoption_prob =
        initial_adoption_prob +
        (prediction_adoption_prob - initial_adoption_prob) * skill_curve.progress(session);
    u.initial_adoption_prob = u.prediction_adoption_prob;
    u.skill_curve = SkillCurve{1.0, 1.0};
    return u;
  }

  /// An individual drawn around this population model.
  UserModel individual(Rng& rng) const {
    UserModel u = *this;
    std::normal_distribution<double> z(0.0, user_spread);
    u.locate_latency_mean_ms *= std::exp(z(rng));
    u.pursuit_latency_ms *= std::exp(z(rng));
    u.prediction_scan_ms *= std::exp(z(rng));
    u.slip_prob = std::min(1.0, slip_prob * std::exp(z(rng)));
    return u;
  }
};

inline nlohmann::json to_json(const UserModel& u) {
  return {{"fixation_noise_sigma_deg", u.fixation_noise_sigma_deg},
          {"locate_latency_mean_ms", u.locate_latency_mean_ms},
          {"locate_latency_sd_ms", u.locate_latency_sd_ms},
          {"pursuit_latency_ms", u.pursuit_latency_ms},
          {"pursuit_gain", u.pursuit_gain},
          {"prediction_scan_ms", u.prediction_scan_ms},
          {"prediction_adoption_prob", u.prediction_adoption_prob},
          {"initial_adoption_prob", u.initial_adoption_prob},
          {"slip_prob", u.slip_prob},
          {"slip_speed_exponent", u.slip_speed_exponent},
          {"notice_prob", u.notice_prob},
          {"tracker_offset_sigma_deg", u.tracker_offset_sigma_deg},
          {"user_spread", u.user_spread},
          {"skill_curve", {{"floor", u.skill_curve.floor}, {"tau_sessions", u.skill_curve.tau_sessions}}},
          {"rng_seed", u.rng_seed}};
}

inline UserModel user_model_from_json(const nlohmann::json& j, UserModel u = {}) {
  u.fixation_noise_sigma_deg = j.value("fixation_noise_sigma_deg", u.fixation_noise_sigma_deg);
  u.locate_latency_mean_ms = j.value("locate_latency_mean_ms", u.locate_latency_mean_ms);
  u.locate_latency_sd_ms = j.value("locate_latency_sd_ms", u.locate_latency_sd_ms);
  u.pursuit_latency_ms = j.value("pursuit_latency_ms", u.pursuit_latency_ms);
  u.pursuit_gain = j.value("pursuit_gain", u.pursuit_gain);
  u.prediction_scan_ms = j.value("prediction_scan_ms", u.prediction_scan_ms);
  u.prediction_adoption_prob = j.value("prediction_adoption_prob", u.prediction_adoption_prob);
  u.initial_adoption_prob = j.value("initial_adoption_prob", u.initial_adoption_prob);
  u.slip_prob = j.value("slip_prob", u.slip_prob);
  u.slip_speed_exponent = j.value("slip_speed_exponent", u.slip_speed_exponent);
  u.notice_prob = j.value("notice_prob", u.notice_prob);
  u.tracker_offset_sigma_deg = j.value("tracker_offset_sigma_deg", u.tracker_offset_sigma_deg);
  u.user_spread = j.value("user_spread", u.user_spread);
  if (j.contains("skill_curve")) {
    const auto& s = j.at("skill_curve");
    u.skill_curve.floor = s.value("floor", u.skill_curve.floor);
    u.skill_curve.tau_sessions = s.value("tau_sessions", u.skill_curve.tau_sessions);
  }
  u.rng_seed = j.value("rng_seed", u.rng_seed);
  u.validate();
  return u;
}

// Planning --------------------------------------------------------------------

struct PlannedAction {
  KeyId key = KeyId::A;       // key whose movement the gaze will follow
  KeyId intended = KeyId::A;  // key the user meant
  bool correction = false;    // DEL issued to undo a noticed slip
  bool scanned = false;       // predictions were read before acting
  std::string word;           // word an arrow is expected to commit

  bool slip() const { return key != intended; }
};

struct ActionPlan {
  std::string phrase;
  std::vector<PlannedAction> actions;
  std::string expected_text;  // buffer if every action lands as planned
};

class PlanError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline bool plannable(std::string_view phrase) {
  return std::all_of(phrase.begin(), phrase.end(),
                     [](char c) { return (c >= 'a' && c <= 'z') || c == ' '; });
}

/// Keys next to `key` in its cluster that a slip can land on. DEL is never a
/// slip target, and arrows only slip onto slots that currently hold a word.
inline std::vector<KeyId> slip_neighbours(const InterfaceLayout& layout, KeyId key,
                                          const PredictionSet& preds) {
  const Key* k = layout.find_key(key);
  const auto& keys = layout.cluster(k->cluster_index).keys;
  std::vector<KeyId> out;
  if (is_arrow(key)) {
    for (const auto& other : keys)
      if (other.id != key && !preds.slot(*arrow_slot(other.id)).empty()) out.push_back(other.id);
    return out;
  }
  const auto pos = static_cast<std::size_t>(std::distance(
      keys.begin(), std::find_if(keys.begin(), keys.end(), [&](const Key& x) { return x.id == key; })));
  for (std::size_t i : {pos - 1, pos + 1})
    if (i < keys.size() && keys[i].id != KeyId::Delete) out.push_back(keys[i].id);
  return out;
}

inline void apply_key(std::string& buffer, KeyId key, const PredictionSet& preds) {
  if (auto slot = arrow_slot(key)) buffer = apply_word_selection(buffer, *slot, preds).first;
  else if (is_letter(key)) buffer += key_letter(key);
  else if (key == KeyId::Space) buffer += ' ';
  else if (!buffer.empty()) buffer.pop_back();
}

}  // namespace detail

/// Greedy open-loop plan for typing `phrase` followed by a space.
///
/// At each step the user either corrects a noticed slip with DEL, adopts a
/// visible prediction for the current target word (arrow), or selects the
/// next letter. Slips pursue an adjacent key; an unnoticed slip is accepted as
/// typed, and a word committed by a slipped arrow is never corrected.
inline ActionPlan plan_actions(std::string_view phrase, const InterfaceLayout& layout,
                               const LanguageModel* model, const UserModel& user, Rng& rng) {
  if (!detail::plannable(phrase))
    throw PlanError("phrase must contain only a-z and spaces: \"" + std::string(phrase) + "\"");
  if (phrase.empty()) throw PlanError("phrase must not be empty");

  const std::string target = std::string(phrase) + ' ';
  std::bernoulli_distribution adopt(user.prediction_adoption_prob);
  std::bernoulli_distribution slip(user.slip_prob);
  std::bernoulli_distribution notice(user.notice_prob);

  ActionPlan plan;
  plan.phrase = std::string(phrase);
  std::string buffer;
  std::size_t pos = 0;   // characters of the target the user considers done
  int pending_dels = 0;  // noticed errors at the end of the buffer
  const std::size_t max_actions = 6 * target.size() + 20;
  const bool words = layout.uses_word_prediction() && model != nullptr;

  auto predictions = [&] {
    return model ? make_predictions(*model, buffer, layout.uses_word_prediction()) : PredictionSet{};
  };

  while (pos < target.size() || pending_dels > 0) {
    if (plan.actions.size() >= max_actions)
      throw PlanError("plan exceeded " + std::to_string(max_actions) + " actions");
    const PredictionSet preds = predictions();

    if (pending_dels > 0) {
      plan.actions.push_back({KeyId::Delete, KeyId::Delete, true, false, {}});
      detail::apply_key(buffer, KeyId::Delete, preds);
      --pending_dels;
      continue;
    }

    PlannedAction a;
    if (words && target[pos] != ' ' && adopt(rng)) {
      a.scanned = true;
      const std::size_t start = target.rfind(' ', pos) == std::string::npos ? 0 : target.rfind(' ', pos) + 1;
      const std::size_t end = target.find(' ', pos);
      const std::string word = target.substr(start, end - start);
      if (auto slot = preds.slot_of(word)) {
        a.key = a.intended = slot_key(*slot);
        a.word = word;
        if (slip(rng)) {
          const auto n = detail::slip_neighbours(layout, a.key, preds);
          if (!n.empty()) {
            a.key = n[std::uniform_int_distribution<std::size_t>(0, n.size() - 1)(rng)];
            a.word = preds.slot(*arrow_slot(a.key));
          }
        }
        detail::apply_key(buffer, a.key, preds);
        pos = end + 1;
        plan.actions.push_back(std::move(a));
        continue;
      }
    }

    const char c = target[pos];
    a.intended = a.key = c == ' ' ? KeyId::Space : *letter_key(c);
    if (slip(rng)) {
      const auto n = detail::slip_neighbours(layout, a.intended, preds);
      if (!n.empty()) a.key = n[std::uniform_int_distribution<std::size_t>(0, n.size() - 1)(rng)];
    }
    detail::apply_key(buffer, a.key, preds);
    if (!a.slip() || !notice(rng)) ++pos;
    else pending_dels = 1;
    plan.actions.push_back(std::move(a));
  }
  plan.expected_text = buffer;
  return plan;
}

// Gaze synthesis --------------------------------------------------------------

struct SynthOptions {
  int max_attempts = 3;         // tries per action before the user gives up
  double hold_cap_ms = 1500.0;  // extra hold beyond the threshold before looking away
  std::int64_t t0_ms = 0;
};

struct SynthResult {
  std::vector<TraceRecord> trace;
  std::vector<EngineEvent> events;  // emitted by the shadow engine
  int retries = 0;
  int abandoned = 0;
};

namespace detail {

class GazeWriter {
 public:
  GazeWriter(Engine& engine, const UserModel& user, Rng& rng, std::int64_t t0, Point offset)
      : engine_(engine),
        rng_(rng),
        noise_(0.0, user.fixation_noise_sigma_deg * engine.layout().screen.px_per_degree),
        t0_(t0),
        offset_(offset) {}

  std::int64_t next_t() const { return t0_ + (k_ * 1000) / 60; }

  /// Emits one sample looking at `p` and returns the events it caused.
  std::vector<EngineEvent> look(Point p, std::vector<TraceRecord>& trace,
                                std::vector<EngineEvent>& all) {
    GazeSample s{next_t(), round2(p.x + offset_.x + noise_(rng_)),
                 round2(p.y + offset_.y + noise_(rng_))};
    ++k_;
    trace.emplace_back(s);
    auto ev = engine_.ingest(s);
    all.insert(all.end(), ev.begin(), ev.end());
    return ev;
  }

 private:
  static double round2(double v) { return std::round(v * 100.0) / 100.0; }

  Engine& engine_;
  Rng& rng_;
  std::normal_distribution<double> noise_;
  std::int64_t t0_;
  std::int64_t k_ = 0;
  Point offset_;
};

inline bool has_kind(const std::vector<EngineEvent>& ev, EventKind kind) {
  return std::any_of(ev.begin(), ev.end(), [&](const EngineEvent& e) { return e.kind == kind; });
}

}  // namespace detail

/// Turns a plan into a gaze trace. The user looks at the screen midpoint for
/// calibration, then for every action: rests in the idle area while finding
/// the next key (plus reading time when predictions were scanned), jumps to
/// the key, holds until it starts to move and follows it with the given
/// latency and gain. A failed selection is retried.
inline SynthResult synth_gaze(const ActionPlan& plan, std::shared_ptr<const InterfaceLayout> layout,
                              std::shared_ptr<const LanguageModel> model, const UserModel& user,
                              Rng& rng, SynthOptions options = {}) {
  if (plan.actions.empty()) throw std::invalid_argument("cannot synthesize an empty plan");
  const auto& screen = layout->screen;
  const auto& params = layout->params;
  const Point center = screen.center;
  const double period = params.sample_period_ms();

  Engine engine(layout, model);
  SynthResult out;
  std::normal_distribution<double> offset_draw(0.0, user.tracker_offset_sigma_deg * screen.px_per_degree);
  const Point offset{offset_draw(rng), offset_draw(rng)};
  detail::GazeWriter gaze(engine, user, rng, options.t0_ms, offset);
  auto look = [&](Point p) { return gaze.look(p, out.trace, out.events); };

  out.trace.emplace_back(StartPhrase{plan.phrase});
  engine.reset_text();
  out.trace.emplace_back(CalibrateStart{});
  engine.begin_calibration();
  for (std::size_t i = 0; i < engine.options().calibration_samples; ++i) look(center);

  std::normal_distribution<double> locate(user.locate_latency_mean_ms, user.locate_latency_sd_ms);
  const auto hold_cap = static_cast<int>((params.search_threshold_ms + options.hold_cap_ms) / period);

  for (const auto& action : plan.actions) {
    const Key* key = layout->find_key(action.key);
    if (!key) throw std::invalid_argument("plan uses key " + to_string(action.key) + " absent from layout");
    const Point dir = screen_direction(key->trajectory_angle_deg);

    bool done = false;
    for (int attempt = 0; attempt < options.max_attempts && !done; ++attempt) {
      if (attempt > 0) ++out.retries;
      // Back to the middle; wait for any running movement to finish.
      while (!std::holds_alternative<Engine::Idle>(engine.phase())) look(center);
      double rest = std::max(locate(rng), 2.0 * period);
      if (action.scanned) rest += user.prediction_scan_ms;
      for (int i = 0, n = std::max(2, static_cast<int>(std::lround(rest / period))); i < n; ++i)
        look(center);

      // Saccade and hold.
      const Point home = key->home_position;
      look(center + (home - center) * (1.0 / 3.0));
      look(center + (home - center) * (2.0 / 3.0));
      bool moving = false;
      for (int i = 0; i < hold_cap && !moving; ++i) {
        const auto ev = look(home);
        moving = detail::has_kind(ev, EventKind::MovementStarted);
      }
      if (!moving) continue;
      const auto* m = std::get_if<Engine::Moving>(&engine.phase());
      if (!m || m->cluster != key->cluster_index) continue;  // wrong cluster: look away

      const auto& keys = layout->cluster(m->cluster).keys;
      const auto idx = static_cast<std::size_t>(
          std::find_if(keys.begin(), keys.end(), [&](const Key& k) { return k.id == key->id; }) -
          keys.begin());
      const double travel = m->travels.at(idx);
      const std::int64_t onset = m->onset_t;

      // Pursuit until the engine decides.
      std::vector<EngineEvent> last;
      while (std::holds_alternative<Engine::Moving>(engine.phase())) {
        const double elapsed = static_cast<double>(gaze.next_t() - onset);
        const double along = std::clamp(
            user.pursuit_gain * params.move_speed_px_s * (elapsed - user.pursuit_latency_ms) / 1000.0,
            0.0, travel);
        last = look(home + dir * along);
      }
      done = detail::has_kind(last, EventKind::KeySelected);
    }
    if (!done) ++out.abandoned;
  }
  // Settle back in the idle area so the trace ends at rest.
  for (int i = 0; i < 2 || !std::holds_alternative<Engine::Idle>(engine.phase()); ++i) look(center);
  return out;
}

// Trials and experiments ------------------------------------------------------

struct Condition {
  Variant variant = Variant::NoP;
  Revision revision = Revision::Exp1;
  double speed_px_s = 250.0;
  std::string label;  // defaults to the variant name

  std::string name() const { return label.empty() ? to_string(variant) : label; }
};

struct TrialResult {
  TrialRow row;
  std::vector<TraceRecord> trace;
  std::vector<EngineEvent> events;
  ActionPlan plan;
  int retries = 0;
  int abandoned = 0;
};

/// Plans, synthesizes and replays one phrase. `user` must already be the
/// session-adjusted individual.
inline TrialResult run_trial(const std::string& phrase, std::shared_ptr<const InterfaceLayout> layout,
                             std::shared_ptr<const LanguageModel> model, const UserModel& user,
                             std::uint64_t seed) {
  Rng rng(seed);
  TrialResult r;
  r.plan = plan_actions(phrase, *layout, model.get(), user, rng);
  auto synth = synth_gaze(r.plan, layout, model, user, rng);
  r.retries = synth.retries;
  r.abandoned = synth.abandoned;
  r.trace = std::move(synth.trace);

  Engine engine(layout, model);
  auto replayed = replay(r.trace, engine);
  if (replayed.events != synth.events)
    throw std::logic_error("replayed events differ from the live run");
  r.events = std::move(replayed.events);

  r.row.variant = layout->variant;
  r.row.revision = layout->revision;
  r.row.speed_px_s = layout->params.move_speed_px_s;
  r.row.phrase = phrase;
  r.row.record = record_from_events(phrase, r.events);
  if (r.row.record.duration_ms <= 0)
    throw std::runtime_error("trial \"" + phrase + "\" selected fewer than two keys; its metrics are undefined");
  r.row.metrics = trial_metrics(r.row.record);
  return r;
}

enum class Protocol { Exp1, Exp2 };

inline std::string to_string(Protocol p) { return p == Protocol::Exp1 ? "exp1" : "exp2"; }

inline Protocol parse_protocol(std::string_view s) {
  if (s == "exp1") return Protocol::Exp1;
  if (s == "exp2") return Protocol::Exp2;
  throw std::invalid_argument("unknown protocol: " + std::string(s));
}

struct ExperimentConfig {
  Protocol protocol = Protocol::Exp1;
  std::vector<Condition> conditions;
  int users = 6;
  int sessions = 3;
  int phrases_per_session = 2;
  std::vector<std::string> phrase_set;  // empty: built-in phrases within the length bounds
  std::size_t min_phrase_len = 16;
  std::size_t max_phrase_len = 32;
  std::string corpus;  // empty: the built-in phrase set
  ScreenConfig screen;
  LayoutParams layout;
  UserModel user;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  static ExperimentConfig exp1_defaults() {
    ExperimentConfig c;
    c.protocol = Protocol::Exp1;
    c.conditions = {{Variant::NoP, Revision::Exp1, 250.0, "NoP"},
                    {Variant::LP, Revision::Exp1, 250.0, "LP"},
                    {Variant::LWP, Revision::Exp1, 250.0, "L+WP"}};
    c.sessions = 3;
    c.phrases_per_session = 2;
    return c;
  }

  static ExperimentConfig exp2_defaults() {
    ExperimentConfig c;
    c.protocol = Protocol::Exp2;
    c.conditions = {{Variant::LWP, Revision::Exp2, 250.0, "slow"},
                    {Variant::LWP, Revision::Exp2, 390.0, "fast"}};
    c.sessions = 10;
    c.phrases_per_session = 14;
    return c;
  }

  std::vector<std::string> eligible_phrases() const {
    std::vector<std::string> out;
    if (phrase_set.empty()) return phrases_between(min_phrase_len, max_phrase_len);
    for (const auto& p : phrase_set)
      if (p.size() >= min_phrase_len && p.size() <= max_phrase_len) out.push_back(p);
    return out;
  }

  void validate() const {
    if (conditions.empty()) throw std::invalid_argument("experiment needs at least one condition");
    if (users < 1 || sessions < 1 || phrases_per_session < 1)
      throw std::invalid_argument("users, sessions and phrases_per_session must be >= 1");
    for (const auto& c : conditions)
      if (!(c.speed_px_s > 0.0)) throw std::invalid_argument("condition speed must be positive");
    const auto phrases = eligible_phrases();
    if (phrases.size() < static_cast<std::size_t>(phrases_per_session))
      throw std::invalid_argument("phrase set has " + std::to_string(phrases.size()) +
                                  " eligible phrases, need " + std::to_string(phrases_per_session));
    for (const auto& p : phrases)
      if (!detail::plannable(p)) throw std::invalid_argument("unplannable phrase: " + p);
    screen.validate();
    layout.validate();
    user.validate();
  }
};

/// Trained models shared across experiments, keyed by corpus content.
inline std::shared_ptr<const LanguageModel> cached_model(const std::string& corpus) {
  static std::mutex mu;
  static std::map<std::uint64_t, std::shared_ptr<const LanguageModel>> cache;
  const auto key = corpus_hash(corpus);
  std::lock_guard lock(mu);
  auto& slot = cache[key];
  if (!slot) slot = std::make_shared<const LanguageModel>(train_model(corpus));
  return slot;
}

namespace detail {

inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32)};
  for (auto p : parts) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

enum SeedTag : std::uint64_t { kUserTag = 1, kPhraseTag = 2, kTrialTag = 3 };

}  // namespace detail

struct ExperimentResult {
  Report report;
  std::vector<TrialResult> trials;  // in (condition, session, user, trial) order
};

/// Runs every (condition, session, user, phrase) trial. Individuals and
/// phrase draws depend only on (seed, user, session), so all conditions see
/// the same users and phrases. Results are merged in a fixed order whatever
/// the thread count.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto model = cached_model(config.corpus.empty() ? phrase_corpus() : config.corpus);
  const auto phrases = config.eligible_phrases();

  std::vector<std::shared_ptr<const InterfaceLayout>> layouts;
  for (const auto& c : config.conditions) {
    LayoutParams p = config.layout;
    p.move_speed_px_s = c.speed_px_s;
    layouts.push_back(std::make_shared<const InterfaceLayout>(build_layout(c.variant, c.revision, config.screen, p)));
  }

  // the user model's own seed lets one population be re-drawn independently
  const std::uint64_t base = detail::derive_seed(config.seed, {config.user.rng_seed});
  std::vector<UserModel> individuals;
  for (int u = 0; u < config.users; ++u) {
    Rng rng(detail::derive_seed(base, {detail::kUserTag, static_cast<std::uint64_t>(u)}));
    individuals.push_back(config.user.individual(rng));
  }

  struct Job {
    std::size_t condition;
    int session, user, trial;
    std::string phrase;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < config.conditions.size(); ++c)
    for (int s = 1; s <= config.sessions; ++s)
      for (int u = 0; u < config.users; ++u) {
        Rng rng(detail::derive_seed(base, {detail::kPhraseTag, static_cast<std::uint64_t>(u),
                                                  static_cast<std::uint64_t>(s)}));
        std::vector<std::string> drawn;
        std::sample(phrases.begin(), phrases.end(), std::back_inserter(drawn),
                    config.phrases_per_session, rng);
        std::shuffle(drawn.begin(), drawn.end(), rng);
        for (int t = 0; t < config.phrases_per_session; ++t)
          jobs.push_back({c, s, u, t, drawn[static_cast<std::size_t>(t)]});
      }

  ExperimentResult result;
  result.trials.resize(jobs.size());
  auto run_job = [&](std::size_t i) {
    const Job& j = jobs[i];
    const auto& cond = config.conditions[j.condition];
    const UserModel user = individuals[static_cast<std::size_t>(j.user)].for_session(j.session, cond.speed_px_s);
    const auto seed = detail::derive_seed(
        base, {detail::kTrialTag, static_cast<std::uint64_t>(j.user),
                      static_cast<std::uint64_t>(j.session), static_cast<std::uint64_t>(j.trial)});
    auto r = run_trial(j.phrase, layouts[j.condition], model, user, seed);
    r.row.condition = cond.name();
    r.row.user = j.user;
    r.row.session = j.session;
    r.row.trial = j.trial;
    result.trials[i] = std::move(r);
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(jobs.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
          try {
            run_job(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  result.report.metadata["protocol"] = to_string(config.protocol);
  result.report.metadata["seed"] = config.seed;
  result.report.metadata["users"] = config.users;
  result.report.metadata["sessions"] = config.sessions;
  result.report.metadata["phrases_per_session"] = config.phrases_per_session;
  result.report.metadata["metrics"] = metric_conventions();
  for (const auto& t : result.trials) result.report.rows.push_back(t.row);
  return result;
}

}  // namespace eyetype
