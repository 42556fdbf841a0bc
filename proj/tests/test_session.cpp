#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "eyetype/phrase_set.hpp"
#include "eyetype/session.hpp"
#include "scripted_gaze.hpp"

using namespace eyetype;
using eyetype::testing::Script;
using nlohmann::json;

namespace {

std::shared_ptr<const InterfaceLayout> layout_of(Variant v) {
  return std::make_shared<const InterfaceLayout>(build_layout(v, Revision::Exp1));
}

std::shared_ptr<const LanguageModel> model() {
  static const auto m = std::make_shared<const LanguageModel>(train_model(phrase_corpus()));
  return m;
}

// Gaze samples that select `keys` in order, recorded from a scratch engine.
std::vector<GazeSample> script_for(const std::shared_ptr<const InterfaceLayout>& layout,
                                   const std::vector<KeyId>& keys) {
  Engine e(layout, model());
  Script s(e);
  for (auto k : keys) s.select(k);
  return s.samples();
}

std::string gaze_msg(const GazeSample& g) { return trace_line(g); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("eyetype-" + name + "-" + std::to_string(::getpid()))) {
    std::filesystem::remove_all(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace

TEST(LiveSession, HelloSendsLayoutAndPredictions) {
  LiveSession s("s1", layout_of(Variant::LWP), model());
  const auto hello = s.hello();
  ASSERT_EQ(hello.size(), 2u);
  const auto a = json::parse(hello[0]), b = json::parse(hello[1]);
  EXPECT_EQ(a.at("type"), "layout");
  EXPECT_EQ(a.at("layout").at("clusters").size(), 8u);
  EXPECT_EQ(b.at("type"), "predictions");
  EXPECT_EQ(b.at("mode"), "next_word");
  for (const auto& m : {a, b}) EXPECT_EQ(m.at("session_id"), "s1");
}

TEST(LiveSession, BadInputProducesErrorsNotExceptions) {
  LiveSession s("s1", layout_of(Variant::NoP), model());
  for (const char* bad : {"{", "[]", R"({"type":"nope"})", R"({"t_ms":1,"x":"a","y":0})"}) {
    const auto out = s.handle(bad);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(json::parse(out[0]).at("type"), "error") << bad;
  }
  const auto m = s.handle(R"({"type":"metrics"})");
  EXPECT_EQ(json::parse(m.at(0)).at("type"), "error");
}

TEST(LiveSession, OutOfOrderSampleIsDroppedWithAWarning) {
  TempDir dir("ooo");
  {
    LiveSession s("s1", layout_of(Variant::NoP), model(), dir.path());
    EXPECT_TRUE(s.handle(R"({"t_ms":10,"x":960,"y":600})").empty());
    const auto out = s.handle(R"({"t_ms":10,"x":960,"y":600})");
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(json::parse(out[0]).at("type"), "warning");
  }
  EXPECT_EQ(slurp(dir.path() / "s1.trace.jsonl"), "{\"t_ms\":10,\"x\":960.0,\"y\":600.0}\n");
}

TEST(LiveSession, PursuitOfAProducesTheEventSequence) {
  const auto layout = layout_of(Variant::NoP);
  LiveSession s("s1", layout, model());
  s.handle(R"({"type":"start_phrase","text":"a"})");
  std::vector<std::string> kinds;
  bool saw_predictions = false;
  for (const auto& g : script_for(layout, {KeyId::A}))
    for (const auto& m : s.handle(gaze_msg(g))) {
      const auto j = json::parse(m);
      EXPECT_EQ(j.at("session_id"), "s1");
      if (j.at("type") == "event") kinds.push_back(j.at("kind"));
      if (j.at("type") == "predictions") saw_predictions = true;
    }
  EXPECT_EQ(kinds, (std::vector<std::string>{"ClusterHighlighted", "MovementStarted", "KeySelected"}));
  EXPECT_TRUE(saw_predictions);
  EXPECT_EQ(s.engine().buffer(), "a");
}

TEST(LiveSession, MetricsAfterAPhrase) {
  const auto layout = layout_of(Variant::NoP);
  LiveSession s("s1", layout, model());
  s.handle(R"({"type":"start_phrase","text":"hi"})");
  for (const auto& g : script_for(layout, {KeyId::H, KeyId::I, KeyId::Space})) s.handle(gaze_msg(g));
  const auto j = json::parse(s.handle(R"({"type":"metrics"})").at(0));
  EXPECT_EQ(j.at("type"), "metrics");
  EXPECT_EQ(j.at("transcribed"), "hi ");
  EXPECT_EQ(j.at("complete"), true);
  EXPECT_DOUBLE_EQ(j.at("uer").get<double>(), 0.0);
  EXPECT_GT(j.at("wpm").get<double>(), 0.0);
}

TEST(LiveSession, LogsReplayToTheSameEvents) {
  TempDir dir("logs");
  const auto layout = layout_of(Variant::LWP);
  std::vector<EngineEvent> live;
  {
    LiveSession s("s7", layout, model(), dir.path());
    s.handle(R"({"type":"calibrate_start"})");
    for (int i = 0; i < 60; ++i) s.handle(gaze_msg({-2000 + i * 16, 965.0, 598.0}));
    s.handle(R"({"type":"start_phrase","text":"the"})");
    for (const auto& g : script_for(layout, {KeyId::T, KeyId::H, KeyId::E}))
      s.handle(gaze_msg({g.t_ms, g.x + 5.0, g.y - 2.0}));
    live = s.events();
  }
  std::ifstream trace_in(dir.path() / "s7.trace.jsonl");
  Engine fresh(layout, model());
  const auto r = replay(read_trace(trace_in), fresh);
  EXPECT_EQ(r.events, live);
  EXPECT_EQ(fresh.buffer(), "the");
  std::ifstream events_in(dir.path() / "s7.events.jsonl");
  const auto logged = read_events(events_in);
  // the event log spans the whole connection; the tail is the current phrase
  ASSERT_GE(logged.size(), live.size());
  EXPECT_TRUE(std::equal(live.begin(), live.end(), logged.end() - static_cast<std::ptrdiff_t>(live.size())));
}

TEST(LiveSession, InterleavedSessionsMatchSequentialRuns) {
  TempDir seq("seq"), inter("inter");
  const auto layout = layout_of(Variant::NoP);
  const auto a = script_for(layout, {KeyId::C, KeyId::A, KeyId::T});
  const auto b = script_for(layout, {KeyId::D, KeyId::O, KeyId::G});
  {
    LiveSession s1("a", layout, model(), seq.path());
    for (const auto& g : a) s1.handle(gaze_msg(g));
    LiveSession s2("b", layout, model(), seq.path());
    for (const auto& g : b) s2.handle(gaze_msg(g));
  }
  {
    LiveSession s1("a", layout, model(), inter.path());
    LiveSession s2("b", layout, model(), inter.path());
    for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
      if (i < a.size()) s1.handle(gaze_msg(a[i]));
      if (i < b.size()) s2.handle(gaze_msg(b[i]));
    }
    EXPECT_EQ(s1.engine().buffer(), "cat");
    EXPECT_EQ(s2.engine().buffer(), "dog");
  }
  for (const char* f : {"a.trace.jsonl", "a.events.jsonl", "b.trace.jsonl", "b.events.jsonl"}) {
    EXPECT_FALSE(slurp(seq.path() / f).empty()) << f;
    EXPECT_EQ(slurp(seq.path() / f), slurp(inter.path() / f)) << f;
  }
}
