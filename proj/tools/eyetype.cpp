// eyetype: simulate experiments, replay traces, serve live sessions, and
// rebuild reports.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "eyetype/config.hpp"
#include "eyetype/output.hpp"
#include "eyetype/server.hpp"
#include "eyetype/simharness.hpp"
#include "eyetype/trace_io.hpp"

namespace fs = std::filesystem;
using namespace eyetype;

namespace {

volatile std::sig_atomic_t g_stop = 0;

AppConfig config_or_default(const std::string& path) {
  return path.empty() ? AppConfig{} : load_app_config(path);
}

int simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
             const std::string& protocol, std::optional<unsigned> threads, const fs::path& out) {
  AppConfig app = config_or_default(config_path);
  ExperimentConfig cfg = app.experiment;
  if (!protocol.empty()) {
    auto fresh = parse_protocol(protocol) == Protocol::Exp1 ? ExperimentConfig::exp1_defaults()
                                                            : ExperimentConfig::exp2_defaults();
    fresh.screen = cfg.screen;
    fresh.layout = cfg.layout;
    fresh.user = cfg.user;
    fresh.corpus = cfg.corpus;
    fresh.seed = cfg.seed;
    fresh.threads = cfg.threads;
    cfg = std::move(fresh);
  }
  if (seed) cfg.seed = *seed;
  if (threads) cfg.threads = *threads;
  const auto result = run_experiment(cfg);
  write_experiment(out, cfg, result);
  std::cerr << "wrote " << result.trials.size() << " trials to " << out.string() << "\n";
  for (const auto& s : result.report.summaries())
    std::cerr << "  " << s.condition << " session " << s.session << ": wpm "
              << detail::fixed(s.stats.mean.wpm, 2) << ", cer " << detail::fixed(s.stats.mean.cer, 3)
              << ", ks " << detail::fixed(s.stats.mean.ks, 3) << "\n";
  return 0;
}

int replay_cmd(const fs::path& trace_path, const std::string& variant, const std::string& revision,
               std::optional<double> speed_px_s, std::optional<double> speed_deg_s,
               const std::string& phrase, const std::string& config_path, const std::string& events_out) {
  AppConfig app = config_or_default(config_path);
  LayoutParams params = app.layout;
  if (speed_deg_s) params.move_speed_px_s = speed_px_per_s(*speed_deg_s, app.screen);
  if (speed_px_s) params.move_speed_px_s = *speed_px_s;
  auto layout = std::make_shared<const InterfaceLayout>(
      build_layout(parse_variant(variant), parse_revision(revision), app.screen, params));
  auto model = cached_model(app.corpus.empty() ? phrase_corpus() : app.corpus);

  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error("cannot open " + trace_path.string());
  const auto trace = read_trace(in);
  Engine engine(layout, model);
  const auto result = replay(trace, engine);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  const std::string text = events_text(result.events);
  if (events_out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(events_out, std::ios::binary | std::ios::trunc);
    out << text;
  }

  const std::string target = phrase.empty() ? result.target : phrase;
  if (!target.empty()) {
    try {
      const auto m = replay_metrics(result, target);
      nlohmann::ordered_json j;
      j["target"] = target;
      j["wpm"] = m.wpm;
      j["adj_wpm"] = m.adj_wpm;
      j["cer"] = m.cer;
      j["uer"] = m.uer;
      j["ks"] = m.ks;
      std::cerr << j.dump() << "\n";
    } catch (const std::exception& e) {
      std::cerr << "error: cannot compute metrics: " << e.what() << "\n";
      return phrase.empty() ? 0 : 1;
    }
  }
  return 0;
}

int serve(const std::string& config_path, std::optional<unsigned short> port) {
  AppConfig app = config_or_default(config_path);
  if (port) app.service.port = *port;
  apply_env_overrides(app.service);
  Server server(app);
  server.start();
  std::cerr << "listening on ws://" << app.service.host << ":" << server.port()
            << " (logs in " << app.service.log_dir.string() << ")\n";
  std::signal(SIGINT, [](int) { g_stop = 1; });
  std::signal(SIGTERM, [](int) { g_stop = 1; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return 0;
}

int report_cmd(const fs::path& dir, const std::string& format) {
  const auto report = load_report(dir);
  if (format == "csv") std::cout << report_csv(report);
  else std::cout << report_json_text(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid smooth-pursuit eye typing: simulation, replay and live service"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string protocol;
  std::string out_dir;
  auto* sim = app.add_subcommand("simulate", "Run a simulated experiment");
  sim->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  sim->add_option("--seed", seed, "Experiment seed");
  sim->add_option("--protocol", protocol, "exp1 or exp2 (overrides the config)")
      ->check(CLI::IsMember({"exp1", "exp2"}));
  sim->add_option("--threads", threads, "Worker threads");
  sim->add_option("--out", out_dir, "Output directory")->required();

  std::string trace_path, variant = "NoP", revision = "exp1", phrase, events_out;
  std::optional<double> speed_px_s, speed_deg_s;
  auto* rep = app.add_subcommand("replay", "Replay a gaze trace through the engine");
  rep->add_option("--trace", trace_path, "Trace JSON-lines file")->required()->check(CLI::ExistingFile);
  rep->add_option("--variant", variant, "NoP, LP or L+WP")->required();
  rep->add_option("--revision", revision, "Layout revision: exp1 or exp2");
  rep->add_option("--speed", speed_px_s, "Key speed in px/s");
  rep->add_option("--speed-deg", speed_deg_s, "Key speed in deg/s");
  rep->add_option("--phrase", phrase, "Target phrase for metrics");
  rep->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  rep->add_option("--events-out", events_out, "Write events here instead of stdout");

  std::optional<unsigned short> port;
  auto* srv = app.add_subcommand("serve", "Run the WebSocket session service");
  srv->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  srv->add_option("--port", port, "Listen port (0 picks a free one)");

  std::string in_dir, format = "csv";
  auto* rpt = app.add_subcommand("report", "Rebuild a report from simulate output");
  rpt->add_option("--in", in_dir, "simulate output directory")->required()->check(CLI::ExistingDirectory);
  rpt->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return simulate(config_path, seed, protocol, threads, out_dir);
    if (*rep)
      return replay_cmd(trace_path, variant, revision, speed_px_s, speed_deg_s, phrase, config_path,
                        events_out);
    if (*srv) return serve(config_path, port);
    if (*rpt) return report_cmd(in_dir, format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
