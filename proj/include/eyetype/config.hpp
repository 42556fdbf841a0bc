#pragma once

// JSON configuration files for the CLI and the service.
//
// Top-level keys (all optional): "screen", "layout", "user", "experiment",
// "corpus_file", "service". Missing keys keep their defaults. Relative paths
// are resolved against the config file's directory.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "eyetype/layout.hpp"
#include "eyetype/simharness.hpp"

namespace eyetype {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  unsigned short port = 8765;
  std::filesystem::path log_dir = "logs";
  Variant default_variant = Variant::LWP;
  Revision default_revision = Revision::Exp1;
};

struct AppConfig {
  ScreenConfig screen;
  LayoutParams layout;
  UserModel user;
  ExperimentConfig experiment = ExperimentConfig::exp1_defaults();
  std::string corpus;  // empty: built-in phrase set
  ServiceConfig service;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Condition condition_from_json(const nlohmann::json& j, const ScreenConfig& screen) {
  Condition c;
  c.variant = parse_variant(j.value("variant", std::string("NoP")));
  c.revision = parse_revision(j.value("revision", std::string("exp1")));
  if (j.contains("speed_deg_s")) c.speed_px_s = speed_px_per_s(j.at("speed_deg_s").get<double>(), screen);
  c.speed_px_s = j.value("speed_px_s", c.speed_px_s);
  c.label = j.value("label", std::string());
  return c;
}

inline ExperimentConfig experiment_from_json(const nlohmann::json& j, const AppConfig& base) {
  ExperimentConfig e = base.experiment;
  if (j.contains("protocol")) {
    const auto protocol = parse_protocol(j.at("protocol").get<std::string>());
    e = protocol == Protocol::Exp1 ? ExperimentConfig::exp1_defaults() : ExperimentConfig::exp2_defaults();
  }
  e.users = j.value("users", e.users);
  e.sessions = j.value("sessions", e.sessions);
  e.phrases_per_session = j.value("phrases_per_session", e.phrases_per_session);
  e.min_phrase_len = j.value("min_phrase_len", e.min_phrase_len);
  e.max_phrase_len = j.value("max_phrase_len", e.max_phrase_len);
  e.seed = j.value("seed", e.seed);
  e.threads = j.value("threads", e.threads);
  if (j.contains("phrase_set")) e.phrase_set = j.at("phrase_set").get<std::vector<std::string>>();
  if (j.contains("conditions")) {
    e.conditions.clear();
    for (const auto& c : j.at("conditions")) e.conditions.push_back(condition_from_json(c, base.screen));
  }
  e.screen = base.screen;
  e.layout = base.layout;
  e.user = base.user;
  e.corpus = base.corpus;
  return e;
}

inline AppConfig app_config_from_json(const nlohmann::json& j,
                                      const std::filesystem::path& base_dir = {}) {
  AppConfig c;
  try {
    if (j.contains("screen")) c.screen = screen_from_json(j.at("screen"));
    if (j.contains("layout")) c.layout = layout_params_from_json(j.at("layout"));
    if (j.contains("user")) c.user = user_model_from_json(j.at("user"));
    if (j.contains("corpus_file")) {
      std::filesystem::path p = j.at("corpus_file").get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      c.corpus = read_file(p);
    }
    c.experiment.screen = c.screen;
    c.experiment.layout = c.layout;
    c.experiment.user = c.user;
    c.experiment.corpus = c.corpus;
    if (j.contains("experiment")) c.experiment = experiment_from_json(j.at("experiment"), c);
    if (j.contains("service")) {
      const auto& s = j.at("service");
      c.service.host = s.value("host", c.service.host);
      c.service.port = s.value("port", c.service.port);
      if (s.contains("log_dir")) {
        std::filesystem::path p = s.at("log_dir").get<std::string>();
        c.service.log_dir = p.is_relative() ? base_dir / p : p;
      }
      if (s.contains("variant")) c.service.default_variant = parse_variant(s.at("variant").get<std::string>());
      if (s.contains("revision"))
        c.service.default_revision = parse_revision(s.at("revision").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return c;
}

inline AppConfig load_app_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return app_config_from_json(j, path.parent_path());
}

/// EYETYPE_PORT and EYETYPE_LOG_DIR override the service settings.
inline void apply_env_overrides(ServiceConfig& s) {
  if (const char* port = std::getenv("EYETYPE_PORT")) {
    char* end = nullptr;
    const long v = std::strtol(port, &end, 10);
    if (end == port || *end != '\0' || v < 0 || v > 65535)
      throw ConfigError(std::string("EYETYPE_PORT is not a port number: ") + port);
    s.port = static_cast<unsigned short>(v);
  }
  if (const char* dir = std::getenv("EYETYPE_LOG_DIR")) s.log_dir = dir;
}

}  // namespace eyetype
