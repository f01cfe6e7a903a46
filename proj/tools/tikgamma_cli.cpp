#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tikgamma/config.hpp"
#include "tikgamma/study.hpp"

namespace {

constexpr int kInvalidConfig = 1;
constexpr int kIoError = 4;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::optional<tikgamma::StudyConfig> load(const std::string& path, int& code) {
  const auto text = read_file(path);
  if (!text) {
    std::cerr << "error: cannot read config '" << path << "'\n";
    code = kIoError;
    return std::nullopt;
  }
  auto parsed = tikgamma::parse_config(*text);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) std::cerr << path << ": " << tikgamma::format_error(e) << '\n';
    code = kInvalidConfig;
    return std::nullopt;
  }
  return parsed.config;
}

int run(const std::string& config_path, const std::string& out_path, std::optional<std::uint64_t> seed) {
  int code = 0;
  auto config = load(config_path, code);
  if (!config) return code;
  if (seed) config->output.seed = *seed;
  if (!out_path.empty()) config->output.path = out_path;

  const auto outcome = tikgamma::run_study(*config);
  if (!outcome.message.empty()) std::cerr << tikgamma::to_string(config->study) << ": " << outcome.message << '\n';

  auto write = [&](std::ostream& out) {
    if (config->output.format == "json-lines") tikgamma::write_json_lines(out, outcome.rows);
    else tikgamma::write_csv(out, outcome.rows);
    out.flush();
    return static_cast<bool>(out);
  };
  bool written = false;
  if (config->output.path == "-") {
    written = write(std::cout);
  } else {
    std::ofstream file(config->output.path, std::ios::binary | std::ios::trunc);
    written = file && write(file);
  }
  if (!written) {
    std::cerr << "error: cannot write report to '" << config->output.path << "'\n";
    return kIoError;
  }
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tikhonov approximation studies"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  auto* run_cmd = app.add_subcommand("run", "Run a study and write its report");
  run_cmd->add_option("--config", config_path, "Study configuration file")->required();
  run_cmd->add_option("--out", out_path, "Report path, '-' for standard output");
  run_cmd->add_option("--seed", seed, "Seed for randomized probes and noise");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a configuration without running it");
  validate_cmd->add_option("--config", validate_path, "Study configuration file")->required();

  CLI11_PARSE(app, argc, argv);

  if (*run_cmd) return run(config_path, out_path, seed);
  int code = 0;
  if (!load(validate_path, code)) return code;
  std::cout << "ok\n";
  return 0;
}
