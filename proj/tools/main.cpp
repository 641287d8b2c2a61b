#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tensorlab/runner.hpp"

namespace {

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  text = buffer.str();
  return true;
}

int load(const std::string& path, tensorlab::RunConfig& config) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "error: cannot read " << path << "\n";
    return tensorlab::kExitIo;
  }
  try {
    config = tensorlab::parse_config(text);
  } catch (const tensorlab::ConfigError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return tensorlab::kExitInvalid;
  }
  return tensorlab::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random tensor norm experiments"};
  app.require_subcommand(1);

  std::string run_path;
  auto* run = app.add_subcommand("run", "Run the study described by a config file");
  run->add_option("config", run_path, "JSON config")->required();

  auto* list = app.add_subcommand("list", "List the available studies");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse and validate a config file");
  validate->add_option("config", validate_path, "JSON config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tensorlab::kExitInvalid;
  }

  if (list->parsed()) {
    std::cout << tensorlab::list_experiments();
    return tensorlab::kExitOk;
  }
  tensorlab::RunConfig config;
  const std::string& path = run->parsed() ? run_path : validate_path;
  if (const int status = load(path, config); status != tensorlab::kExitOk) return status;
  if (validate->parsed()) {
    std::cout << "ok: " << config.experiment << "\n";
    return tensorlab::kExitOk;
  }
  return tensorlab::run(config, std::cerr);
}
