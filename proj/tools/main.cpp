#include <iostream>

#include "CLI11.hpp"
#include "config.hpp"
#include "tasks.hpp"

int main(int argc, char** argv) {
  using namespace vibronic::cli;
  if (argc < 2 || std::string(argv[1]).empty()) {
    std::cerr << usage();
    return kUsage;
  }

  CLI::App app{"Rydberg tweezer vibronic simulator"};
  std::string task;
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::string modes;
  app.add_option("task", task, "graph | gs-scan-xi | gs-scan-kappa | gs-scan-omega | wigner | bopes-scan | compare")
      ->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--modes", modes, "reduced or full mode space")->check(CLI::IsMember({"reduced", "full"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      std::cout << app.help() << usage();
      return kOk;
    }
    std::cerr << e.what() << '\n' << usage();
    return kUsage;
  }
  if (std::find(kTasks.begin(), kTasks.end(), task) == kTasks.end()) {
    std::cerr << "unknown task '" << task << "'\n" << usage();
    return kUsage;
  }

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  }
  if (!cfg.task.empty() && cfg.task != task) {
    std::cerr << "config error: " << config_path << ": task is '" << cfg.task << "' but '" << task
              << "' was requested\n";
    return kUsage;
  }
  cfg.task = task;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (threads > 0) cfg.threads = threads;
  if (!modes.empty()) cfg.modes = modes == "full" ? vibronic::ModeSpace::Full : vibronic::ModeSpace::Reduced;
  return run(cfg, std::cerr);
}
