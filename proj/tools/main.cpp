#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "wavepolymer/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"spectral simulator for the damped stochastic wave polymer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "override config seed");
  auto* threads_opt = app.add_option("--threads", threads, "worker count");
  app.add_flag("--verbose", verbose, "chatty progress output");

  const char* names[] = {"simulate", "radius",  "gibbs",
                         "sweep",    "verify",  "girsanov-check"};
  for (const char* n : names) app.add_subcommand(n)->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  try {
    const auto config = wavepolymer::parse_config(config_path);
    wavepolymer::RunOptions opts;
    if (seed_opt->count()) opts.seed = seed;
    if (threads_opt->count()) opts.threads = threads;
    opts.verbose = verbose;
    const auto man = wavepolymer::run(subcommand, config, out_dir, opts);
    if (verbose) {
      std::printf("config %s seed %llu\n", man.config_hash.c_str(),
                  static_cast<unsigned long long>(man.seed));
      for (const auto& f : man.outputs) std::printf("wrote %s/%s\n",
                                                    out_dir.c_str(), f.c_str());
      for (const auto& w : man.warnings) std::printf("note: %s\n", w.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
