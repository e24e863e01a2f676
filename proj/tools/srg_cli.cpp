// srg command line: run experiments, compare traces, generate synthetic data.

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "srg/srg.h"

namespace {

int report(srg_status s) {
  if (s == SRG_OK) return 0;
  std::fprintf(stderr, "error: %s\n", srg_last_error());
  return static_cast<int>(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SRG benchmark driver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", srg_version());

  // run: every flag maps onto a config key; flags override --config.
  auto* run = app.add_subcommand("run", "run one algorithm over several seeds");
  std::string config_path;
  run->add_option("--config", config_path, "key=value config file");
  std::vector<std::pair<std::string, std::string>> settings;
  const std::vector<std::pair<std::string, std::string>> keys = {
      {"algo", "sgd | sgd_shuffle | srg | lsvrg"},
      {"objective", "logistic | least_squares"},
      {"data", "LIBSVM file"},
      {"synthetic-seed", "use generated heavy-tailed data with this seed"},
      {"synthetic-n", "rows of generated data"},
      {"synthetic-d", "columns of generated data"},
      {"normalize", "scale rows to unit norm (default: logistic only)"},
      {"mu", "l2 regularisation (default: 1/n logistic, 0 least squares)"},
      {"schedule", "const-exp | const-theory | dec-exp | dec-theory"},
      {"alpha", "step size override"},
      {"epsilon", "lower bound override"},
      {"batch", "mini-batch size"},
      {"seeds", "seed count, or comma list"},
      {"seed-base", "first seed"},
      {"budget", "component gradient evaluations per seed"},
      {"record-every", "iterations between records"},
      {"always-update", "SRG: update the stored norm on every draw"},
      {"wall-clock", "record wall time"},
      {"out", "output directory"},
      {"cache-dir", "where to cache the reference solution"},
      {"workers", "threads (default: SRG_WORKERS or core count)"},
      {"divergence-threshold", "relative error treated as divergence"},
  };
  std::vector<std::string> values(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    run->add_option("--" + keys[i].first, values[i], keys[i].second);
  }

  auto* cmp = app.add_subcommand("compare", "summarise trace CSVs");
  std::vector<std::string> files;
  cmp->add_option("files", files, "trace CSVs")->required();

  auto* gen = app.add_subcommand("gen-synthetic", "write heavy-tailed regression data");
  std::uint64_t gen_seed = 0;
  std::size_t gen_n = 1000, gen_d = 10;
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "generator seed")->required();
  gen->add_option("--out", gen_out, "output LIBSVM path")->required();
  gen->add_option("--n", gen_n, "rows");
  gen->add_option("--d", gen_d, "columns");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    srg_config* cfg = nullptr;
    if (srg_status s = srg_config_create(&cfg); s != SRG_OK) return report(s);
    srg_status s = SRG_OK;
    if (!config_path.empty()) s = srg_config_load(cfg, config_path.c_str());
    // seeds before seed-base so the base renumbers the final list
    for (std::size_t i = 0; i < keys.size() && s == SRG_OK; ++i) {
      if (run->count("--" + keys[i].first) == 0 || keys[i].first == "seed-base") continue;
      s = srg_config_set(cfg, keys[i].first.c_str(), values[i].c_str());
    }
    for (std::size_t i = 0; i < keys.size() && s == SRG_OK; ++i) {
      if (keys[i].first == "seed-base" && run->count("--seed-base")) {
        s = srg_config_set(cfg, "seed-base", values[i].c_str());
      }
    }
    if (s == SRG_OK) s = srg_run(cfg);
    srg_config_free(cfg);
    return report(s);
  }

  if (*cmp) {
    std::vector<const char*> paths;
    for (const auto& f : files) paths.push_back(f.c_str());
    char* text = nullptr;
    const srg_status s = srg_compare(paths.data(), paths.size(), &text);
    if (s != SRG_OK) return report(s);
    std::fputs(text, stdout);
    srg_string_free(text);
    return 0;
  }

  return report(srg_generate_synthetic(gen_seed, gen_n, gen_d, gen_out.c_str()));
}
