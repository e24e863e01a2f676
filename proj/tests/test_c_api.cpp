#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "srg/srg.h"

namespace fs = std::filesystem;

TEST_CASE("version and errors") {
  CHECK(std::strlen(srg_version()) > 0);
  srg_tree* tree = nullptr;
  CHECK(srg_tree_create(nullptr, 3, &tree) == SRG_ERR_INVALID_ARGUMENT);
  CHECK(std::string(srg_last_error()).size() > 0);
  const double neg[] = {1.0, -2.0};
  CHECK(srg_tree_create(neg, 2, &tree) == SRG_ERR_INVALID_ARGUMENT);
  CHECK(tree == nullptr);
}

TEST_CASE("tree through the C API") {
  const double keys[] = {1.0, 0.0, 3.0, 2.0};
  srg_tree* tree = nullptr;
  REQUIRE(srg_tree_create(keys, 4, &tree) == SRG_OK);
  size_t r = 0, idx = 0;
  double s = 0.0, p = 0.0;
  CHECK(srg_tree_rank(tree, 2, &r) == SRG_OK);
  CHECK(r == 1);
  CHECK(srg_tree_partial_sum(tree, 3, &s) == SRG_OK);
  CHECK(s == 5.0);
  CHECK(srg_tree_select_rank(tree, 3, &idx) == SRG_OK);
  CHECK(idx == 0);
  CHECK(srg_tree_select_sum(tree, 4.5, &idx) == SRG_OK);
  CHECK(idx == 3);
  CHECK(srg_tree_update(tree, 1, 10.0) == SRG_OK);
  CHECK(srg_tree_rank(tree, 1, &r) == SRG_OK);
  CHECK(r == 1);
  CHECK(srg_tree_sample(tree, 0.05, 0.0, &idx, &p) == SRG_OK);
  CHECK(idx == 1);
  CHECK(p == doctest::Approx(10.0 / 16.0));
  CHECK(srg_tree_sample(tree, 0.05, 0.5, &idx, nullptr) == SRG_OK);
  CHECK(srg_tree_sample(tree, 0.5, 0.5, &idx, &p) == SRG_ERR_INVALID_ARGUMENT);
  CHECK(srg_tree_select_rank(tree, 9, &idx) == SRG_ERR_INVALID_ARGUMENT);
  srg_tree_free(tree);
  srg_tree_free(nullptr);
}

TEST_CASE("datasets") {
  const char text[] = "0 1:3 2:4\n1 3:1\n";
  srg_dataset* ds = nullptr;
  REQUIRE(srg_dataset_parse_libsvm(text, sizeof(text) - 1, &ds) == SRG_OK);
  size_t n = 0, d = 0, zero = 7;
  CHECK(srg_dataset_shape(ds, &n, &d) == SRG_OK);
  CHECK(n == 2);
  CHECK(d == 3);
  CHECK(srg_dataset_normalize(ds, &zero) == SRG_OK);
  CHECK(zero == 0);
  srg_dataset_free(ds);

  const char bad[] = "1 1:1\nx 1:1\n";
  CHECK(srg_dataset_parse_libsvm(bad, sizeof(bad) - 1, &ds) == SRG_ERR_PARSE);
  CHECK(std::string(srg_last_error()).find("line 2") != std::string::npos);
  CHECK(srg_dataset_load_libsvm("/nonexistent/file", &ds) == SRG_ERR_IO);

  const fs::path dir = fs::path(SRG_SCRATCH_DIR);
  fs::create_directories(dir);
  REQUIRE(srg_dataset_synthetic_cauchy(30, 4, 2, &ds) == SRG_OK);
  const auto path = (dir / "syn.libsvm").string();
  CHECK(srg_dataset_save_libsvm(ds, path.c_str()) == SRG_OK);
  srg_dataset* back = nullptr;
  CHECK(srg_dataset_load_libsvm(path.c_str(), &back) == SRG_OK);
  CHECK(srg_dataset_shape(back, &n, &d) == SRG_OK);
  CHECK(n == 30);
  CHECK(d == 4);
  srg_dataset_free(back);
  srg_dataset_free(ds);
}

TEST_CASE("run and compare") {
  const fs::path dir = fs::path(SRG_SCRATCH_DIR) / "run";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto data = (dir / "syn.libsvm").string();
  REQUIRE(srg_generate_synthetic(3, 150, 4, data.c_str()) == SRG_OK);

  srg_config* cfg = nullptr;
  REQUIRE(srg_config_create(&cfg) == SRG_OK);
  CHECK(srg_config_set(cfg, "algo", "srg") == SRG_OK);
  CHECK(srg_config_set(cfg, "objective", "least_squares") == SRG_OK);
  CHECK(srg_config_set(cfg, "data", data.c_str()) == SRG_OK);
  CHECK(srg_config_set(cfg, "batch", "1") == SRG_OK);
  CHECK(srg_config_set(cfg, "seeds", "2") == SRG_OK);
  CHECK(srg_config_set(cfg, "budget", "3000") == SRG_OK);
  CHECK(srg_config_set(cfg, "workers", "1") == SRG_OK);
  CHECK(srg_config_set(cfg, "out", (dir / "srg").string().c_str()) == SRG_OK);
  CHECK(srg_config_set(cfg, "algo", "nope") == SRG_ERR_INVALID_ARGUMENT);
  CHECK(srg_config_set(cfg, "no_such_key", "1") == SRG_ERR_INVALID_ARGUMENT);
  CHECK(srg_run(cfg) == SRG_OK);
  CHECK(fs::exists(dir / "srg" / "mean.csv"));

  CHECK(srg_config_set(cfg, "algo", "sgd") == SRG_OK);
  CHECK(srg_config_set(cfg, "out", (dir / "sgd").string().c_str()) == SRG_OK);
  CHECK(srg_run(cfg) == SRG_OK);

  const std::string a = (dir / "srg" / "mean.csv").string(), b = (dir / "sgd" / "mean.csv").string();
  const char* paths[] = {a.c_str(), b.c_str()};
  char* table = nullptr;
  REQUIRE(srg_compare(paths, 2, &table) == SRG_OK);
  CHECK(std::string(table).find("srg") != std::string::npos);
  srg_string_free(table);

  CHECK(srg_config_set(cfg, "alpha", "5") == SRG_OK);
  CHECK(srg_config_set(cfg, "out", (dir / "boom").string().c_str()) == SRG_OK);
  CHECK(srg_run(cfg) == SRG_ERR_DIVERGED);

  const auto conf = (dir / "bad.conf").string();
  std::FILE* fp = std::fopen(conf.c_str(), "w");
  std::fputs("algo=srg\nbatch=\n", fp);
  std::fclose(fp);
  CHECK(srg_config_load(cfg, conf.c_str()) == SRG_ERR_PARSE);
  srg_config_free(cfg);
}
