#include "srg/srg.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "srg/data_io.hpp"
#include "srg/error.hpp"
#include "srg/experiments.hpp"
#include "srg/sampler_tree.hpp"
#include "srg/simplex.hpp"

struct srg_dataset {
  srg::Dataset data;
};

struct srg_tree {
  explicit srg_tree(std::span<const double> keys) : tree(keys) {}
  srg::SamplerTree tree;
};

struct srg_config {
  srg::RunConfig cfg;
};

namespace {

thread_local std::string last_error;

srg_status fail(srg_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
srg_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return SRG_OK;
  } catch (const srg::Error& e) {
    return fail(static_cast<srg_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SRG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SRG_ERR_INTERNAL, e.what());
  }
}

#define SRG_REQUIRE(cond, msg) \
  if (!(cond)) return fail(SRG_ERR_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* srg_version(void) { return "0.1.0"; }

const char* srg_last_error(void) { return last_error.c_str(); }

srg_status srg_dataset_load_libsvm(const char* path, srg_dataset** out) {
  SRG_REQUIRE(path && out, "null argument");
  return guard([&] { *out = new srg_dataset{srg::load_libsvm(path)}; });
}

srg_status srg_dataset_parse_libsvm(const char* text, size_t len,
                                    srg_dataset** out) {
  SRG_REQUIRE((text || len == 0) && out, "null argument");
  return guard([&] {
    std::istringstream in(std::string(text ? text : "", len));
    *out = new srg_dataset{srg::parse_libsvm(in, "<memory>")};
  });
}

srg_status srg_dataset_synthetic_cauchy(size_t n, size_t d, uint64_t seed,
                                        srg_dataset** out) {
  SRG_REQUIRE(out, "null argument");
  return guard([&] {
    srg::SyntheticSpec spec;
    spec.n = n;
    spec.d = d;
    spec.seed = seed;
    *out = new srg_dataset{srg::synthetic_cauchy(spec).data};
  });
}

srg_status srg_dataset_normalize(srg_dataset* data, size_t* zero_rows) {
  SRG_REQUIRE(data, "null dataset");
  return guard([&] {
    const std::size_t z = srg::normalize_rows(data->data);
    if (zero_rows) *zero_rows = z;
  });
}

srg_status srg_dataset_shape(const srg_dataset* data, size_t* n, size_t* d) {
  SRG_REQUIRE(data, "null dataset");
  if (n) *n = data->data.n;
  if (d) *d = data->data.d;
  last_error.clear();
  return SRG_OK;
}

srg_status srg_dataset_save_libsvm(const srg_dataset* data, const char* path) {
  SRG_REQUIRE(data && path, "null argument");
  return guard([&] { srg::save_libsvm(data->data, path); });
}

void srg_dataset_free(srg_dataset* data) { delete data; }

srg_status srg_tree_create(const double* keys, size_t n, srg_tree** out) {
  SRG_REQUIRE(keys && out, "null argument");
  return guard([&] { *out = new srg_tree(std::span<const double>(keys, n)); });
}

srg_status srg_tree_update(srg_tree* tree, size_t i, double key) {
  SRG_REQUIRE(tree, "null tree");
  return guard([&] { tree->tree.update_key(i, key); });
}

srg_status srg_tree_rank(const srg_tree* tree, size_t i, size_t* rank) {
  SRG_REQUIRE(tree && rank, "null argument");
  return guard([&] { *rank = tree->tree.rank(i); });
}

srg_status srg_tree_partial_sum(const srg_tree* tree, size_t i, double* sum) {
  SRG_REQUIRE(tree && sum, "null argument");
  return guard([&] { *sum = tree->tree.partial_sum(i); });
}

srg_status srg_tree_select_rank(const srg_tree* tree, size_t rank,
                                size_t* index) {
  SRG_REQUIRE(tree && index, "null argument");
  return guard([&] { *index = tree->tree.select_rank(rank); });
}

srg_status srg_tree_select_sum(const srg_tree* tree, double s, size_t* index) {
  SRG_REQUIRE(tree && index, "null argument");
  return guard([&] { *index = tree->tree.select_sum(s); });
}

srg_status srg_tree_sample(const srg_tree* tree, double eps, double u,
                           size_t* index, double* probability) {
  SRG_REQUIRE(tree && index, "null argument");
  return guard([&] {
    const srg::SampleDraw draw = srg::tree_sample(tree->tree, eps, u);
    *index = draw.index;
    if (probability) *probability = draw.probability;
  });
}

void srg_tree_free(srg_tree* tree) { delete tree; }

srg_status srg_config_create(srg_config** out) {
  SRG_REQUIRE(out, "null argument");
  return guard([&] { *out = new srg_config{}; });
}

srg_status srg_config_set(srg_config* cfg, const char* key, const char* value) {
  SRG_REQUIRE(cfg && key && value, "null argument");
  return guard([&] { srg::apply_setting(cfg->cfg, key, value); });
}

srg_status srg_config_load(srg_config* cfg, const char* path) {
  SRG_REQUIRE(cfg && path, "null argument");
  return guard([&] {
    std::ifstream in(path);
    if (!in) throw srg::IoError(std::string("cannot open ") + path);
    srg::apply_config_text(cfg->cfg, in);
  });
}

void srg_config_free(srg_config* cfg) { delete cfg; }

srg_status srg_run(const srg_config* cfg) {
  SRG_REQUIRE(cfg, "null config");
  std::optional<srg::RunOutcome> outcome;
  const srg_status s = guard([&] { outcome = srg::run_experiment(cfg->cfg); });
  if (s != SRG_OK) return s;
  if (outcome->diverged) return fail(SRG_ERR_DIVERGED, outcome->message);
  return SRG_OK;
}

srg_status srg_compare(const char* const* paths, size_t count, char** out) {
  SRG_REQUIRE(paths && out && count > 0, "need at least one trace");
  return guard([&] {
    std::vector<std::pair<std::string, srg::Trace>> traces;
    for (size_t i = 0; i < count; ++i) {
      if (!paths[i]) throw srg::InvalidArgument("null path");
      traces.emplace_back(paths[i], srg::load_trace(paths[i]));
    }
    std::vector<std::string> warnings;
    std::string text = srg::format_summary(srg::compare_traces(traces, &warnings));
    for (const auto& w : warnings) text += "warning: " + w + "\n";
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

srg_status srg_generate_synthetic(uint64_t seed, size_t n, size_t d,
                                  const char* path) {
  SRG_REQUIRE(path, "null path");
  return guard([&] {
    srg::SyntheticSpec spec;
    spec.n = n;
    spec.d = d;
    spec.seed = seed;
    srg::save_libsvm(srg::synthetic_cauchy(spec).data, path);
  });
}

void srg_string_free(char* s) { std::free(s); }

}  // extern "C"
