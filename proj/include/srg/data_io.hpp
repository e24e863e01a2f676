#pragma once

// LIBSVM text I/O, row normalisation and the heavy-tailed synthetic
// regression generator.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "srg/objective.hpp"

namespace srg {

struct LibsvmRecord {
  double label = 0.0;
  std::vector<std::pair<std::size_t, double>> pairs;  // 1-based, ascending
};

// Parses one line. Returns false for blank/comment-only lines. Throws
// ParseError carrying line_no on malformed input.
bool parse_libsvm_line(const std::string& line, std::size_t line_no,
                       LibsvmRecord& out);

// Labels are mapped {0,1} -> {-1,+1} and {1,2} -> {-1,+1}; {-1,+1} is kept
// and any other label set is left unchanged. d is the largest index seen.
Dataset parse_libsvm(std::istream& in, const std::string& source = "<stream>");
Dataset load_libsvm(const std::string& path);

// Writes labels and non-zero features with 17 significant digits.
void write_libsvm(const Dataset& data, std::ostream& out);
void save_libsvm(const Dataset& data, const std::string& path);

// Scales each non-zero row to unit norm. Returns the number of zero rows
// (left untouched).
std::size_t normalize_rows(Dataset& data);

struct SyntheticSpec {
  std::size_t n = 1000;
  std::size_t d = 10;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  Dataset data;
  std::vector<double> weights;  // w
  std::vector<double> noise;    // standard Cauchy draws
};

// a_ij ~ N(0,1), w ~ N(0,1)^d, y_i = w.a_i + standard Cauchy noise.
// Draw order: A row-major, then w, then the noise. Deterministic in seed.
SyntheticData synthetic_cauchy(const SyntheticSpec& spec);

// 64-bit FNV-1a over the dataset's shape, features and labels.
std::uint64_t dataset_hash(const Dataset& data);

// 17 significant digits, locale independent.
std::string format_double(double v);

}  // namespace srg
