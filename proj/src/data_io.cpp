#include "srg/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string_view>

#include "srg/error.hpp"

namespace srg {

namespace {

bool parse_number(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() &&
         std::isfinite(out);
}

bool parse_index(std::string_view text, std::size_t& out) {
  if (text.empty()) return false;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
         c == '\f';
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

bool parse_libsvm_line(const std::string& line, std::size_t line_no,
                       LibsvmRecord& out) {
  std::string_view view(line);
  if (const auto hash = view.find('#'); hash != std::string_view::npos) {
    view = view.substr(0, hash);
  }
  const auto tokens = split(view);
  if (tokens.empty()) return false;

  out.pairs.clear();
  if (!parse_number(tokens[0], out.label)) {
    throw ParseError(line_no, "label '" + std::string(tokens[0]) +
                                  "' is not a finite number");
  }
  std::size_t previous = 0;
  for (std::size_t t = 1; t < tokens.size(); ++t) {
    const std::string_view tok = tokens[t];
    const auto colon = tok.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line_no, "pair '" + std::string(tok) +
                                    "' is not of the form index:value");
    }
    std::size_t index = 0;
    double value = 0.0;
    if (!parse_index(tok.substr(0, colon), index) || index == 0) {
      throw ParseError(line_no, "feature index in '" + std::string(tok) +
                                    "' is not a positive integer");
    }
    if (!parse_number(tok.substr(colon + 1), value)) {
      throw ParseError(line_no, "feature value in '" + std::string(tok) +
                                    "' is not a finite number");
    }
    if (index <= previous) {
      throw ParseError(line_no, "feature indices must be strictly ascending (" +
                                    std::to_string(index) + " after " +
                                    std::to_string(previous) + ")");
    }
    previous = index;
    out.pairs.emplace_back(index, value);
  }
  return true;
}

Dataset parse_libsvm(std::istream& in, const std::string& source) {
  std::vector<LibsvmRecord> records;
  std::string line;
  std::size_t line_no = 0;
  std::size_t d = 0;
  LibsvmRecord rec;
  while (std::getline(in, line)) {
    ++line_no;
    if (!parse_libsvm_line(line, line_no, rec)) continue;
    if (!rec.pairs.empty()) d = std::max(d, rec.pairs.back().first);
    records.push_back(rec);
  }
  if (in.bad()) throw IoError("read failure in " + source);
  if (records.empty()) throw ParseError(line_no, "no records in " + source);

  Dataset ds;
  ds.n = records.size();
  ds.d = d;
  ds.source = source;
  ds.features.assign(ds.n * ds.d, 0.0);
  ds.labels.resize(ds.n);
  std::set<double> distinct;
  for (std::size_t i = 0; i < ds.n; ++i) {
    ds.labels[i] = records[i].label;
    distinct.insert(records[i].label);
    for (const auto& [index, value] : records[i].pairs) {
      ds.features[i * ds.d + index - 1] = value;
    }
  }

  const auto subset_of = [&](std::initializer_list<double> allowed) {
    for (double v : distinct) {
      bool ok = false;
      for (double a : allowed) ok = ok || v == a;
      if (!ok) return false;
    }
    return true;
  };
  if (subset_of({-1.0, 1.0})) {
    ds.label_mapping = "{-1,+1}";
  } else if (subset_of({0.0, 1.0})) {
    ds.label_mapping = "{0,1}->{-1,+1}";
    for (double& y : ds.labels) y = y == 0.0 ? -1.0 : 1.0;
  } else if (subset_of({1.0, 2.0})) {
    ds.label_mapping = "{1,2}->{-1,+1}";
    for (double& y : ds.labels) y = y == 1.0 ? -1.0 : 1.0;
  } else {
    ds.label_mapping = "identity";
  }
  return ds;
}

Dataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_libsvm(in, path);
}

void write_libsvm(const Dataset& data, std::ostream& out) {
  for (std::size_t i = 0; i < data.n; ++i) {
    out << format_double(data.labels[i]);
    const auto row = data.row(i);
    for (std::size_t j = 0; j < data.d; ++j) {
      if (row[j] != 0.0) out << ' ' << (j + 1) << ':' << format_double(row[j]);
    }
    out << '\n';
  }
}

void save_libsvm(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  write_libsvm(data, out);
  if (!out) throw IoError("write failure on " + path);
}

std::size_t normalize_rows(Dataset& data) {
  std::size_t zero_rows = 0;
  for (std::size_t i = 0; i < data.n; ++i) {
    auto row = data.row(i);
    const double norm = std::sqrt(squared_norm(row));
    if (norm == 0.0) {
      ++zero_rows;
      continue;
    }
    for (double& v : row) v /= norm;
  }
  return zero_rows;
}

namespace {

class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : engine_(seed) {}

  // (0, 1): never exactly 0 so logs and tangents stay finite.
  double open_uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(open_uniform()));
    const double theta = 2.0 * M_PI * open_uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double cauchy() { return std::tan(M_PI * (open_uniform() - 0.5)); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

SyntheticData synthetic_cauchy(const SyntheticSpec& spec) {
  if (spec.n == 0 || spec.d == 0) {
    throw InvalidArgument("synthetic dataset needs n, d >= 1");
  }
  Gaussian rng(spec.seed);
  SyntheticData out;
  Dataset& ds = out.data;
  ds.n = spec.n;
  ds.d = spec.d;
  ds.features.resize(ds.n * ds.d);
  for (double& a : ds.features) a = rng.normal();
  out.weights.resize(ds.d);
  for (double& w : out.weights) w = rng.normal();
  out.noise.resize(ds.n);
  for (double& e : out.noise) e = rng.cauchy();
  ds.labels.resize(ds.n);
  for (std::size_t i = 0; i < ds.n; ++i) {
    double y = 0.0;
    const auto a = ds.row(i);
    for (std::size_t j = 0; j < ds.d; ++j) y += out.weights[j] * a[j];
    ds.labels[i] = y + out.noise[i];
  }
  ds.label_mapping = "identity";
  std::ostringstream src;
  src << "synthetic-cauchy(n=" << spec.n << ",d=" << spec.d
      << ",seed=" << spec.seed << ")";
  ds.source = src.str();
  return out;
}

std::uint64_t dataset_hash(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto feed = [&h](const void* bytes, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t shape[2] = {data.n, data.d};
  feed(shape, sizeof shape);
  feed(data.features.data(), data.features.size() * sizeof(double));
  feed(data.labels.data(), data.labels.size() * sizeof(double));
  return h;
}

}  // namespace srg
