#include "srg/objective.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "srg/error.hpp"

namespace srg {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

// log(1 + exp(t)) without overflow.
double softplus(double t) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

std::string to_string(LossKind kind) {
  return kind == LossKind::Logistic ? "logistic" : "least_squares";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "logistic") return LossKind::Logistic;
  if (name == "least_squares" || name == "least-squares" || name == "ls") {
    return LossKind::LeastSquares;
  }
  throw InvalidArgument("unknown objective '" + name +
                        "' (expected logistic or least_squares)");
}

double squared_norm(std::span<const double> v) { return dot(v, v); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

DatasetObjective::DatasetObjective(std::shared_ptr<const Dataset> data,
                                   LossKind kind, double mu)
    : data_(std::move(data)), kind_(kind), mu_(mu) {
  if (!data_ || data_->n == 0 || data_->d == 0) {
    throw InvalidArgument("objective needs a non-empty dataset");
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw InvalidArgument("regularisation must be finite and >= 0");
  }
  const Dataset& ds = *data_;
  row_sq_norms_.resize(ds.n);
  bool unit_rows = true;
  for (std::size_t i = 0; i < ds.n; ++i) {
    row_sq_norms_[i] = squared_norm(ds.row(i));
    unit_rows = unit_rows && std::abs(row_sq_norms_[i] - 1.0) <= 1e-12;
  }
  for (std::size_t i = 0; i < ds.n; ++i) {
    max_smoothness_ = std::max(max_smoothness_, component_smoothness(i));
  }
  if (kind_ == LossKind::Logistic) {
    smoothness_ =
        unit_rows ? 0.25 + mu_ : 0.25 * gram_max_eigenvalue(ds) + mu_;
    strong_convexity_ = mu_;
  } else {
    smoothness_ = gram_max_eigenvalue(ds) + mu_;
    strong_convexity_ = std::max(0.0, gram_min_eigenvalue(ds)) + mu_;
  }
}

double DatasetObjective::component_smoothness(std::size_t i) const {
  const double scale = kind_ == LossKind::Logistic ? 0.25 : 1.0;
  return scale * row_sq_norms_[i] + mu_;
}

double DatasetObjective::value(std::size_t i, std::span<const double> x) const {
  const auto a = data_->row(i);
  const double y = data_->labels[i];
  const double reg = 0.5 * mu_ * squared_norm(x);
  if (kind_ == LossKind::Logistic) return softplus(-y * dot(a, x)) + reg;
  const double r = dot(a, x) - y;
  return 0.5 * r * r + reg;
}

void DatasetObjective::gradient(std::size_t i, std::span<const double> x,
                                std::span<double> out) const {
  const auto a = data_->row(i);
  const double y = data_->labels[i];
  double scale;
  if (kind_ == LossKind::Logistic) {
    scale = -y * sigmoid(-y * dot(a, x));
  } else {
    scale = dot(a, x) - y;
  }
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = scale * a[j] + mu_ * x[j];
}

std::string DatasetObjective::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind_) << " mu=" << mu_ << " n=" << data_->n
     << " d=" << data_->d;
  return os.str();
}

QuadraticObjective::QuadraticObjective(std::size_t d,
                                       std::vector<double> centers,
                                       std::vector<double> curvatures)
    : d_(d), centers_(std::move(centers)), curvatures_(std::move(curvatures)) {
  if (d_ == 0 || curvatures_.empty() ||
      centers_.size() != d_ * curvatures_.size()) {
    throw InvalidArgument("quadratic objective: centers must be n * d");
  }
  double total = 0.0;
  for (double h : curvatures_) {
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw InvalidArgument("quadratic curvatures must be positive");
    }
    max_curvature_ = std::max(max_curvature_, h);
    total += h;
  }
  mean_curvature_ = total / static_cast<double>(curvatures_.size());
}

double QuadraticObjective::value(std::size_t i,
                                 std::span<const double> x) const {
  return 0.5 * curvatures_[i] *
         squared_distance(x, {centers_.data() + i * d_, d_});
}

void QuadraticObjective::gradient(std::size_t i, std::span<const double> x,
                                  std::span<double> out) const {
  const double* c = centers_.data() + i * d_;
  for (std::size_t j = 0; j < d_; ++j) out[j] = curvatures_[i] * (x[j] - c[j]);
}

std::string QuadraticObjective::describe() const {
  std::ostringstream os;
  os << "quadratic n=" << curvatures_.size() << " d=" << d_;
  return os.str();
}

Vector QuadraticObjective::minimizer() const {
  Vector x(d_, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < curvatures_.size(); ++i) {
    total += curvatures_[i];
    for (std::size_t j = 0; j < d_; ++j) {
      x[j] += curvatures_[i] * centers_[i * d_ + j];
    }
  }
  for (double& v : x) v /= total;
  return x;
}

double full_value(const Objective& f, std::span<const double> x) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < f.size(); ++i) s += f.value(i, x);
  return static_cast<double>(s / static_cast<long double>(f.size()));
}

Vector full_gradient(const Objective& f, std::span<const double> x) {
  const std::size_t d = f.dim();
  Vector g(d);
  std::vector<long double> acc(d, 0.0L);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.gradient(i, x, g);
    for (std::size_t j = 0; j < d; ++j) acc[j] += g[j];
  }
  const auto n = static_cast<long double>(f.size());
  for (std::size_t j = 0; j < d; ++j) g[j] = static_cast<double>(acc[j] / n);
  return g;
}

double gram_max_eigenvalue(const Dataset& data, double tol) {
  const std::size_t n = data.n, d = data.d;
  Vector v(d), w(d);
  for (std::size_t j = 0; j < d; ++j) {
    v[j] = 1.0 + 0.01 * static_cast<double>(j) / static_cast<double>(d);
  }
  double norm = std::sqrt(squared_norm(v));
  for (double& t : v) t /= norm;
  double lambda = 0.0;
  for (int it = 0; it < 100000; ++it) {
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = data.row(i);
      const double t = dot(a, v);
      for (std::size_t j = 0; j < d; ++j) w[j] += t * a[j];
    }
    for (double& t : w) t /= static_cast<double>(n);
    const double next = dot(v, w);  // Rayleigh quotient
    norm = std::sqrt(squared_norm(w));
    if (norm == 0.0) return 0.0;
    for (std::size_t j = 0; j < d; ++j) v[j] = w[j] / norm;
    if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) {
      return std::max(next, norm);
    }
    lambda = next;
  }
  return std::max(lambda, norm);
}

double gram_min_eigenvalue(const Dataset& data) {
  const auto d = static_cast<Eigen::Index>(data.d);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      a(data.features.data(), static_cast<Eigen::Index>(data.n), d);
  const Eigen::MatrixXd gram =
      (a.transpose() * a) / static_cast<double>(data.n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      gram, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

ReferenceSolution reference_solution(const Objective& f, double tol,
                                     std::size_t max_iterations) {
  if (!(f.strong_convexity() > 0.0)) {
    throw InvalidArgument(
        "reference solution needs a strongly convex objective");
  }
  ReferenceSolution out;
  out.step = 1.0 / f.smoothness();
  out.tolerance = tol;
  out.x.assign(f.dim(), 0.0);
  double best = INFINITY;
  std::size_t since_best = 0;
  for (std::size_t it = 0;; ++it) {
    const Vector g = full_gradient(f, out.x);
    out.gradient_norm = std::sqrt(squared_norm(g));
    out.iterations = it;
    if (out.gradient_norm <= tol) return out;
    if (out.gradient_norm < best) {
      best = out.gradient_norm;
      since_best = 0;
    } else if (++since_best > 10000) {
      std::ostringstream os;
      os << "reference solve stalled at |grad F| = " << out.gradient_norm;
      throw NumericError(0, os.str());
    }
    if (it >= max_iterations) {
      std::ostringstream os;
      os << "reference solve hit " << max_iterations
         << " iterations with |grad F| = " << out.gradient_norm;
      throw NumericError(0, os.str());
    }
    for (std::size_t j = 0; j < g.size(); ++j) out.x[j] -= out.step * g[j];
  }
}

}  // namespace srg
