#pragma once

// Finite-sum objectives F(x) = (1/n) sum_i f_i(x).

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace srg {

using Vector = std::vector<double>;

// Dense row-major design matrix with one label per row.
struct Dataset {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> features;  // n * d
  std::vector<double> labels;    // n
  // How raw labels were mapped ("identity", "{0,1}->{-1,+1}", ...).
  std::string label_mapping = "identity";
  std::string source;

  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * d, d};
  }
  std::span<double> row(std::size_t i) {
    return {features.data() + i * d, d};
  }
};

class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t size() const = 0;
  virtual std::size_t dim() const = 0;
  virtual double value(std::size_t i, std::span<const double> x) const = 0;
  // out has dim() entries and is overwritten.
  virtual void gradient(std::size_t i, std::span<const double> x,
                        std::span<double> out) const = 0;

  // Smoothness constant of f_i.
  virtual double component_smoothness(std::size_t i) const = 0;
  // max_i L_i, the constant the per-component analyses use.
  virtual double max_smoothness() const = 0;
  // Smoothness of the average F.
  virtual double smoothness() const = 0;
  // Strong convexity of F.
  virtual double strong_convexity() const = 0;

  virtual std::string describe() const = 0;
};

enum class LossKind { Logistic, LeastSquares };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

// l2-regularised logistic regression or least squares over a Dataset.
//   logistic:      f_i(x) = log(1 + exp(-y_i a_i.x)) + mu/2 |x|^2
//   least squares: f_i(x) = 1/2 (a_i.x - y_i)^2 + mu/2 |x|^2
class DatasetObjective final : public Objective {
 public:
  DatasetObjective(std::shared_ptr<const Dataset> data, LossKind kind,
                   double mu);

  std::size_t size() const override { return data_->n; }
  std::size_t dim() const override { return data_->d; }
  double value(std::size_t i, std::span<const double> x) const override;
  void gradient(std::size_t i, std::span<const double> x,
                std::span<double> out) const override;
  double component_smoothness(std::size_t i) const override;
  double max_smoothness() const override { return max_smoothness_; }
  double smoothness() const override { return smoothness_; }
  double strong_convexity() const override { return strong_convexity_; }
  std::string describe() const override;

  LossKind kind() const noexcept { return kind_; }
  double mu() const noexcept { return mu_; }
  const Dataset& data() const noexcept { return *data_; }

 private:
  std::shared_ptr<const Dataset> data_;
  LossKind kind_;
  double mu_;
  std::vector<double> row_sq_norms_;
  double max_smoothness_ = 0.0;
  double smoothness_ = 0.0;
  double strong_convexity_ = 0.0;
};

// f_i(x) = h_i/2 |x - c_i|^2. Exact optimum and constants; used by the
// analytic checks.
class QuadraticObjective final : public Objective {
 public:
  // centers is n * d row-major; curvatures has n positive entries.
  QuadraticObjective(std::size_t d, std::vector<double> centers,
                     std::vector<double> curvatures);

  std::size_t size() const override { return curvatures_.size(); }
  std::size_t dim() const override { return d_; }
  double value(std::size_t i, std::span<const double> x) const override;
  void gradient(std::size_t i, std::span<const double> x,
                std::span<double> out) const override;
  double component_smoothness(std::size_t i) const override {
    return curvatures_[i];
  }
  double max_smoothness() const override { return max_curvature_; }
  double smoothness() const override { return mean_curvature_; }
  double strong_convexity() const override { return mean_curvature_; }
  std::string describe() const override;

  // sum_i h_i c_i / sum_i h_i
  Vector minimizer() const;

 private:
  std::size_t d_;
  std::vector<double> centers_;
  std::vector<double> curvatures_;
  double max_curvature_ = 0.0;
  double mean_curvature_ = 0.0;
};

double full_value(const Objective& f, std::span<const double> x);
Vector full_gradient(const Objective& f, std::span<const double> x);

// Largest eigenvalue of (1/n) A^T A by power iteration.
double gram_max_eigenvalue(const Dataset& data, double tol = 1e-10);
// Smallest eigenvalue of (1/n) A^T A (dense symmetric eigensolver).
double gram_min_eigenvalue(const Dataset& data);

struct ReferenceSolution {
  Vector x;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  double step = 0.0;
  double tolerance = 0.0;
};

// Full-gradient descent with step 1/L until |grad F| <= tol. Throws
// NumericError if max_iterations is hit first.
ReferenceSolution reference_solution(const Objective& f, double tol = 1e-12,
                                     std::size_t max_iterations = 10'000'000);

double squared_norm(std::span<const double> v);
double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace srg
