#pragma once

// Step-size and lower-bound schedules.
//
// Theory presets satisfy the one-step contraction conditions
// (alpha/eps constant, eps <= 1/(2n), alpha <= n eps / (20 L)). The
// experiment presets reuse the largest step the SGD analysis allows for
// the batch size in use, which is larger than the SRG analysis permits.

#include <cstddef>
#include <optional>
#include <string>

namespace srg {

class Objective;

// Batch smoothness:
//   (n - m) / (m (n - 1)) L_max + n (m - 1) / (m (n - 1)) L
double script_L(std::size_t n, std::size_t m, double l_max, double l);

// 1 / (2 script_L)
double alpha_constant_experiment(double script_l);

// (2 (k + k0) + 1) / ([c + (k + k0)(k + k0 + 2)] rate)
double alpha_decreasing(double k, double k0, double c, double rate);

enum class SchedulePreset {
  ConstExperiment,       // "const-exp"
  ConstTheory,           // "const-theory"
  DecreasingExperiment,  // "dec-exp"
  DecreasingTheory,      // "dec-theory"
};

std::string to_string(SchedulePreset preset);
SchedulePreset schedule_preset_from_string(const std::string& name);

struct ScheduleConstants {
  std::size_t n = 0;
  std::size_t batch = 1;
  double l_max = 0.0;  // max_i L_i; the L of the SRG analysis
  double l = 0.0;      // smoothness of F
  double mu = 0.0;

  static ScheduleConstants from(const Objective& f, std::size_t batch);
  double script_l() const { return script_L(n, batch, l_max, l); }
  double zeta() const;
};

class Schedule {
 public:
  Schedule(SchedulePreset preset, const ScheduleConstants& constants,
           std::optional<double> alpha_override = std::nullopt,
           std::optional<double> epsilon_override = std::nullopt);

  double alpha(std::size_t k) const;
  // Clamped to (0, 1/n]; clamping sets clamped().
  double epsilon(std::size_t k) const;

  SchedulePreset preset() const noexcept { return preset_; }
  const ScheduleConstants& constants() const noexcept { return c_; }
  double k0() const noexcept { return k0_; }
  double c() const noexcept { return cc_; }
  double rate() const noexcept { return rate_; }

  // True when the one-step contraction conditions hold for every k.
  bool theory_valid() const;
  // "theory-valid" or "experiment-matched"
  std::string label() const { return theory_valid() ? "theory-valid" : "experiment-matched"; }
  bool clamped() const noexcept { return clamped_; }

 private:
  double raw_epsilon(std::size_t k) const;

  SchedulePreset preset_;
  ScheduleConstants c_;
  std::optional<double> alpha_override_, epsilon_override_;
  double k0_ = 0.0, cc_ = 0.0, rate_ = 0.0;
  mutable bool clamped_ = false;
};

}  // namespace srg
