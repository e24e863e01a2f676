#include "srg/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "srg/error.hpp"
#include "srg/objective.hpp"

namespace srg {

double script_L(std::size_t n, std::size_t m, double l_max, double l) {
  if (n < 2) throw InvalidArgument("batch smoothness needs n >= 2");
  if (m < 1 || m > n) {
    throw InvalidArgument("batch size " + std::to_string(m) +
                          " outside [1, n = " + std::to_string(n) + "]");
  }
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return (nn - mm) / (mm * (nn - 1.0)) * l_max +
         nn * (mm - 1.0) / (mm * (nn - 1.0)) * l;
}

double alpha_constant_experiment(double script_l) {
  if (!(script_l > 0.0)) throw InvalidArgument("smoothness must be positive");
  return 1.0 / (2.0 * script_l);
}

double alpha_decreasing(double k, double k0, double c, double rate) {
  const double t = k + k0;
  const double denom = (c + t * (t + 2.0)) * rate;
  if (!(rate > 0.0) || !(denom > 0.0) || !(2.0 * t + 1.0 > 0.0)) {
    std::ostringstream os;
    os << "decreasing step undefined at k=" << k << " (k0=" << k0
       << ", c=" << c << ", rate=" << rate << ")";
    throw InvalidArgument(os.str());
  }
  return (2.0 * t + 1.0) / denom;
}

std::string to_string(SchedulePreset preset) {
  switch (preset) {
    case SchedulePreset::ConstExperiment: return "const-exp";
    case SchedulePreset::ConstTheory: return "const-theory";
    case SchedulePreset::DecreasingExperiment: return "dec-exp";
    case SchedulePreset::DecreasingTheory: return "dec-theory";
  }
  return "unknown";
}

SchedulePreset schedule_preset_from_string(const std::string& name) {
  for (auto p : {SchedulePreset::ConstExperiment, SchedulePreset::ConstTheory,
                 SchedulePreset::DecreasingExperiment,
                 SchedulePreset::DecreasingTheory}) {
    if (to_string(p) == name) return p;
  }
  throw InvalidArgument("unknown schedule '" + name +
                        "' (expected const-exp, const-theory, dec-exp or "
                        "dec-theory)");
}

ScheduleConstants ScheduleConstants::from(const Objective& f,
                                          std::size_t batch) {
  ScheduleConstants c;
  c.n = f.size();
  c.batch = batch;
  c.l_max = f.max_smoothness();
  c.l = f.smoothness();
  c.mu = f.strong_convexity();
  return c;
}

double ScheduleConstants::zeta() const {
  return std::min(l_max / static_cast<double>(n), mu);
}

Schedule::Schedule(SchedulePreset preset, const ScheduleConstants& constants,
                   std::optional<double> alpha_override,
                   std::optional<double> epsilon_override)
    : preset_(preset),
      c_(constants),
      alpha_override_(alpha_override),
      epsilon_override_(epsilon_override) {
  if (c_.n == 0) throw InvalidArgument("schedule needs n >= 1");
  if (alpha_override_ && !(*alpha_override_ > 0.0)) {
    throw InvalidArgument("step size override must be positive");
  }
  if (epsilon_override_ && !(*epsilon_override_ > 0.0)) {
    throw InvalidArgument("lower bound override must be positive");
  }
  if (preset_ == SchedulePreset::DecreasingTheory) {
    const double zeta = c_.zeta();
    if (!(zeta > 0.0)) throw InvalidArgument("dec-theory needs mu > 0");
    k0_ = 80.0 * c_.l_max / zeta - 2.0;
    cc_ = 40.0 * c_.l_max / zeta;
    rate_ = zeta;
  } else if (preset_ == SchedulePreset::DecreasingExperiment) {
    if (!(c_.mu > 0.0)) throw InvalidArgument("dec-exp needs mu > 0");
    const double sl = c_.script_l();
    k0_ = 4.0 * sl / c_.mu - 2.0;
    cc_ = 2.0 * sl / c_.mu;
    rate_ = c_.mu;
  }
}

double Schedule::alpha(std::size_t k) const {
  if (alpha_override_) return *alpha_override_;
  switch (preset_) {
    case SchedulePreset::ConstExperiment:
      return alpha_constant_experiment(c_.script_l());
    case SchedulePreset::ConstTheory:
      return static_cast<double>(c_.n) * raw_epsilon(k) / (20.0 * c_.l_max);
    case SchedulePreset::DecreasingExperiment:
    case SchedulePreset::DecreasingTheory:
      return alpha_decreasing(static_cast<double>(k), k0_, cc_, rate_);
  }
  return 0.0;
}

double Schedule::raw_epsilon(std::size_t k) const {
  if (epsilon_override_) return *epsilon_override_;
  const double n = static_cast<double>(c_.n);
  switch (preset_) {
    case SchedulePreset::ConstExperiment:
    case SchedulePreset::ConstTheory:
      return 1.0 / (2.0 * n);
    case SchedulePreset::DecreasingExperiment:
      return c_.script_l() * alpha(k) / n;
    case SchedulePreset::DecreasingTheory:
      return 20.0 * c_.l_max * alpha(k) / n;
  }
  return 0.0;
}

double Schedule::epsilon(std::size_t k) const {
  const double cap = 1.0 / static_cast<double>(c_.n);
  const double e = raw_epsilon(k);
  if (e > cap) {
    clamped_ = true;
    return cap;
  }
  return e;
}

bool Schedule::theory_valid() const {
  // The ratio alpha/eps is constant for every preset without overrides;
  // an override pins one side, which breaks it for decreasing presets.
  const bool decreasing = preset_ == SchedulePreset::DecreasingExperiment ||
                          preset_ == SchedulePreset::DecreasingTheory;
  if (decreasing && (alpha_override_ || epsilon_override_)) return false;
  const double n = static_cast<double>(c_.n);
  const double e0 = epsilon(0), a0 = alpha(0);
  const double slack = 1.0 + 1e-12;
  return e0 <= slack / (2.0 * n) && a0 <= slack * n * e0 / (20.0 * c_.l_max);
}

}  // namespace srg
