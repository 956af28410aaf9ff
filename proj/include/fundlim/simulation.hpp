#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fundlim/bounds.hpp"
#include "fundlim/disturbance.hpp"
#include "fundlim/norm_order.hpp"
#include "fundlim/plant_analysis.hpp"

namespace fundlim {

/// Output-feedback controller z_k = K_k(y_0..y_k). The step interface only
/// ever sees the current output, so causality holds by construction.
class CausalController {
 public:
  virtual ~CausalController() = default;
  virtual void reset() = 0;
  virtual double step(double y) = 0;
  /// Fresh, reset copy for another trajectory.
  virtual std::unique_ptr<CausalController> clone() const = 0;
  /// Spec string understood by parse_controller().
  virtual std::string describe() const = 0;
};

class ZeroController final : public CausalController {
 public:
  void reset() override {}
  double step(double) override { return 0.0; }
  std::unique_ptr<CausalController> clone() const override { return std::make_unique<ZeroController>(); }
  std::string describe() const override { return "zero"; }
};

/// z_k = -c y_k
class StaticGain final : public CausalController {
 public:
  explicit StaticGain(double c) : c_(c) {}
  void reset() override {}
  double step(double y) override { return -c_ * y; }
  std::unique_ptr<CausalController> clone() const override { return std::make_unique<StaticGain>(c_); }
  std::string describe() const override;
  double gain() const { return c_; }

 private:
  double c_;
};

/// z_k = sum_{i>=0} b_i y_{k-i} - sum_{i>=1} a_i z_{k-i}
class LinearFilter final : public CausalController {
 public:
  LinearFilter(std::vector<double> numerator, std::vector<double> denominator);
  void reset() override;
  double step(double y) override;
  std::unique_ptr<CausalController> clone() const override;
  std::string describe() const override;

 private:
  std::vector<double> b_;
  std::vector<double> a_;
  std::vector<double> y_hist_;  // y_k, y_{k-1}, ...
  std::vector<double> z_hist_;  // z_{k-1}, z_{k-2}, ...
};

/// "zero" | "gain:<c>" | "arma:<b0,b1,...;a1,a2,...>". Throws InputError.
std::unique_ptr<CausalController> parse_controller(const std::string& spec);

struct SimulationConfig {
  std::size_t horizon = 200;
  std::size_t trajectories = 1000;
  std::size_t burn_in = 0;
  /// 0 selects horizon / 5.
  std::size_t tail_window = 0;
  std::uint64_t seed = 0;
  std::vector<NormOrder> orders{NormOrder(2.0)};
  double divergence_threshold = 1e12;
  /// Standard deviation of a Gaussian initial state; 0 gives x_0 = 0.
  double initial_state_std = 0.0;
  /// Worker threads; 0 reads FUNDLIM_THREADS, else the hardware count.
  unsigned threads = 0;

  std::size_t effective_tail_window() const { return tail_window == 0 ? horizon / 5 : tail_window; }
  /// Throws InputError when the invariants do not hold.
  void validate() const;
};

struct SignalNorms {
  NormOrder p;
  /// Empirical [mean_m |s_k|^p]^{1/p} (max_m |s_k| for p = inf), one per k.
  std::vector<double> per_time;
  /// Max of per_time over the tail window.
  double tail = 0.0;
  /// Per-trajectory tail summary used for resampling: mean over the window of
  /// |s_k|^p, or the window max of |s_k| for p = inf.
  std::vector<double> trajectory_tail;
};

enum class Signal { kError, kOutput };

struct SimulationResult {
  std::size_t horizon = 0;
  std::size_t trajectories = 0;
  std::size_t diverged_trajectories = 0;
  std::size_t tail_begin = 0;
  std::vector<SignalNorms> error;
  std::vector<SignalNorms> output;
  /// mean_m x_k^T x_k over non-diverged trajectories.
  std::vector<double> state_mean_square;
  bool stable = true;

  const SignalNorms& norms(Signal which, NormOrder p) const;
};

/// Monte Carlo closed loop: y_k = C x_k, z_k = K(y_k), e_k = z_k + d_k,
/// x_{k+1} = A x_k + B e_k, trajectory m seeded with seed + m.
/// Bit-identical for a fixed config regardless of thread count.
/// Throws UnstableLoop when every trajectory overflows.
SimulationResult run_closed_loop(const StateSpaceModel& model, const CausalController& controller,
                                 const DisturbanceModel& dist, const SimulationConfig& cfg);

/// ((1/M) sum |x_i|^p)^{1/p}, or max |x_i| for p = inf. Throws InputError on empty input.
double empirical_lp(std::span<const double> samples, NormOrder p);

struct Certification {
  double empirical = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  double margin_stderr = 0.0;
  bool satisfied = false;
};

inline constexpr std::size_t kBootstrapResamples = 200;

/// ratio = tail norm / bound; satisfied when ratio >= 1 - 3 * stderr, where
/// stderr is the trajectory-level bootstrap deviation of the ratio.
/// Throws CertificationRefused for an unstable result.
Certification verify_bound(const SimulationResult& result, const BoundReport& report, Signal which,
                           std::uint64_t bootstrap_seed = 0);

}  // namespace fundlim
