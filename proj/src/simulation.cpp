#include "fundlim/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#include "fundlim/errors.hpp"
#include "fundlim/format.hpp"

namespace fundlim {

// ---------------------------------------------------------------------------
// Controllers

std::string StaticGain::describe() const { return "gain:" + format_double(c_); }

LinearFilter::LinearFilter(std::vector<double> numerator, std::vector<double> denominator)
    : b_(std::move(numerator)), a_(std::move(denominator)) {
  if (b_.empty()) throw InputError("ARMA controller needs at least one numerator coefficient");
  for (double v : b_)
    if (!std::isfinite(v)) throw InputError("ARMA coefficients must be finite");
  for (double v : a_)
    if (!std::isfinite(v)) throw InputError("ARMA coefficients must be finite");
  reset();
}

void LinearFilter::reset() {
  y_hist_.assign(b_.size(), 0.0);
  z_hist_.assign(a_.size(), 0.0);
}

double LinearFilter::step(double y) {
  std::rotate(y_hist_.rbegin(), y_hist_.rbegin() + 1, y_hist_.rend());
  y_hist_[0] = y;
  double z = 0.0;
  for (std::size_t i = 0; i < b_.size(); ++i) z += b_[i] * y_hist_[i];
  for (std::size_t i = 0; i < a_.size(); ++i) z -= a_[i] * z_hist_[i];
  if (!z_hist_.empty()) {
    std::rotate(z_hist_.rbegin(), z_hist_.rbegin() + 1, z_hist_.rend());
    z_hist_[0] = z;
  }
  return z;
}

std::unique_ptr<CausalController> LinearFilter::clone() const { return std::make_unique<LinearFilter>(b_, a_); }

std::string LinearFilter::describe() const {
  std::string out = "arma:";
  for (std::size_t i = 0; i < b_.size(); ++i) out += (i ? "," : "") + format_double(b_[i]);
  out += ";";
  for (std::size_t i = 0; i < a_.size(); ++i) out += (i ? "," : "") + format_double(a_[i]);
  return out;
}

namespace {

std::vector<double> parse_list(const std::string& text, const std::string& spec) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw InputError("bad number '" + item + "' in controller spec '" + spec + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::unique_ptr<CausalController> parse_controller(const std::string& spec) {
  if (spec == "zero") return std::make_unique<ZeroController>();
  if (spec.rfind("gain:", 0) == 0) {
    const auto values = parse_list(spec.substr(5), spec);
    if (values.size() != 1) throw InputError("controller spec '" + spec + "' needs exactly one gain");
    return std::make_unique<StaticGain>(values[0]);
  }
  if (spec.rfind("arma:", 0) == 0) {
    const std::string body = spec.substr(5);
    const auto semi = body.find(';');
    const std::string num = semi == std::string::npos ? body : body.substr(0, semi);
    const std::string den = semi == std::string::npos ? std::string() : body.substr(semi + 1);
    return std::make_unique<LinearFilter>(parse_list(num, spec), parse_list(den, spec));
  }
  throw InputError("unknown controller spec '" + spec + "' (expected zero, gain:<c> or arma:<b...;a...>)");
}

// ---------------------------------------------------------------------------
// Configuration

void SimulationConfig::validate() const {
  if (horizon < 1) throw InputError("horizon must be >= 1");
  if (trajectories < 1) throw InputError("trajectories must be >= 1");
  const std::size_t w = effective_tail_window();
  if (w < 1) throw InputError("tail window must be >= 1 (horizon too short for the default K/5)");
  if (burn_in + w > horizon) throw InputError("burn_in + tail_window must not exceed horizon");
  if (!(divergence_threshold > 0.0)) throw InputError("divergence_threshold must be > 0");
  if (!(initial_state_std >= 0.0) || !std::isfinite(initial_state_std)) {
    throw InputError("initial_state_std must be finite and >= 0");
  }
  if (orders.empty()) throw InputError("at least one norm order is required");
}

const SignalNorms& SimulationResult::norms(Signal which, NormOrder p) const {
  const auto& list = which == Signal::kError ? error : output;
  for (const auto& n : list)
    if (n.p == p) return n;
  throw InputError("norm order " + p.to_string() + " was not simulated");
}

// ---------------------------------------------------------------------------
// Closed loop

namespace {

constexpr std::size_t kChunkSize = 256;

double abs_pow(double x, NormOrder p) {
  const double a = std::abs(x);
  if (p.is_infinite()) return a;
  const double q = p.value();
  if (q == 1.0) return a;
  if (q == 2.0) return a * a;
  return std::pow(a, q);
}

// Partial sums for a contiguous block of trajectories, combined in block order.
struct ChunkAccumulator {
  // [order][k]: sum of |s|^p, or max |s| for p = inf
  std::vector<std::vector<double>> error;
  std::vector<std::vector<double>> output;
  std::vector<double> state_sq;
  std::size_t valid = 0;
};

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FUNDLIM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

SimulationResult run_closed_loop(const StateSpaceModel& model, const CausalController& controller,
                                 const DisturbanceModel& dist, const SimulationConfig& cfg) {
  cfg.validate();
  const std::size_t horizon = cfg.horizon;
  const std::size_t m_total = cfg.trajectories;
  const std::size_t n_orders = cfg.orders.size();
  const std::size_t window = cfg.effective_tail_window();
  const std::size_t tail_begin = horizon - window;
  const Eigen::Index n = model.order();

  // per-trajectory tail summaries, indexed [order][trajectory]; NaN marks diverged
  std::vector<std::vector<double>> traj_e(n_orders, std::vector<double>(m_total));
  std::vector<std::vector<double>> traj_y(n_orders, std::vector<double>(m_total));

  const std::size_t n_chunks = (m_total + kChunkSize - 1) / kChunkSize;
  std::vector<ChunkAccumulator> chunks(n_chunks);

  auto run_chunk = [&](std::size_t chunk_index) {
    ChunkAccumulator acc;
    acc.error.assign(n_orders, std::vector<double>(horizon, 0.0));
    acc.output.assign(n_orders, std::vector<double>(horizon, 0.0));
    acc.state_sq.assign(horizon, 0.0);

    auto ctrl = controller.clone();
    std::vector<double> e_buf(horizon), y_buf(horizon), x_sq(horizon);
    Eigen::VectorXd x(n), x_next(n);

    const std::size_t first = chunk_index * kChunkSize;
    const std::size_t last = std::min(m_total, first + kChunkSize);
    for (std::size_t m = first; m < last; ++m) {
      const std::uint64_t traj_seed = cfg.seed + m;
      DisturbanceSampler sampler(dist, traj_seed);
      ctrl->reset();
      x.setZero();
      if (cfg.initial_state_std > 0.0) {
        std::mt19937_64 init_rng(mix_seed(~traj_seed));
        std::normal_distribution<double> normal(0.0, cfg.initial_state_std);
        for (Eigen::Index i = 0; i < n; ++i) x(i) = normal(init_rng);
      }

      bool diverged = false;
      for (std::size_t k = 0; k < horizon; ++k) {
        const double y = model.c().dot(x);
        const double z = ctrl->step(y);
        const double e = z + sampler.next();
        x_sq[k] = x.squaredNorm();
        y_buf[k] = y;
        e_buf[k] = e;
        x_next.noalias() = model.a() * x;
        x_next += model.b() * e;
        x.swap(x_next);
        if (!std::isfinite(e) || !std::isfinite(x_sq[k]) || !std::isfinite(y)) {
          diverged = true;
          break;
        }
      }

      if (diverged) {
        for (std::size_t o = 0; o < n_orders; ++o) {
          traj_e[o][m] = std::numeric_limits<double>::quiet_NaN();
          traj_y[o][m] = std::numeric_limits<double>::quiet_NaN();
        }
        continue;
      }
      ++acc.valid;
      for (std::size_t k = 0; k < horizon; ++k) acc.state_sq[k] += x_sq[k];
      for (std::size_t o = 0; o < n_orders; ++o) {
        const NormOrder p = cfg.orders[o];
        double tail_e = 0.0, tail_y = 0.0;
        auto& se = acc.error[o];
        auto& sy = acc.output[o];
        for (std::size_t k = 0; k < horizon; ++k) {
          const double ae = abs_pow(e_buf[k], p);
          const double ay = abs_pow(y_buf[k], p);
          if (p.is_infinite()) {
            se[k] = std::max(se[k], ae);
            sy[k] = std::max(sy[k], ay);
            if (k >= tail_begin) {
              tail_e = std::max(tail_e, ae);
              tail_y = std::max(tail_y, ay);
            }
          } else {
            se[k] += ae;
            sy[k] += ay;
            if (k >= tail_begin) {
              tail_e += ae;
              tail_y += ay;
            }
          }
        }
        if (!p.is_infinite()) {
          tail_e /= static_cast<double>(window);
          tail_y /= static_cast<double>(window);
        }
        traj_e[o][m] = tail_e;
        traj_y[o][m] = tail_y;
      }
    }
    chunks[chunk_index] = std::move(acc);
  };

  const unsigned n_threads = std::min<std::size_t>(resolve_threads(cfg.threads), n_chunks);
  if (n_threads <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < n_threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) run_chunk(c);
      });
    }
  }

  SimulationResult result;
  result.horizon = horizon;
  result.trajectories = m_total;
  result.tail_begin = tail_begin;
  std::size_t valid = 0;
  for (const auto& c : chunks) valid += c.valid;
  result.diverged_trajectories = m_total - valid;
  if (valid == 0) throw UnstableLoop("every simulated trajectory diverged (numerical overflow)");

  const double inv_m = 1.0 / static_cast<double>(valid);
  result.state_mean_square.assign(horizon, 0.0);
  for (const auto& c : chunks)
    for (std::size_t k = 0; k < horizon; ++k) result.state_mean_square[k] += c.state_sq[k];
  for (auto& v : result.state_mean_square) v *= inv_m;

  auto combine = [&](bool error_signal, std::size_t o) {
    const NormOrder p = cfg.orders[o];
    SignalNorms out{p, std::vector<double>(horizon, 0.0), 0.0, {}};
    for (const auto& c : chunks) {
      const auto& part = error_signal ? c.error[o] : c.output[o];
      for (std::size_t k = 0; k < horizon; ++k) {
        out.per_time[k] = p.is_infinite() ? std::max(out.per_time[k], part[k]) : out.per_time[k] + part[k];
      }
    }
    if (!p.is_infinite()) {
      for (auto& v : out.per_time) v = std::pow(v * inv_m, 1.0 / p.value());
    }
    out.tail = *std::max_element(out.per_time.begin() + static_cast<std::ptrdiff_t>(tail_begin), out.per_time.end());
    const auto& traj = error_signal ? traj_e[o] : traj_y[o];
    std::copy_if(traj.begin(), traj.end(), std::back_inserter(out.trajectory_tail),
                 [](double v) { return !std::isnan(v); });
    return out;
  };
  for (std::size_t o = 0; o < n_orders; ++o) {
    result.error.push_back(combine(true, o));
    result.output.push_back(combine(false, o));
  }

  const bool exceeded =
      std::any_of(result.state_mean_square.begin(), result.state_mean_square.end(),
                  [&](double v) { return !(v <= cfg.divergence_threshold); });
  result.stable = !exceeded && result.diverged_trajectories == 0;
  return result;
}

// ---------------------------------------------------------------------------

double empirical_lp(std::span<const double> samples, NormOrder p) {
  if (samples.empty()) throw InputError("empirical_lp needs at least one sample");
  if (p.is_infinite()) {
    double m = 0.0;
    for (double v : samples) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = 0.0;
  for (double v : samples) sum += abs_pow(v, p);
  return std::pow(sum / static_cast<double>(samples.size()), 1.0 / p.value());
}

Certification verify_bound(const SimulationResult& result, const BoundReport& report, Signal which,
                           std::uint64_t bootstrap_seed) {
  if (!result.stable) {
    throw CertificationRefused("closed loop is not mean-square stable; the bound's premise does not hold");
  }
  const auto& norms = result.norms(which, report.p());
  Certification cert;
  cert.empirical = norms.tail;
  cert.bound = report.bound();
  cert.ratio = cert.empirical / cert.bound;

  // Bootstrap the window-pooled trajectory statistic and transfer its
  // relative spread to the ratio.
  const auto& traj = norms.trajectory_tail;
  const NormOrder p = report.p();
  auto statistic = [&](const std::vector<std::size_t>* idx) {
    const std::size_t m = traj.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double v = traj[idx ? (*idx)[i] : i];
      acc = p.is_infinite() ? std::max(acc, v) : acc + v;
    }
    return p.is_infinite() ? acc : std::pow(acc / static_cast<double>(m), 1.0 / p.value());
  };
  const double center = statistic(nullptr);
  if (traj.size() > 1 && center > 0.0) {
    std::mt19937_64 rng(mix_seed(bootstrap_seed));
    std::uniform_int_distribution<std::size_t> pick(0, traj.size() - 1);
    std::vector<std::size_t> idx(traj.size());
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t b = 0; b < kBootstrapResamples; ++b) {
      for (auto& i : idx) i = pick(rng);
      const double s = statistic(&idx);
      sum += s;
      sum_sq += s * s;
    }
    const double nb = static_cast<double>(kBootstrapResamples);
    const double mean = sum / nb;
    const double var = std::max(0.0, (sum_sq - nb * mean * mean) / (nb - 1.0));
    cert.margin_stderr = cert.ratio * std::sqrt(var) / center;
  }
  cert.satisfied = cert.ratio >= 1.0 - 3.0 * cert.margin_stderr;
  return cert;
}

}  // namespace fundlim
