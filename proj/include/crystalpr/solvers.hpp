#pragma once

// Feasibility solvers for x in B (Fourier magnitude y0) intersected with
// S (K-sparse signals): the two projectors, alternating projection, and
// relaxed-reflect-reflect (RRR)
//
//   x <- x + beta * (P_B(2 P_S(x) - x) - P_S(x)),   beta in (0, 2),
//
// which is Douglas-Rachford at beta = 1.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "crystalpr/datagen.hpp"
#include "crystalpr/fourier.hpp"
#include "crystalpr/parallel.hpp"
#include "crystalpr/rng.hpp"
#include "crystalpr/symmetry.hpp"

namespace crystalpr {

enum class SolverVariant { AlternatingProjection, RRR };

inline const char* to_string(SolverVariant v) { return v == SolverVariant::RRR ? "rrr" : "ap"; }

inline SolverVariant variant_from_string(const std::string& s)
{
  if (s == "rrr" || s == "RRR") return SolverVariant::RRR;
  if (s == "ap" || s == "alternating-projection") return SolverVariant::AlternatingProjection;
  throw std::invalid_argument("unknown solver variant '" + s + "' (expected rrr|ap)");
}

struct SolverConfig {
  SolverVariant variant = SolverVariant::RRR;
  double beta = 0.5;
  std::uint64_t max_iter = 10'000'000;
  /// Success threshold on relative_error when the true signal is known.
  double success_tol = 1e-8;
  /// Success threshold on 1 - eta otherwise.
  double eta_tol = 1e-10;
  std::uint64_t seed = 0;
  bool record_trajectory = false;
  std::uint64_t trajectory_stride = 1;

  void validate() const
  {
    if (!(beta > 0.0 && beta < 2.0)) throw std::invalid_argument("SolverConfig: beta must lie in (0, 2)");
    if (max_iter == 0) throw std::invalid_argument("SolverConfig: max_iter must be positive");
    if (!(success_tol >= 0.0) || !(eta_tol >= 0.0)) throw std::invalid_argument("SolverConfig: tolerances must be >= 0");
    if (trajectory_stride == 0) throw std::invalid_argument("SolverConfig: trajectory_stride must be positive");
  }
};

struct TrajectoryPoint {
  std::uint64_t iter = 0;
  double error = 0.0;  // NaN without a reference signal
  double eta = 0.0;
};

struct SolveResult {
  Signal estimate;
  std::uint64_t iterations = 0;
  bool converged = false;
  /// The iterate stopped moving at a point of B and S that is not the
  /// reference orbit; further iterations cannot change the outcome.
  bool stagnated = false;
  double final_error = std::numeric_limits<double>::quiet_NaN();
  double final_eta = 0.0;
  std::vector<TrajectoryPoint> trajectory;
};

/// Buffers and transform plan for repeated projections on one group.
class ProjectionWorkspace {
public:
  ProjectionWorkspace(const AbelianGroup& g, Field field) : group_(g), field_(field), plan_(g), spec_(g.order()), order_(g.order())
  {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    mag_.resize(g.order());
  }

  const AbelianGroup& group() const { return group_; }
  Field field() const { return field_; }

  /// out = F^-1(y0 * sign(F in)), sign(0) = 0.  For real data the result is
  /// the real part, which equals inverting the conjugate-symmetrized spectrum.
  /// Returns the largest discarded imaginary part (0 for complex data).
  double project_B(std::span<const Complex> in, std::span<const double> y0, std::span<Complex> out)
  {
    std::copy(in.begin(), in.end(), spec_.begin());
    plan_.forward(spec_);
    for (std::size_t k = 0; k < spec_.size(); ++k) {
      const double m = std::sqrt(std::norm(spec_[k]));
      spec_[k] = m > 0.0 ? spec_[k] * (y0[k] / m) : Complex{0.0, 0.0};
    }
    plan_.inverse(spec_);
    double imag = 0.0;
    if (field_ == Field::Real) {
      for (std::size_t i = 0; i < spec_.size(); ++i) {
        imag = std::max(imag, std::abs(spec_[i].imag()));
        out[i] = Complex{spec_[i].real(), 0.0};
      }
    } else {
      std::copy(spec_.begin(), spec_.end(), out.begin());
    }
    return imag;
  }

  /// Keeps the K largest magnitudes, ties broken toward the lower index.
  void project_S(std::span<const Complex> in, std::size_t k, std::span<Complex> out)
  {
    const std::size_t n = in.size();
    if (k >= n) {
      std::copy(in.begin(), in.end(), out.begin());
      return;
    }
    for (std::size_t i = 0; i < n; ++i) mag_[i] = std::norm(in[i]);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    auto before = [&](std::size_t a, std::size_t b) { return mag_[a] > mag_[b] || (mag_[a] == mag_[b] && a < b); };
    if (k > 0) std::nth_element(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(k - 1), order_.end(), before);
    std::fill(out.begin(), out.end(), Complex{0.0, 0.0});
    for (std::size_t j = 0; j < k; ++j) out[order_[j]] = in[order_[j]];
  }

private:
  AbelianGroup group_;
  Field field_;
  DftPlan plan_;
  std::vector<Complex> spec_;
  std::vector<std::size_t> order_;
  std::vector<double> mag_;
};

inline void check_compatible(const Signal& x, const FourierMagnitude& y0)
{
  if (!(x.group() == y0.group)) throw std::domain_error("signal and Fourier magnitude live on different groups");
}

inline Signal project_B(const Signal& x, const FourierMagnitude& y0)
{
  check_compatible(x, y0);
  ProjectionWorkspace ws(x.group(), x.field());
  Signal out(x.group(), x.field());
  ws.project_B(x.values(), y0.values, out.values());
  return out;
}

inline Signal project_S(const Signal& x, std::size_t k)
{
  if (k > x.size()) throw std::domain_error("project_S: K exceeds signal length");
  ProjectionWorkspace ws(x.group(), x.field());
  Signal out(x.group(), x.field());
  ws.project_S(x.values(), k, out.values());
  return out;
}

inline Signal rrr_step(const Signal& x, const FourierMagnitude& y0, std::size_t k, double beta)
{
  if (!(beta > 0.0 && beta < 2.0)) throw std::invalid_argument("rrr_step: beta must lie in (0, 2)");
  check_compatible(x, y0);
  ProjectionWorkspace ws(x.group(), x.field());
  const std::size_t n = x.size();
  std::vector<Complex> ps(n), r(n), pb(n);
  ws.project_S(x.values(), k, ps);
  for (std::size_t i = 0; i < n; ++i) r[i] = 2.0 * ps[i] - x[i];
  ws.project_B(r, y0.values, pb);
  Signal out = x;
  for (std::size_t i = 0; i < n; ++i) out[i] += beta * (pb[i] - ps[i]);
  return out;
}

/// ||P_S(x)||^2 / ||x||^2: share of energy in the K dominant entries.
inline double eta_index(const Signal& x, std::size_t k)
{
  const double total = x.squared_norm();
  if (total == 0.0) throw std::domain_error("eta_index: zero signal");
  return project_S(x, k).squared_norm() / total;
}

namespace detail {

inline double squared_norm(std::span<const Complex> v)
{
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return s;
}

inline double top_k_energy(std::span<const Complex> v, std::size_t k, std::vector<double>& scratch)
{
  scratch.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) scratch[i] = std::norm(v[i]);
  if (k >= v.size()) return std::accumulate(scratch.begin(), scratch.end(), 0.0);
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k), scratch.end(), std::greater<>());
  return std::accumulate(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
}

}  // namespace detail

/// Iterates from an i.i.d. standard normal start (seeded by config.seed).
/// With x_true, success means relative_error(P_S(x), x_true) < success_tol;
/// without it, success means 1 - eta(P_B(2 P_S(x) - x)) < eta_tol, i.e. the
/// B-side iterate is K-sparse to working precision.
inline SolveResult solve(const FourierMagnitude& y0, std::size_t k, const SolverConfig& config, Field field = Field::Real,
                         const Signal* x_true = nullptr, const Signal* x_init = nullptr)
{
  config.validate();
  const auto& g = y0.group;
  const std::size_t n = g.order();
  if (k > n) throw std::domain_error("solve: K exceeds group order");
  if (x_true && (!(x_true->group() == g) || x_true->field() != field))
    throw std::domain_error("solve: reference signal does not match the problem");

  ProjectionWorkspace ws(g, field);
  std::vector<Complex> x(n), ps(n), r(n), pb(n);
  if (x_init) {
    std::copy(x_init->values().begin(), x_init->values().end(), x.begin());
  } else {
    Rng rng(config.seed);
    for (auto& v : x) v = field == Field::Real ? Complex{rng.normal(), 0.0} : Complex{rng.normal(), rng.normal()};
  }

  const double ref_norm2 = x_true ? x_true->squared_norm() : 0.0;
  std::vector<double> scratch;

  // Sorted magnitudes are invariant under every intrinsic symmetry, and
  // ||a - b||^2 >= sum_i (|a|_(i) - |b|_(i))^2, which gives a cheap lower
  // bound on the error; the full minimization runs only when it is small.
  std::vector<double> ref_mag, est_mag(n);
  if (x_true) {
    for (const auto& v : x_true->values()) ref_mag.push_back(std::sqrt(std::norm(v)));
    std::sort(ref_mag.begin(), ref_mag.end(), std::greater<>());
  }
  auto oracle_error = [&](std::span<const Complex> est) {
    if (!config.record_trajectory) {
      for (std::size_t i = 0; i < n; ++i) est_mag[i] = std::sqrt(std::norm(est[i]));
      std::sort(est_mag.begin(), est_mag.end(), std::greater<>());
      double bound = 0.0;
      for (std::size_t i = 0; i < n; ++i) bound += (est_mag[i] - ref_mag[i]) * (est_mag[i] - ref_mag[i]);
      bound /= ref_norm2;
      if (bound >= config.success_tol) return bound;
    }
    return relative_error(g, field, est, x_true->values()).error;
  };
  auto eta_of = [&](std::span<const Complex> v) {
    const double tot = detail::squared_norm(v);
    return tot > 0.0 ? detail::top_k_energy(v, k, scratch) / tot : 0.0;
  };

  SolveResult res;
  const bool rrr = config.variant == SolverVariant::RRR;
  std::uint64_t quiet = 0;
  constexpr std::uint64_t quiet_limit = 100;
  std::uint64_t it = 0;
  for (; it < config.max_iter; ++it) {
    // Candidate solution (K-sparse) and the B-side point.
    if (rrr) {
      ws.project_S(x, k, ps);
      for (std::size_t i = 0; i < n; ++i) r[i] = 2.0 * ps[i] - x[i];
      ws.project_B(r, y0.values, pb);
    } else {
      std::copy(x.begin(), x.end(), ps.begin());
      ws.project_B(x, y0.values, pb);
    }

    double err = std::numeric_limits<double>::quiet_NaN();
    if (x_true) err = oracle_error(ps);
    const double eta = (!x_true || config.record_trajectory) ? eta_of(pb) : 0.0;
    if (config.record_trajectory && it % config.trajectory_stride == 0) res.trajectory.push_back({it, err, eta});

    const bool done = x_true ? err < config.success_tol : 1.0 - eta < config.eta_tol;
    if (done) {
      res.converged = true;
      break;
    }

    double upd = 0.0;
    if (rrr) {
      for (std::size_t i = 0; i < n; ++i) {
        const Complex d = config.beta * (pb[i] - ps[i]);
        upd += std::norm(d);
        x[i] += d;
      }
    } else {
      ws.project_S(pb, k, x);
      for (std::size_t i = 0; i < n; ++i) upd += std::norm(x[i] - ps[i]);
    }
    // A fixed point of RRR has P_S(x) in B and S.  If it persists without
    // meeting the success test, the run can only end at the cap.
    const double scale = detail::squared_norm(ps);
    if (upd <= 1e-26 * scale) {
      if (++quiet >= quiet_limit) {
        res.stagnated = true;
        ++it;
        break;
      }
    } else {
      quiet = 0;
    }
  }

  res.iterations = it;
  Signal est(g, field, std::vector<Complex>(ps.begin(), ps.end()));
  if (field == Field::Real) est.force_real();
  if (x_true) res.final_error = relative_error(est, *x_true).error;
  res.final_eta = eta_of(pb);
  res.estimate = std::move(est);
  if (x_true && res.converged && !(res.final_error < config.success_tol)) res.converged = false;
  return res;
}

struct IterationStudyRow {
  std::size_t k = 0;
  double median_iters = 0.0;
  double success_rate = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
  /// Per-trial iteration counts; failed trials are recorded at max_iter.
  std::vector<std::uint64_t> counts;
  std::vector<bool> converged;
};

struct IterationStudyOptions {
  std::size_t trials = 100;
  bool require_large_diffset = false;
  unsigned threads = 1;
};

inline double quantile_sorted(const std::vector<std::uint64_t>& sorted, double q)
{
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * static_cast<double>(sorted[lo]) + w * static_cast<double>(sorted[hi]);
}

/// Planted-signal study: for each K, `trials` instances on Z_N with uniform
/// support and Uniform[0,1] values, each solved from its own random start.
inline std::vector<IterationStudyRow> iteration_study(std::size_t n, const std::vector<std::size_t>& ks,
                                                      const SolverConfig& config, const IterationStudyOptions& opt)
{
  config.validate();
  const auto g = AbelianGroup::cyclic(static_cast<int>(n));
  std::vector<IterationStudyRow> rows;
  for (auto k : ks) {
    IterationStudyRow row;
    row.k = k;
    row.counts.assign(opt.trials, 0);
    std::vector<char> ok(opt.trials, 0);
    parallel_for(opt.trials, opt.threads, [&](std::size_t t) {
      const std::uint64_t inst_seed = Rng::substream(config.seed, {k, t, 0}).next();
      PlantOptions po;
      po.require_large_diffset = opt.require_large_diffset;
      auto inst = plant_generic(g, k, inst_seed, po);
      SolverConfig c = config;
      c.record_trajectory = false;
      c.seed = Rng::substream(config.seed, {k, t, 1}).next();
      auto res = solve(inst.y0, k, c, Field::Real, &inst.x_true);
      ok[t] = res.converged ? 1 : 0;
      row.counts[t] = res.converged ? res.iterations : config.max_iter;
    });
    row.converged.assign(ok.begin(), ok.end());
    std::size_t wins = 0;
    for (char c : ok) wins += c ? 1 : 0;
    row.success_rate = opt.trials ? static_cast<double>(wins) / static_cast<double>(opt.trials) : 0.0;
    auto sorted = row.counts;
    std::sort(sorted.begin(), sorted.end());
    row.median_iters = quantile_sorted(sorted, 0.5);
    row.p10 = quantile_sorted(sorted, 0.1);
    row.p90 = quantile_sorted(sorted, 0.9);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace crystalpr
