#pragma once

// Numerical evidence for uniqueness:
//   * the torus G of Fourier-phase rotations and its action on signals,
//   * transversality of translated sparse subspaces via exact rank tests,
//   * the autocorrelation Jacobian on L_S (local injectivity),
//   * multi-start Gauss-Newton census of the fiber a^{-1}(a(x)) within L_{S'}.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "crystalpr/diffsets.hpp"
#include "crystalpr/fourier.hpp"
#include "crystalpr/parallel.hpp"
#include "crystalpr/rng.hpp"
#include "crystalpr/symmetry.hpp"

namespace crystalpr {

// ---------------------------------------------------------------------------
// Torus of Fourier-phase rotations

/// Per-frequency phases theta_k.  In the real case theta_k + theta_{-k} = 0
/// (mod 2 pi), which pins theta_k to {0, pi} wherever 2k = 0; the bits of
/// `component` select those signs in ascending frequency order.
struct TorusElement {
  AbelianGroup group;
  Field field = Field::Complex;
  unsigned component = 0;
  std::vector<double> phases;
};

/// Frequencies with k = -k.
inline std::vector<std::size_t> self_conjugate_frequencies(const AbelianGroup& g)
{
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < g.order(); ++k)
    if (g.index_negate(k) == k) out.push_back(k);
  return out;
}

inline std::size_t torus_component_count(const AbelianGroup& g, Field field)
{
  return field == Field::Complex ? 1 : std::size_t{1} << self_conjugate_frequencies(g).size();
}

inline double wrap_angle(double t)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  t = std::fmod(t, two_pi);
  if (t < 0.0) t += two_pi;
  return t >= two_pi ? 0.0 : t;
}

/// Largest |theta_k + theta_{-k}| mod 2 pi, as a distance to 0.
inline double conjugate_symmetry_defect(const TorusElement& g)
{
  double worst = 0.0;
  for (std::size_t k = 0; k < g.phases.size(); ++k) {
    const double s = wrap_angle(g.phases[k] + g.phases[g.group.index_negate(k)]);
    worst = std::max(worst, std::min(s, 2.0 * std::numbers::pi - s));
  }
  return worst;
}

inline TorusElement identity_torus(const AbelianGroup& g, Field field)
{
  return TorusElement{g, field, 0, std::vector<double>(g.order(), 0.0)};
}

inline TorusElement random_torus_element(const AbelianGroup& g, Field field, unsigned component, Rng& rng)
{
  if (component >= torus_component_count(g, field))
    throw std::domain_error("random_torus_element: component " + std::to_string(component) + " out of range");
  TorusElement t{g, field, component, std::vector<double>(g.order(), 0.0)};
  if (field == Field::Complex) {
    for (auto& th : t.phases) th = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return t;
  }
  std::size_t bit = 0;
  for (std::size_t k = 0; k < g.order(); ++k) {
    const std::size_t nk = g.index_negate(k);
    if (nk == k) {
      t.phases[k] = ((component >> bit++) & 1u) ? std::numbers::pi : 0.0;
    } else if (k < nk) {
      const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
      t.phases[k] = th;
      t.phases[nk] = wrap_angle(-th);
    }
  }
  return t;
}

/// g.x = F^{-1} diag(e^{i theta}) F x.
inline Signal torus_apply(const TorusElement& g, const Signal& x)
{
  if (!(g.group == x.group())) throw std::domain_error("torus_apply: group mismatch");
  if (g.phases.size() != x.size()) throw std::domain_error("torus_apply: phase count does not match group order");
  if (g.field == Field::Real && conjugate_symmetry_defect(g) > 1e-9)
    throw std::domain_error("torus_apply: real torus element violates theta_k + theta_{-k} = 0");
  Signal spec = dft(x);
  for (std::size_t k = 0; k < x.size(); ++k) spec[k] *= std::polar(1.0, g.phases[k]);
  Signal out = idft(spec);
  if (g.field == Field::Real && x.field() == Field::Real) out.force_real();
  return out;
}

/// Torus element carrying x to x', if |F x| = |F x'| to `tol` (relative).
/// Frequencies where x-hat vanishes get phase 0.
inline std::optional<TorusElement> torus_witness(const Signal& x, const Signal& xp, double tol = 1e-9)
{
  if (!(x.group() == xp.group())) throw std::domain_error("torus_witness: group mismatch");
  const Signal a = dft(x), b = dft(xp);
  const double scale = std::sqrt(x.squared_norm() * static_cast<double>(x.size())) + 1e-300;
  const Field f = x.field() == Field::Real && xp.field() == Field::Real ? Field::Real : Field::Complex;
  TorusElement t{x.group(), f, 0, std::vector<double>(x.size(), 0.0)};
  const auto sc = self_conjugate_frequencies(x.group());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (std::abs(std::abs(a[k]) - std::abs(b[k])) > tol * scale) return std::nullopt;
    if (std::abs(a[k]) > tol * scale) t.phases[k] = wrap_angle(std::arg(b[k]) - std::arg(a[k]));
  }
  if (f == Field::Real) {
    for (std::size_t j = 0; j < sc.size(); ++j) {
      double& th = t.phases[sc[j]];
      th = std::abs(th - std::numbers::pi) < 1e-6 ? std::numbers::pi : 0.0;
      if (th != 0.0) t.component |= 1u << j;
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
      const std::size_t nk = x.group().index_negate(k);
      if (k < nk) t.phases[nk] = wrap_angle(-t.phases[k]);
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Transversality

/// Rows: e_j for j in S', then g.e_i for i in S.
inline Eigen::MatrixXcd transversality_matrix(const SupportSet& s, const SupportSet& sp, const TorusElement& g)
{
  const auto& grp = s.group();
  if (!(grp == sp.group()) || !(grp == g.group)) throw std::domain_error("transversality_matrix: group mismatch");
  if (s.size() != sp.size()) throw std::domain_error("transversality_matrix: |S| != |S'|");
  const std::size_t k = s.size(), n = grp.order();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(2 * k), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < k; ++r) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(sp.indices()[r])) = 1.0;
  for (std::size_t r = 0; r < k; ++r) {
    Signal e(grp, g.field);
    e[s.indices()[r]] = 1.0;
    Signal ge = torus_apply(g, e);
    for (std::size_t c = 0; c < n; ++c) a(static_cast<Eigen::Index>(k + r), static_cast<Eigen::Index>(c)) = ge[c];
  }
  return a;
}

/// Singular values above rel_tol * sigma_max.
template <class Matrix>
int numerical_rank(const Matrix& m, double rel_tol = 1e-9)
{
  if (!(rel_tol > 0.0)) throw std::invalid_argument("numerical_rank: tolerance must be positive");
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::Matrix<typename Matrix::Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++r;
  return r;
}

/// dim(g.L_S intersect L_S') from the kernel of [e_{S'} | g.e_S].
inline std::size_t intersection_dimension(const SupportSet& s, const SupportSet& sp, const TorusElement& g,
                                          double rel_tol = 1e-9)
{
  Eigen::MatrixXcd cols = transversality_matrix(s, sp, g).transpose();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(cols);
  lu.setThreshold(rel_tol);
  return static_cast<std::size_t>(lu.dimensionOfKernel());
}

struct SprimeRank {
  SupportSet sprime;
  int rank = 0;
  bool full = false;
  unsigned draw = 0;  // which draw produced `rank`
};

struct TransversalityComponent {
  unsigned component = 0;
  std::vector<double> witness_phases;  // first draw
  std::vector<SprimeRank> per_sprime;
};

struct TransversalityReport {
  SupportSet support;
  Field field = Field::Complex;
  unsigned draws_per_component = 0;
  std::vector<TransversalityComponent> components;
  bool verdict = false;
};

/// For every K-subset S' and every component of G, looks for a draw g with
/// rank A_{S,S'}(g) = 2K.  The verdict is true when all pairs succeed.
inline TransversalityReport check_transversality(const SupportSet& s, Field field, Rng& rng, unsigned draws = 3,
                                                 std::uint64_t cap = default_enumeration_cap)
{
  const auto& grp = s.group();
  const std::size_t k = s.size(), n = grp.order();
  if (2 * k > n) throw std::domain_error("check_transversality: 2K > |A|, transversality is impossible");
  if (draws == 0) throw std::invalid_argument("check_transversality: draws must be positive");
  check_enumeration_cap(n, k, cap);

  TransversalityReport rep{s, field, draws, {}, true};
  const auto ncomp = static_cast<unsigned>(torus_component_count(grp, field));
  for (unsigned c = 0; c < ncomp; ++c) {
    std::vector<TorusElement> gs;
    for (unsigned d = 0; d < draws; ++d) gs.push_back(random_torus_element(grp, field, c, rng));
    TransversalityComponent comp{c, gs.front().phases, {}};
    for_each_subset(n, k, [&](const std::vector<std::size_t>& idx) {
      SprimeRank pr{SupportSet(grp, idx), 0, false, 0};
      for (unsigned d = 0; d < draws && !pr.full; ++d) {
        pr.rank = numerical_rank(transversality_matrix(s, pr.sprime, gs[d]));
        pr.full = pr.rank == static_cast<int>(2 * k);
        pr.draw = d;
      }
      if (!pr.full) rep.verdict = false;
      comp.per_sprime.push_back(std::move(pr));
    });
    rep.components.push_back(std::move(comp));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Autocorrelation restricted to L_S

/// One real coordinate of the restricted autocorrelation: Re or Im of a[cls].
struct AutocorrRow {
  std::size_t cls = 0;
  bool imag = false;
};

/// Real data: one row per class.  Complex data: Re and Im rows, except Re
/// only on classes with l = -l where a[l] is real.
inline std::vector<AutocorrRow> autocorrelation_rows(const AbelianGroup& g, Field field,
                                                     const std::vector<std::size_t>& classes)
{
  std::vector<AutocorrRow> rows;
  for (auto c : classes) {
    rows.push_back({c, false});
    if (field == Field::Complex && g.index_negate(c) != c) rows.push_back({c, true});
  }
  return rows;
}

/// a[l] = sum_{i in S} x[i] conj(x[i+l]) for x supported in S.
inline Complex sparse_autocorrelation(const SupportSet& s, std::span<const Complex> x, std::size_t l)
{
  const auto& g = s.group();
  Complex acc{0.0, 0.0};
  for (auto i : s.indices()) acc += x[i] * std::conj(x[g.index_add(i, l)]);
  return acc;
}

inline Eigen::VectorXd restricted_autocorrelation(const SupportSet& s, std::span<const Complex> x,
                                                  const std::vector<AutocorrRow>& rows)
{
  Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Complex a = sparse_autocorrelation(s, x, rows[r].cls);
    v(static_cast<Eigen::Index>(r)) = rows[r].imag ? a.imag() : a.real();
  }
  return v;
}

/// Columns: x_j (real), or Re x_j then Im x_j (complex), j over S in order.
///   d a[l] / d Re x_j = conj(x[j+l]) + x[j-l]
///   d a[l] / d Im x_j = i conj(x[j+l]) - i x[j-l]
inline Eigen::MatrixXd autocorrelation_jacobian(const SupportSet& s, Field field, std::span<const Complex> x,
                                                const std::vector<AutocorrRow>& rows)
{
  const auto& g = s.group();
  const std::size_t k = s.size();
  const std::size_t ncol = field == Field::Real ? k : 2 * k;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ncol));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t l = rows[r].cls;
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t i = s.indices()[c];
      const Complex fwd = std::conj(x[g.index_add(i, l)]);
      const Complex bwd = x[g.index_sub(i, l)];
      const Complex du = fwd + bwd;
      const Complex dv = Complex{0.0, 1.0} * (fwd - bwd);
      j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r].imag ? du.imag() : du.real();
      if (field == Field::Complex)
        j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k + c)) = rows[r].imag ? dv.imag() : dv.real();
    }
  }
  return j;
}

/// Jacobian over the classes of S - S.
inline Eigen::MatrixXd autocorrelation_jacobian(const SupportSet& s, const Signal& x)
{
  if (!(s.group() == x.group())) throw std::domain_error("autocorrelation_jacobian: group mismatch");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != Complex{} && !s.contains(i)) throw std::domain_error("autocorrelation_jacobian: x not supported in S");
  const auto rows = autocorrelation_rows(s.group(), x.field(), difference_set(s).classes);
  return autocorrelation_jacobian(s, x.field(), x.values(), rows);
}

/// Random signal with i.i.d. standard normal entries on S.
inline Signal random_signal_on(const SupportSet& s, Field field, Rng& rng)
{
  Signal x(s.group(), field);
  for (auto i : s.indices()) {
    const double re = rng.normal();
    x[i] = field == Field::Real ? Complex{re, 0.0} : Complex{re, rng.normal()};
  }
  return x;
}

struct LocalUniquenessResult {
  bool unique = false;
  int expected_rank = 0;  // K (real) or 2K - 1 (complex, one S^1 direction)
  std::vector<int> ranks;
};

/// Jacobian rank at `trials` random points of L_S.  Immediately false when
/// |S - S| < K since the map then cannot be locally injective.
inline LocalUniquenessResult local_uniqueness(const SupportSet& s, Field field, std::size_t trials, Rng& rng)
{
  const std::size_t k = s.size();
  LocalUniquenessResult res;
  res.expected_rank = static_cast<int>(field == Field::Real ? k : 2 * k - 1);
  if (difference_set(s).size() < k) return res;
  res.unique = true;
  for (std::size_t t = 0; t < trials; ++t) {
    const int r = numerical_rank(autocorrelation_jacobian(s, random_signal_on(s, field, rng)));
    res.ranks.push_back(r);
    if (r != res.expected_rank) res.unique = false;
  }
  return res;
}

inline bool local_uniqueness_check(const SupportSet& s, Field field, std::size_t trials, Rng& rng)
{
  return local_uniqueness(s, field, trials, rng).unique;
}

// ---------------------------------------------------------------------------
// Fiber search

enum class FiberVerdict { OnlyIntrinsic, ExtraSolutionFound, Inconclusive };

inline const char* to_string(FiberVerdict v)
{
  switch (v) {
    case FiberVerdict::OnlyIntrinsic: return "OnlyIntrinsic";
    case FiberVerdict::ExtraSolutionFound: return "ExtraSolutionFound";
    default: return "Inconclusive";
  }
}

struct FiberSearchOptions {
  std::size_t starts = 200;
  double tol = 1e-10;           // relative autocorrelation residual declaring a solution
  std::size_t max_iter = 1000;
  double dedup_tol = 1e-6;      // relative to ||x||
  double intrinsic_tol = 1e-8;  // relative to ||x||
  double stationary_tol = 1e-6; // on ||J^T r|| / (||J|| ||r||)
  unsigned threads = 1;
};

struct FiberRun {
  Signal xprime;
  double residual = 0.0;  // ||a(x') - a(x)|| / ||a(x)|| on the difference classes
  std::size_t iterations = 0;
  bool converged = false;  // residual below tol or a stationary point
  bool solution = false;
};

/// Damped Gauss-Newton on ||a(x') - a(x)||^2 over x' in L_{S'}, started at `start`.
inline FiberRun fiber_descent(const SupportSet& sp, const Signal& x, const Signal& start, const FiberSearchOptions& opt,
                              const std::vector<AutocorrRow>& rows)
{
  const auto& g = sp.group();
  const Field field = x.field();
  const std::size_t k = sp.size();
  const std::size_t ncol = field == Field::Real ? k : 2 * k;
  const SupportSet sx = support_of(x);
  const Eigen::VectorXd target = restricted_autocorrelation(sx, x.values(), rows);
  const double tnorm = std::max(target.norm(), 1e-300);

  std::vector<Complex> cur(g.order(), Complex{});
  Eigen::VectorXd p(static_cast<Eigen::Index>(ncol));
  for (std::size_t c = 0; c < k; ++c) {
    const Complex v = start[sp.indices()[c]];
    p(static_cast<Eigen::Index>(c)) = v.real();
    if (field == Field::Complex) p(static_cast<Eigen::Index>(k + c)) = v.imag();
  }
  auto load = [&](const Eigen::VectorXd& q, std::vector<Complex>& out) {
    for (std::size_t c = 0; c < k; ++c)
      out[sp.indices()[c]] = Complex{q(static_cast<Eigen::Index>(c)),
                                     field == Field::Complex ? q(static_cast<Eigen::Index>(k + c)) : 0.0};
  };
  auto resid = [&](const std::vector<Complex>& v) -> Eigen::VectorXd { return restricted_autocorrelation(sp, v, rows) - target; };

  FiberRun run;
  load(p, cur);
  Eigen::VectorXd r = resid(cur);
  std::size_t polish = 0;
  double mu = 0.0;
  int stall = 0;
  std::vector<Complex> trial(g.order(), Complex{});
  for (run.iterations = 0; run.iterations < opt.max_iter; ++run.iterations) {
    if (r.norm() / tnorm < opt.tol) {
      // A few extra steps tighten x' well below the declaration threshold.
      if (++polish > 3) {
        run.converged = true;
        break;
      }
    }
    const Eigen::MatrixXd jac = autocorrelation_jacobian(sp, field, cur, rows);
    // Stationary: the residual is (nearly) orthogonal to the range of J.
    if ((jac.transpose() * r).norm() <= opt.stationary_tol * jac.norm() * r.norm()) {
      run.converged = true;
      break;
    }
    Eigen::VectorXd step;
    if (mu == 0.0) {
      step = jac.completeOrthogonalDecomposition().solve(-r);
    } else {
      Eigen::MatrixXd aug(jac.rows() + jac.cols(), jac.cols());
      aug << jac, std::sqrt(mu) * Eigen::MatrixXd::Identity(jac.cols(), jac.cols());
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(aug.rows());
      rhs.head(r.size()) = -r;
      step = aug.colPivHouseholderQr().solve(rhs);
    }
    if (step.norm() < 1e-12 * std::max(1.0, p.norm())) {
      run.converged = true;
      break;
    }
    double t = 1.0;
    bool moved = false;
    int h = 0;
    for (; h < 40; ++h, t *= 0.5) {
      const Eigen::VectorXd q = p + t * step;
      load(q, trial);
      const Eigen::VectorXd rq = resid(trial);
      if (rq.norm() < r.norm()) {
        stall = rq.norm() > (1.0 - 1e-6) * r.norm() ? stall + 1 : 0;
        p = q;
        r = rq;
        cur.swap(trial);
        moved = true;
        break;
      }
    }
    if (stall >= 20) {  // creeping toward a positive-residual minimum
      run.converged = true;
      break;
    }
    if (!moved) {
      if (mu == 0.0) {
        run.converged = true;
        break;
      }
      mu = 0.0;
      continue;
    }
    // Heavy backtracking means the Gauss-Newton model is poor along a
    // near-null direction of J; regularize the next step (Levenberg-Marquardt).
    const double jn2 = jac.squaredNorm();
    if (h >= 2)
      mu = std::max(4.0 * mu, 1e-4 * jn2);
    else if (h == 0)
      mu = mu / 4.0 < 1e-12 * jn2 ? 0.0 : mu / 4.0;
  }
  run.residual = r.norm() / tnorm;
  run.solution = run.residual < opt.tol;
  if (run.solution) run.converged = true;
  run.xprime = Signal(g, field, std::move(cur));
  return run;
}

struct FiberSolution {
  Signal xprime;
  double residual = 0.0;  // against the full O(|A|^2) autocorrelation
  bool intrinsic = false;
  SymmetryElement witness;  // nearest intrinsic g, with g.x ~ x' when intrinsic
  double distance = 0.0;    // ||g.x - x'|| / ||x||
  std::size_t hits = 0;     // starts that landed here
};

struct FiberSearchReport {
  SupportSet support;
  SupportSet sprime;
  Signal x;
  std::size_t starts = 0;
  std::size_t converged_starts = 0;
  std::size_t solution_starts = 0;
  std::vector<FiberSolution> solutions;
  FiberVerdict verdict = FiberVerdict::Inconclusive;

  std::size_t extra_count() const
  {
    return static_cast<std::size_t>(std::count_if(solutions.begin(), solutions.end(), [](const auto& s) { return !s.intrinsic; }));
  }
};

/// ||a(x') - a(x)|| / ||a(x)|| with the reference autocorrelation.
inline double autocorrelation_residual(const Signal& x, const Signal& xp)
{
  const auto a = periodic_autocorrelation(x).values;
  const auto b = periodic_autocorrelation(xp).values;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(a[i]);
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

/// Classifies x' against x: intrinsic iff some g in D has ||g.x - x'|| <= tol ||x||.
inline FiberSolution classify_solution(const Signal& x, const Signal& xp, double intrinsic_tol)
{
  FiberSolution sol;
  sol.xprime = xp;
  sol.residual = autocorrelation_residual(x, xp);
  const RelativeError re = relative_error(x, xp);  // argmin carries x onto x'
  sol.witness = re.argmin;
  const Signal gx = apply(re.argmin, x);
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += std::norm(gx[i] - xp[i]);
  sol.distance = std::sqrt(d / x.squared_norm());
  sol.intrinsic = sol.distance <= intrinsic_tol;
  return sol;
}

/// Multi-start census of { x' in L_{S'} : a(x') = a(x) }.  Stationary points
/// that are not solutions count as converged starts.
inline FiberSearchReport fiber_search(const SupportSet& s, const SupportSet& sp, const Signal& x, Rng& rng,
                                      const FiberSearchOptions& opt = {})
{
  if (!(s.group() == sp.group()) || !(s.group() == x.group())) throw std::domain_error("fiber_search: group mismatch");
  if (s.size() != sp.size()) throw std::domain_error("fiber_search: |S| != |S'|");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != Complex{} && !s.contains(i)) throw std::domain_error("fiber_search: x not supported in S");
  const auto ds = difference_set(s);
  if (!(ds == difference_set(sp))) throw std::domain_error("fiber_search: S and S' have different difference sets");

  const auto rows = autocorrelation_rows(s.group(), x.field(), ds.classes);
  const double xnorm = std::sqrt(x.squared_norm());
  std::vector<Signal> starts;
  starts.reserve(opt.starts);
  for (std::size_t t = 0; t < opt.starts; ++t) {
    Signal z = random_signal_on(sp, x.field(), rng);
    const double zn = std::sqrt(z.squared_norm());
    for (auto& v : z.values()) v *= xnorm / zn;
    starts.push_back(std::move(z));
  }
  std::vector<FiberRun> runs(opt.starts);
  parallel_for(opt.starts, opt.threads, [&](std::size_t t) { runs[t] = fiber_descent(sp, x, starts[t], opt, rows); });

  FiberSearchReport rep{s, sp, x, opt.starts, 0, 0, {}, FiberVerdict::Inconclusive};
  for (auto& run : runs) {
    if (run.converged) ++rep.converged_starts;
    if (!run.solution) continue;
    ++rep.solution_starts;
    auto same = std::find_if(rep.solutions.begin(), rep.solutions.end(), [&](const FiberSolution& f) {
      double d = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) d += std::norm(f.xprime[i] - run.xprime[i]);
      return std::sqrt(d) <= opt.dedup_tol * xnorm;
    });
    if (same != rep.solutions.end()) {
      ++same->hits;
      continue;
    }
    FiberSolution sol = classify_solution(x, run.xprime, opt.intrinsic_tol);
    sol.hits = 1;
    rep.solutions.push_back(std::move(sol));
  }
  if (rep.extra_count() > 0)
    rep.verdict = FiberVerdict::ExtraSolutionFound;
  else if (rep.converged_starts == rep.starts)
    rep.verdict = FiberVerdict::OnlyIntrinsic;
  return rep;
}

// ---------------------------------------------------------------------------
// Sweep over support classes

struct SweepOptions {
  std::size_t starts = 200;
  std::size_t x_draws = 3;
  std::uint64_t seed = 0;
  bool include_diagonal = true;  // S = S' probes vector recovery
  unsigned threads = 1;
  std::uint64_t cap = default_enumeration_cap;
};

struct SweepRow {
  SupportSet support;
  SupportSet sprime;
  std::size_t diff_size = 0;
  std::vector<FiberVerdict> verdicts;  // one per x draw
  std::size_t extra_solutions = 0;     // distinct, summed over draws
  double max_residual = 0.0;           // over all reported solutions

  bool extra_found() const
  {
    return std::find(verdicts.begin(), verdicts.end(), FiberVerdict::ExtraSolutionFound) != verdicts.end();
  }
  bool inconclusive() const
  {
    return std::find(verdicts.begin(), verdicts.end(), FiberVerdict::Inconclusive) != verdicts.end();
  }
};

struct SweepReport {
  AbelianGroup group;
  std::size_t k = 0;
  Field field = Field::Real;
  SweepOptions options;
  std::vector<SweepRow> rows;

  const SweepRow* find(const SupportSet& a, const SupportSet& b) const
  {
    const SupportSet ca = canonical_support(a), cb = canonical_support(b);
    for (const auto& r : rows)
      if ((r.support == ca && r.sprime == cb) || (r.support == cb && r.sprime == ca)) return &r;
    return nullptr;
  }
};

/// Runs fiber_search on every pair of support classes sharing a difference
/// set, with `x_draws` generic signals on S per pair.
inline SweepReport support_recovery_sweep(const AbelianGroup& grp, std::size_t k, Field field, const SweepOptions& opt)
{
  const auto classes = enumerate_support_classes(grp, k, opt.cap);
  std::vector<DifferenceSet> ds;
  for (const auto& c : classes) ds.push_back(difference_set(c));

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < classes.size(); ++a)
    for (std::size_t b = a; b < classes.size(); ++b)
      if ((a != b || opt.include_diagonal) && ds[a] == ds[b]) pairs.emplace_back(a, b);

  SweepReport rep{grp, k, field, opt, std::vector<SweepRow>(pairs.size())};
  parallel_for(pairs.size(), opt.threads, [&](std::size_t p) {
    const auto [a, b] = pairs[p];
    SweepRow row{classes[a], classes[b], ds[a].size(), {}, 0, 0.0};
    for (std::size_t d = 0; d < opt.x_draws; ++d) {
      Rng xr = Rng::substream(opt.seed, {a, b, d, 0});
      Rng sr = Rng::substream(opt.seed, {a, b, d, 1});
      const Signal x = random_signal_on(classes[a], field, xr);
      FiberSearchOptions fo;
      fo.starts = opt.starts;
      const auto fr = fiber_search(classes[a], classes[b], x, sr, fo);
      row.verdicts.push_back(fr.verdict);
      row.extra_solutions += fr.extra_count();
      for (const auto& s : fr.solutions) row.max_residual = std::max(row.max_residual, s.residual);
    }
    rep.rows[p] = std::move(row);
  });
  return rep;
}

}  // namespace crystalpr
