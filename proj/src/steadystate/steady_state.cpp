#include "arraylight/steady_state.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SparseLU>

#include "arraylight/liouvillian.hpp"
#include "arraylight/observables.hpp"

namespace arraylight {

namespace {

using SparseSystem = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;
using Triplet = Eigen::Triplet<cplx>;

// Motional populations p_j(v) summed over electronic states, flattened (atom, v).
Eigen::VectorXd motional_populations(const CompositeBasis& basis, const DenseMatrix& rho) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.n_atoms() * basis.n_vib()));
  for (std::size_t f = 0; f < basis.dim(); ++f) {
    const double pop = rho(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(f)).real();
    for (std::size_t j = 0; j < basis.n_atoms(); ++j) {
      p(static_cast<Eigen::Index>(j * basis.n_vib() + static_cast<std::size_t>(basis.vibrational(f, j)))) += pop;
    }
  }
  return p;
}

constexpr double kMaxCondition = 1e13;

long estimate_nullity(const SparseSystem& a) {
  if (a.rows() > 3000) return -1;
  const Eigen::FullPivLU<DenseMatrix> lu{DenseMatrix(a)};
  return static_cast<long>(a.cols() - lu.rank());
}

Eigen::VectorXcd solve_refined(const SparseSystem& a, const Eigen::VectorXcd& b, int refinement, const char* what) {
  Eigen::SparseLU<SparseSystem, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    const long nullity = estimate_nullity(a);
    std::ostringstream os;
    os << what << ": steady-state system is singular (no unique steady state)";
    if (nullity >= 0) os << ", nullity " << nullity;
    throw SingularSteadyStateError(os.str(), nullity);
  }
  // Numerically singular systems (an isolated dark state with couplings at
  // round-off level) factorise without complaint.  Estimate ||A^-1|| by inverse
  // iteration and refuse condition numbers near 1/eps.
  double norm_a = 0.0;
  for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
    double col = 0.0;
    for (SparseSystem::InnerIterator it(a, c); it; ++it) col += std::abs(it.value());
    norm_a = std::max(norm_a, col);
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Constant(a.cols(), cplx(1.0, 0.5));
  double inv_norm = 0.0;
  for (int i = 0; i < 8; ++i) {
    v.normalize();
    v = lu.solve(v);
    inv_norm = v.norm();
    if (!std::isfinite(inv_norm)) break;
  }
  if (!(norm_a * inv_norm < kMaxCondition)) {
    const long nullity = estimate_nullity(a);
    std::ostringstream os;
    os << what << ": steady-state system is numerically singular (condition estimate " << norm_a * inv_norm << ")";
    if (nullity >= 0) os << ", nullity " << nullity;
    throw SingularSteadyStateError(os.str(), nullity);
  }
  Eigen::VectorXcd x = lu.solve(b);
  for (int i = 0; i < refinement; ++i) {
    const Eigen::VectorXcd r = b - a * x;
    x += lu.solve(r);
  }
  if (!x.allFinite()) throw SingularSteadyStateError(std::string(what) + ": solve produced non-finite values", -1);
  return x;
}

DenseMatrix unvec(const Eigen::VectorXcd& v, std::size_t d) {
  return Eigen::Map<const DenseMatrix>(v.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

// Solves the non-ground equations with the ground block of `held` fixed.
DenseMatrix frozen_sparse_lu(const LindbladModel& model, const SolverConfig& config, const std::vector<char>& ground,
                             const DenseMatrix& held) {
  const std::size_t d = model.dim();
  const std::size_t n = d * d;
  std::vector<std::ptrdiff_t> pos(n);
  std::vector<char> in_g(n, 0);
  std::ptrdiff_t nx = 0, ng = 0;
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t r = 0; r < d; ++r) {
      const auto i = vec_index(d, r, c);
      in_g[i] = ground[r] && ground[c];
      pos[i] = in_g[i] ? ng++ : nx++;
    }
  }

  const SuperOperator s = liouvillian_superoperator(model);
  std::vector<Triplet> txx, txg;
  txx.reserve(static_cast<std::size_t>(s.nonZeros()));
  for (Eigen::Index col = 0; col < s.outerSize(); ++col) {
    for (SuperOperator::InnerIterator it(s, col); it; ++it) {
      const auto row = static_cast<std::size_t>(it.row());
      if (in_g[row]) continue;
      if (in_g[static_cast<std::size_t>(col)]) {
        txg.emplace_back(static_cast<int>(pos[row]), static_cast<int>(pos[static_cast<std::size_t>(col)]), it.value());
      } else {
        txx.emplace_back(static_cast<int>(pos[row]), static_cast<int>(pos[static_cast<std::size_t>(col)]), it.value());
      }
    }
  }
  SparseSystem axx(nx, nx), axg(nx, ng);
  axx.setFromTriplets(txx.begin(), txx.end());
  axg.setFromTriplets(txg.begin(), txg.end());
  axx.makeCompressed();

  Eigen::VectorXcd g(ng);
  for (std::size_t i = 0; i < n; ++i) {
    if (in_g[i]) g(pos[i]) = held.data()[i];
  }
  const Eigen::VectorXcd x = solve_refined(axx, -(axg * g), config.refinement_steps, "steady_state_direct");

  Eigen::VectorXcd full(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) full(static_cast<Eigen::Index>(i)) = in_g[i] ? g(pos[i]) : x(pos[i]);
  return unvec(full, d);
}

// Schur form H = U T U^dag of one excitation-number sector.
struct SectorSchur {
  std::vector<Eigen::Index> index;
  DenseMatrix u, t;
};

// Solves H_m X - X H_n^dag = q by Bartels-Stewart on the Schur forms.
DenseMatrix solve_sector(const SectorSchur& a, const SectorSchur& b, const DenseMatrix& q) {
  const DenseMatrix f = a.u.adjoint() * q * b.u;
  DenseMatrix y(f.rows(), f.cols());
  DenseMatrix shifted = a.t;
  for (Eigen::Index k = f.cols(); k-- > 0;) {
    Eigen::VectorXcd rhs = f.col(k);
    for (Eigen::Index j = k + 1; j < f.cols(); ++j) rhs += std::conj(b.t(k, j)) * y.col(j);
    shifted.diagonal() = a.t.diagonal().array() - std::conj(b.t(k, k));
    y.col(k) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return a.u * y * b.u.adjoint();
}

// Block-Jacobi over excitation sectors.  The non-drive part of H_eff keeps the
// number of excitations, jumps lower both sides by one and the drive is weak,
// so every sweep is a set of small Sylvester solves and the iteration
// contracts like Omega / (smallest sector gap).  Returns false if it stalls.
bool sector_iteration(const LindbladModel& model, const SolverConfig& config, DenseMatrix& rho) {
  const auto& basis = model.basis();
  const std::size_t n_sectors = basis.n_atoms() + 1;
  std::vector<SectorSchur> sectors(n_sectors);
  for (std::size_t f = 0; f < basis.dim(); ++f) {
    sectors[static_cast<std::size_t>(basis.excitations(f))].index.push_back(static_cast<Eigen::Index>(f));
  }
  const DenseMatrix hd = (model.effective() - model.hl()).to_dense();
  for (auto& s : sectors) {
    const DenseMatrix block = hd(s.index, s.index);
    const Eigen::ComplexSchur<DenseMatrix> schur(block);
    if (schur.info() != Eigen::Success) return false;
    s.u = schur.matrixU();
    s.t = schur.matrixT();
  }

  const auto& hl = model.hl().matrix();
  const cplx i1(0.0, 1.0);
  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    // C = i (H_L rho - rho H_L) - J(rho)
    DenseMatrix c = i1 * (hl * rho - rho * hl);
    for (const auto& t : model.jumps()) c -= (t.left.matrix() * rho) * t.right.matrix();

    double change = 0.0;
    DenseMatrix next = rho;
    for (std::size_t m = 0; m < n_sectors; ++m) {
      for (std::size_t n = 0; n < n_sectors; ++n) {
        if (m == 0 && n == 0) continue;  // held block
        const auto& a = sectors[m];
        const auto& b = sectors[n];
        const DenseMatrix x = solve_sector(a, b, i1 * c(a.index, b.index));
        change = std::max(change, (x - rho(a.index, b.index)).cwiseAbs().maxCoeff());
        next(a.index, b.index) = x;
      }
    }
    rho = std::move(next);
    if (!rho.allFinite()) return false;
    if (change <= 1e-16 * rho.cwiseAbs().maxCoeff()) return true;
  }
  return false;
}

SteadyStateResult direct_frozen(const LindbladModel& model, const SolverConfig& config, const DensityMatrix& rho0) {
  const std::size_t d = model.dim();
  const auto& basis = model.basis();
  std::vector<char> ground(d, 0);
  for (auto f : basis.ground_manifold()) ground[f] = 1;

  // Initial guess: ground block from rho0, everything else empty.
  DenseMatrix rho = DenseMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t r = 0; r < d; ++r) {
      if (ground[r] && ground[c]) {
        rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            rho0.data()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
  }

  std::string note = "frozen-motion direct (sector iteration)";
  if (config.linear_solver != LinearSolver::sector_iteration || !sector_iteration(model, config, rho)) {
    note = config.linear_solver == LinearSolver::sector_iteration
               ? "frozen-motion direct (sparse LU after stalled sector iteration)"
               : "frozen-motion direct (sparse LU)";
    rho = frozen_sparse_lu(model, config, ground, rho);
  }

  SteadyStateResult out{DensityMatrix(std::move(rho))};
  out.method = SolverMethod::direct;
  out.rho.hermitize();
  out.rho.normalize();

  const DenseMatrix l = liouvillian_apply(model, out.rho.data());
  double res = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t r = 0; r < d; ++r) {
      if (!(ground[r] && ground[c])) {
        res = std::max(res, std::abs(l(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
      }
    }
  }
  out.residual = res;
  // Drift accumulated over one sampling window at the recoil rate of the held block.
  out.vibrational_drift = config.window * motional_populations(basis, l).cwiseAbs().maxCoeff();
  out.note = note;
  return out;
}

SteadyStateResult direct_trace_row(const LindbladModel& model, const SolverConfig& config) {
  const std::size_t d = model.dim();
  const SuperOperator s = liouvillian_superoperator(model);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(s.nonZeros()) + d);
  for (Eigen::Index col = 0; col < s.outerSize(); ++col) {
    for (SuperOperator::InnerIterator it(s, col); it; ++it) {
      if (it.row() != 0) t.emplace_back(static_cast<int>(it.row()), static_cast<int>(col), it.value());
    }
  }
  for (std::size_t k = 0; k < d; ++k) t.emplace_back(0, static_cast<int>(vec_index(d, k, k)), cplx(1.0, 0.0));
  const auto n = static_cast<Eigen::Index>(d * d);
  SparseSystem a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
  b(0) = 1.0;
  const Eigen::VectorXcd x = solve_refined(a, b, config.refinement_steps, "steady_state_direct");

  SteadyStateResult out{DensityMatrix(unvec(x, d))};
  out.method = SolverMethod::direct;
  out.rho.hermitize();
  out.rho.normalize();
  const DenseMatrix l = liouvillian_apply(model, out.rho.data());
  out.residual = l.cwiseAbs().maxCoeff();
  out.vibrational_drift = config.window * motional_populations(model.basis(), l).cwiseAbs().maxCoeff();
  out.note = "trace-row direct";
  return out;
}

Monitor default_monitor(const LindbladModel& model) {
  if (model.params().geometry == Geometry::waveguide_1d && model.params().rabi > 0.0) {
    auto obs = std::make_shared<ObservableSet>(model);
    return [obs](const DenseMatrix& rho) {
      const Observables o = obs->measure(rho);
      return std::make_pair(o.T, o.R);
    };
  }
  SparseOperator e(model.dim());
  for (std::size_t j = 0; j < model.basis().n_atoms(); ++j) {
    e += lift_atom_operator(model.basis(), j, local::excited(model.basis().n_vib()));
  }
  auto ops = std::make_shared<std::pair<SparseOperator, SparseOperator>>(std::move(e), model.hl());
  return [ops](const DenseMatrix& rho) {
    return std::make_pair(trace_of_product(ops->first, rho).real(), trace_of_product(ops->second, rho).real());
  };
}

// Dormand-Prince 5(4) with FSAL.
class DormandPrince {
 public:
  // Excited populations scale as Omega^2 and T, R are read from them after
  // dividing by Omega^2, so the absolute tolerance scales the same way.
  DormandPrince(const LindbladModel& model, const SolverConfig& config)
      : model_(model),
        config_(config),
        atol_(config.atol * std::clamp(model.params().rabi * model.params().rabi, 1e-12, 1.0)) {}

  void start(const DenseMatrix& y, double h) {
    y_ = y;
    k1_ = liouvillian_apply(model_, y_);
    h_ = h;
  }

  // Advance by one accepted step no longer than h_max.  Returns the step taken.
  double step(double h_max) {
    static constexpr double a21 = 1.0 / 5, a31 = 3.0 / 40, a32 = 9.0 / 40, a41 = 44.0 / 45, a42 = -56.0 / 15,
                            a43 = 32.0 / 9, a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729, a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656, b1 = 35.0 / 384, b3 = 500.0 / 1113,
                            b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84, e1 = 71.0 / 57600,
                            e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                            e7 = -1.0 / 40;
    for (int attempt = 0; attempt < 200; ++attempt) {
      const double h = std::min(h_, h_max);
      const DenseMatrix k2 = liouvillian_apply(model_, y_ + h * a21 * k1_);
      const DenseMatrix k3 = liouvillian_apply(model_, y_ + h * (a31 * k1_ + a32 * k2));
      const DenseMatrix k4 = liouvillian_apply(model_, y_ + h * (a41 * k1_ + a42 * k2 + a43 * k3));
      const DenseMatrix k5 = liouvillian_apply(model_, y_ + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
      const DenseMatrix k6 =
          liouvillian_apply(model_, y_ + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      DenseMatrix y_new = y_ + h * (b1 * k1_ + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      DenseMatrix k7 = liouvillian_apply(model_, y_new);
      const DenseMatrix err = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double norm = 0.0;
      for (Eigen::Index c = 0; c < err.cols(); ++c) {
        for (Eigen::Index r = 0; r < err.rows(); ++r) {
          const double scale =
              atol_ + config_.rtol * std::max(std::abs(y_(r, c)), std::abs(y_new(r, c)));
          norm = std::max(norm, std::abs(err(r, c)) / scale);
        }
      }
      const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      if (norm <= 1.0) {
        // Re-Hermitise; the generator preserves Hermiticity, so k7 follows suit.
        y_ = 0.5 * (y_new + y_new.adjoint());
        k1_ = 0.5 * (k7 + k7.adjoint());
        if (h == h_ || factor < 1.0) h_ = h * factor;
        return h;
      }
      h_ = h * factor;
      if (h_ < 1e-14) break;
    }
    throw std::runtime_error("propagate: step size underflow");
  }

  const DenseMatrix& state() const { return y_; }

 private:
  const LindbladModel& model_;
  const SolverConfig& config_;
  double atol_;
  DenseMatrix y_, k1_;
  double h_ = 0.0;
};

void check_rho0(const LindbladModel& model, const DensityMatrix& rho0) {
  if (rho0.dim() != model.dim()) throw std::invalid_argument("propagate: initial state has the wrong dimension");
}

}  // namespace

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be > 0");
  if (!(convergence > 0.0)) throw std::invalid_argument("SolverConfig: convergence must be > 0");
  if (!(window > 0.0)) throw std::invalid_argument("SolverConfig: window must be > 0");
  if (!(t_max > 0.0)) throw std::invalid_argument("SolverConfig: t_max must be > 0");
  if (!(rtol > 0.0) || !(atol > 0.0)) throw std::invalid_argument("SolverConfig: tolerances must be > 0");
}

SteadyStateResult steady_state_direct(const LindbladModel& model, const SolverConfig& config,
                                      const DensityMatrix* rho0) {
  config.validate();
  DirectFormulation f = config.formulation;
  if (f == DirectFormulation::automatic) {
    f = model.basis().n_vib() > 1 ? DirectFormulation::frozen_motion : DirectFormulation::trace_row;
  }
  if (f == DirectFormulation::trace_row) return direct_trace_row(model, config);
  const DensityMatrix initial = rho0 ? *rho0 : DensityMatrix::ground(model.basis());
  if (initial.dim() != model.dim()) throw std::invalid_argument("steady_state_direct: rho0 has the wrong dimension");
  return direct_frozen(model, config, initial);
}

SteadyStateResult propagate(const LindbladModel& model, const DensityMatrix& rho0, const SolverConfig& config,
                            Monitor monitor) {
  config.validate();
  check_rho0(model, rho0);
  if (!monitor) monitor = default_monitor(model);

  const Eigen::VectorXd p0 = motional_populations(model.basis(), rho0.data());
  DormandPrince dp(model, config);
  dp.start(rho0.data(), config.dt);

  double t = 0.0;
  double next_sample = config.window;
  auto last = monitor(rho0.data());
  double drift = 0.0;
  bool converged = false;
  while (t < config.t_max) {
    t += dp.step(next_sample - t);
    const DenseMatrix& y = dp.state();
    const double tr = y.trace().real();
    drift = std::max(drift, (motional_populations(model.basis(), y) / tr - p0).cwiseAbs().maxCoeff());
    if (t >= next_sample - 1e-12 * next_sample) {
      const auto now = monitor(y);
      const double scale = std::max({std::abs(now.first), std::abs(now.second), 1e-300});
      const bool settled = std::abs(now.first - last.first) <= config.convergence * scale &&
                           std::abs(now.second - last.second) <= config.convergence * scale;
      last = now;
      next_sample += config.window;
      if (settled) {
        converged = true;
        break;
      }
    }
  }

  SteadyStateResult out{DensityMatrix(dp.state())};
  out.method = SolverMethod::propagate;
  out.rho.hermitize();
  out.rho.normalize();
  out.converged = converged;
  out.elapsed = t;
  out.vibrational_drift = drift;
  out.residual = liouvillian_apply(model, out.rho.data()).cwiseAbs().maxCoeff();
  out.note = converged ? "propagated" : "propagation reached t_max without converging";
  return out;
}

DensityMatrix propagate_to(const LindbladModel& model, const DensityMatrix& rho0, double t_end,
                           const SolverConfig& config) {
  config.validate();
  check_rho0(model, rho0);
  if (t_end < 0.0) throw std::invalid_argument("propagate_to: negative time");
  DormandPrince dp(model, config);
  dp.start(rho0.data(), config.dt);
  double t = 0.0;
  while (t < t_end) t += dp.step(t_end - t);
  return DensityMatrix(dp.state());
}

SteadyStateResult solve_steady_state(const LindbladModel& model, const SolverConfig& config,
                                     const DensityMatrix* rho0) {
  SolverMethod m = config.method;
  if (m == SolverMethod::automatic) {
    m = model.dim() <= config.direct_max_dim ? SolverMethod::direct : SolverMethod::propagate;
  }
  const DensityMatrix initial = rho0 ? *rho0 : DensityMatrix::ground(model.basis());
  switch (m) {
    case SolverMethod::direct:
      return steady_state_direct(model, config, &initial);
    case SolverMethod::propagate:
      return propagate(model, initial, config);
    case SolverMethod::both: {
      SteadyStateResult d = steady_state_direct(model, config, &initial);
      const SteadyStateResult p = propagate(model, initial, config);
      d.cross_check = (d.rho.data() - p.rho.data()).cwiseAbs().maxCoeff();
      d.converged = d.converged && p.converged;
      d.elapsed = p.elapsed;
      d.method = SolverMethod::both;
      return d;
    }
    case SolverMethod::automatic:
      break;
  }
  throw std::logic_error("solve_steady_state: unhandled method");
}

}  // namespace arraylight
