#include "arraylight/spatial_average.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "arraylight/steady_state.hpp"

namespace arraylight {

namespace {

// Pinned-array coupling matrix (without the drive): rows as in coupled_dipole_solve.
Eigen::MatrixXcd coupling_matrix(const ModelParams& params, const std::vector<Vec3>& positions, double detuning) {
  const PairKernel kernel = default_kernel(params);
  const auto n = static_cast<Eigen::Index>(positions.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (j == k) {
        m(j, k) = cplx(detuning, 0.5 * kernel.self_gamma);
        continue;
      }
      const Vec3 s = positions[static_cast<std::size_t>(j)] - positions[static_cast<std::size_t>(k)];
      KernelValue kv;
      try {
        kv = kernel.evaluate(s);
      } catch (const std::domain_error&) {
        throw std::invalid_argument("coupled_dipole_solve: coincident atoms");
      }
      m(j, k) = cplx(-kv.omega, 0.5 * kv.gamma);
    }
  }
  return m;
}

struct SamplePoint {
  std::vector<Vec3> displacements;
  double weight;
};

// Unweighted (T, R) at every sample point, evaluated in parallel.
std::pair<std::vector<double>, std::vector<double>> evaluate_points(const ModelParams& params,
                                                                    const std::vector<SamplePoint>& points,
                                                                    FixedMethod method) {
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  std::vector<double> t(points.size()), r(points.size());
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const Observables o = fixed_position_observables(params, points[static_cast<std::size_t>(i)].displacements, method);
      t[static_cast<std::size_t>(i)] = o.T;
      r[static_cast<std::size_t>(i)] = o.R;
    } catch (const std::exception& e) {
#pragma omp critical(arraylight_average_error)
      error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error("average_observables: " + error);
  return {std::move(t), std::move(r)};
}

// Weighted sum with a fixed reduction order.
double weighted_sum(const std::vector<SamplePoint>& points, const std::vector<double>& values) {
  std::vector<double> w(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) w[i] = points[i].weight * values[i];
  return pairwise_sum(w);
}

std::pair<double, double> evaluate(const ModelParams& params, const std::vector<SamplePoint>& points,
                                   FixedMethod method) {
  const auto [t, r] = evaluate_points(params, points, method);
  return {weighted_sum(points, t), weighted_sum(points, r)};
}

std::vector<SamplePoint> relative_points(const ModelParams& params, const PositionDistribution& dist,
                                         const QuadratureRule& rule) {
  const double s = std::hypot(dist.effective_sigma(0).x(), dist.effective_sigma(1).x());
  std::vector<SamplePoint> pts;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    std::vector<Vec3> d(params.n_atoms(), Vec3::Zero());
    d[1].x() = s * rule.nodes[i];
    pts.push_back({std::move(d), rule.weights[i]});
  }
  return pts;
}

std::vector<SamplePoint> product_points(const ModelParams& params, const PositionDistribution& dist,
                                        const QuadratureRule& rule) {
  struct Dim {
    std::size_t atom;
    int axis;
    double sigma;
  };
  std::vector<Dim> dims;
  const int n_axes = params.geometry == Geometry::waveguide_1d ? 1 : 3;
  for (std::size_t j = 0; j < params.n_atoms(); ++j) {
    const Vec3 s = dist.effective_sigma(j);
    for (int a = 0; a < n_axes; ++a) {
      if (s(a) > 0.0) dims.push_back({j, a, s(a)});
    }
  }
  const double total = std::pow(static_cast<double>(rule.order), static_cast<double>(dims.size()));
  if (total > 2e7) throw std::invalid_argument("average_observables: product rule too large; use monte_carlo");

  std::vector<SamplePoint> pts;
  std::vector<std::size_t> idx(dims.size(), 0);
  const std::size_t n_rule = rule.nodes.size();
  while (true) {
    std::vector<Vec3> d(params.n_atoms(), Vec3::Zero());
    double w = 1.0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      d[dims[k].atom](dims[k].axis) = dims[k].sigma * rule.nodes[idx[k]];
      w *= rule.weights[idx[k]];
    }
    pts.push_back({std::move(d), w});
    std::size_t k = 0;
    for (; k < dims.size(); ++k) {
      if (++idx[k] < n_rule) break;
      idx[k] = 0;
    }
    if (k == dims.size()) break;
  }
  return pts;
}

}  // namespace

Vec3 PositionDistribution::effective_sigma(std::size_t j) const {
  if (kind == DistributionKind::delta || j >= sigma.size()) return Vec3::Zero();
  const Vec3 s = sigma[j];
  return kind == DistributionKind::thermal ? Vec3(s * std::sqrt(2.0 * nbar + 1.0)) : s;
}

PositionDistribution PositionDistribution::ground_state(const ModelParams& params) {
  PositionDistribution d;
  d.kind = DistributionKind::vibrational_ground;
  Vec3 s = Vec3::Zero();
  for (const auto& a : params.axes) s += (a.eta * a.direction).cwiseAbs();
  d.sigma.assign(params.n_atoms(), s);
  return d;
}

PositionDistribution PositionDistribution::thermal(const ModelParams& params, double nbar) {
  if (!(nbar >= 0.0)) throw std::invalid_argument("PositionDistribution: nbar must be >= 0");
  PositionDistribution d = ground_state(params);
  d.kind = DistributionKind::thermal;
  d.nbar = nbar;
  return d;
}

PositionDistribution PositionDistribution::delta(std::size_t n_atoms) {
  PositionDistribution d;
  d.kind = DistributionKind::delta;
  d.sigma.assign(n_atoms, Vec3::Zero());
  return d;
}

Eigen::VectorXcd coupled_dipole_solve(const ModelParams& params, const std::vector<Vec3>& positions) {
  if (positions.empty()) throw std::invalid_argument("coupled_dipole_solve: no atoms");
  const Eigen::MatrixXcd m = coupling_matrix(params, positions, params.detuning);
  Eigen::VectorXcd drive(m.rows());
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    drive(j) = 0.5 * params.rabi * std::exp(kI * params.drive_direction.dot(positions[static_cast<std::size_t>(j)]));
  }
  const Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
  if (!lu.isInvertible()) throw std::runtime_error("coupled_dipole_solve: singular system (dark collective mode)");
  return lu.solve(drive);
}

Observables fixed_position_observables(const ModelParams& params, const std::vector<Vec3>& displacements,
                                       FixedMethod method) {
  if (params.geometry != Geometry::waveguide_1d) {
    throw std::invalid_argument("fixed_position_observables: T and R are defined for the waveguide geometry only");
  }
  if (displacements.size() != params.n_atoms()) {
    throw std::invalid_argument("fixed_position_observables: one displacement per atom required");
  }
  std::vector<Vec3> pos(params.n_atoms());
  for (std::size_t j = 0; j < pos.size(); ++j) pos[j] = params.trap_centers[j] + displacements[j];

  if (method == FixedMethod::master_equation) {
    ModelParams pinned = params;
    pinned.axes.clear();
    pinned.trap_centers = pos;
    const LindbladModel model = assemble_model(pinned);
    SolverConfig cfg;
    cfg.formulation = DirectFormulation::trace_row;
    const SteadyStateResult ss = steady_state_direct(model, cfg);
    return ObservableSet(model).measure(ss.rho);
  }

  if (params.rabi == 0.0) throw std::invalid_argument("fixed_position_observables: Omega = 0");
  const Eigen::VectorXcd beta = coupled_dipole_solve(params, pos);
  const double s = params.drive_direction.x();
  cplx fwd = 0.0, back = 0.0;
  for (std::size_t j = 0; j < pos.size(); ++j) {
    fwd += beta(static_cast<Eigen::Index>(j)) * std::exp(-kI * s * pos[j].x());
    back += beta(static_cast<Eigen::Index>(j)) * std::exp(kI * s * pos[j].x());
  }
  const cplx t = 1.0 - kI * fwd / params.rabi;
  const cplx r = -kI * back / params.rabi;
  return {std::norm(t), std::norm(r)};
}

AverageResult average_observables(const ModelParams& params, const PositionDistribution& dist,
                                  const AverageOptions& options) {
  if (options.order < 1) throw std::invalid_argument("average_observables: order must be >= 1");
  AverageScheme scheme = options.scheme;
  const bool two_wg = params.geometry == Geometry::waveguide_1d && params.n_atoms() == 2;
  if (scheme == AverageScheme::automatic) scheme = two_wg ? AverageScheme::relative : AverageScheme::product;
  if (scheme == AverageScheme::relative && !two_wg) {
    throw std::invalid_argument("average_observables: relative-coordinate scheme needs two waveguide atoms");
  }

  AverageResult out;
  out.scheme = scheme;
  if (scheme == AverageScheme::monte_carlo) {
    if (options.mc_samples < 2) throw std::invalid_argument("average_observables: need at least 2 samples");
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    const int n_axes = params.geometry == Geometry::waveguide_1d ? 1 : 3;
    std::vector<SamplePoint> pts;
    const double w = 1.0 / static_cast<double>(options.mc_samples);
    for (std::size_t i = 0; i < options.mc_samples; ++i) {
      std::vector<Vec3> d(params.n_atoms(), Vec3::Zero());
      for (std::size_t j = 0; j < d.size(); ++j) {
        const Vec3 s = dist.effective_sigma(j);
        for (int a = 0; a < n_axes; ++a) d[j](a) = s(a) * normal(rng);
      }
      pts.push_back({std::move(d), w});
    }
    const auto [t, r] = evaluate_points(params, pts, options.method);
    const double mt = weighted_sum(pts, t);
    const double mr = weighted_sum(pts, r);
    std::vector<double> dt(t.size()), dr(r.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      dt[i] = (t[i] - mt) * (t[i] - mt);
      dr[i] = (r[i] - mr) * (r[i] - mr);
    }
    const double vt = pairwise_sum(dt);
    const double vr = pairwise_sum(dr);
    const double n = static_cast<double>(options.mc_samples);
    out.T = mt;
    out.R = mr;
    out.T_error = std::sqrt(vt / (n - 1.0) / n);
    out.R_error = std::sqrt(vr / (n - 1.0) / n);
    out.evaluations = options.mc_samples;
    out.converged = out.T_error <= options.tolerance && out.R_error <= options.tolerance;
    return out;
  }

  // Double the order until successive estimates agree or the grid gets too big.
  const auto points = [&](int order) {
    const QuadratureRule rule = gauss_hermite(order);
    return scheme == AverageScheme::relative ? relative_points(params, dist, rule) : product_points(params, dist, rule);
  };
  int order = options.order;
  auto pl = points(order);
  auto a = evaluate(params, pl, options.method);
  out.evaluations = pl.size();
  while (true) {
    const auto ph = points(2 * order);
    const auto b = evaluate(params, ph, options.method);
    out.evaluations += ph.size();
    out.T = b.first;
    out.R = b.second;
    out.T_error = std::abs(b.first - a.first);
    out.R_error = std::abs(b.second - a.second);
    out.converged = out.T_error <= options.tolerance && out.R_error <= options.tolerance;
    order *= 2;
    const double growth = static_cast<double>(ph.size()) / static_cast<double>(pl.size());
    if (out.converged || 2 * order > options.max_order || static_cast<double>(ph.size()) * growth > 2e6) break;
    pl = ph;
    a = b;
  }
  out.order = order;
  return out;
}

ValidityReport sudden_validity_check(const ModelParams& params, double threshold) {
  ValidityReport rep;
  rep.warnings = params.validate();
  for (const auto& a : params.axes) rep.trap_freq = std::max(rep.trap_freq, a.trap_freq);

  const Eigen::MatrixXcd m = coupling_matrix(params, params.trap_centers, 0.0);
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(m, false);
  for (Eigen::Index k = 0; k < m.rows(); ++k) rep.widths.push_back(2.0 * eig.eigenvalues()(k).imag());
  std::sort(rep.widths.begin(), rep.widths.end());
  rep.slowest_width = rep.widths.front();

  if (rep.trap_freq > 0.0) {
    rep.ratio = rep.slowest_width > 0.0 ? rep.trap_freq / rep.slowest_width : std::numeric_limits<double>::infinity();
  }
  if (rep.ratio >= threshold) {
    rep.valid = false;
    std::ostringstream os;
    os << "trap frequency is " << rep.ratio
       << " of the slowest collective decay rate: frozen-position averaging is unreliable";
    rep.warnings.push_back(os.str());
  }
  return rep;
}

}  // namespace arraylight
