#include "arraylight/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace arraylight {

namespace {

Eigen::Matrix2cd electronic(int row, int col) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(row, col) = 1.0;
  return m;
}

std::string pair_label(std::size_t j, std::size_t jp) {
  std::ostringstream os;
  os << "(" << j << ", " << jp << ")";
  return os.str();
}

// Pinned-limit matrix Gamma_jj' must be positive semidefinite.
void check_gamma_psd(const ModelParams& params, const PairKernel& kernel) {
  const auto n = static_cast<Eigen::Index>(params.n_atoms());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      g(j, k) = j == k ? kernel.self_gamma
                       : kernel.gamma(params.trap_centers[static_cast<std::size_t>(j)] -
                                      params.trap_centers[static_cast<std::size_t>(k)]);
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, kernel.self_gamma)) {
    throw std::invalid_argument("assemble_model: collective decay matrix is not positive semidefinite");
  }
}

// Waveguide omega uses |s|; refuse configurations where DVR nodes straddle s = 0.
void check_waveguide_ordering(const ModelParams& params, const std::vector<MotionalGrid>& grids) {
  for (std::size_t j = 0; j < params.n_atoms(); ++j) {
    for (std::size_t jp = 0; jp < params.n_atoms(); ++jp) {
      if (j == jp) continue;
      const double s0 = params.trap_centers[j].x() - params.trap_centers[jp].x();
      if (s0 == 0.0) {
        throw std::invalid_argument("assemble_model: coincident waveguide trap centers " + pair_label(j, jp));
      }
      for (const auto& a : grids[j].nodes()) {
        for (const auto& b : grids[jp].nodes()) {
          const double s = s0 + a.x() - b.x();
          if (s == 0.0 || std::signbit(s) != std::signbit(s0)) {
            throw std::invalid_argument("assemble_model: motional spread of atoms " + pair_label(j, jp) +
                                        " crosses zero separation; |s| ordering is undefined");
          }
        }
      }
    }
  }
}

}  // namespace

std::size_t ModelParams::n_vib() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.n_max + 1);
  return n;
}

std::vector<std::string> ModelParams::validate() const {
  if (trap_centers.empty()) throw std::invalid_argument("model: at least one atom is required");
  if (!std::isfinite(rabi) || rabi < 0.0) throw std::invalid_argument("model: rabi must be finite and >= 0");
  if (!std::isfinite(detuning)) throw std::invalid_argument("model: detuning must be finite");
  if (dvr_oversample < 0) throw std::invalid_argument("model: dvr_oversample must be >= 0");
  if (std::abs(drive_direction.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("model: drive direction must be a unit vector");
  }
  for (const auto& a : axes) {
    if (!(a.eta > 0.0)) throw std::invalid_argument("model: eta must be > 0 on every trap axis");
    if (!(a.trap_freq >= 0.0)) throw std::invalid_argument("model: trap frequency must be >= 0");
    if (a.n_max < 0) throw std::invalid_argument("model: n_max must be >= 0");
    if (std::abs(a.direction.norm() - 1.0) > 1e-12) {
      throw std::invalid_argument("model: trap axis direction must be a unit vector");
    }
  }
  if (geometry == Geometry::waveguide_1d) {
    if (std::abs(std::abs(drive_direction.x()) - 1.0) > 1e-12) {
      throw std::invalid_argument("model: waveguide drive must point along +x or -x");
    }
    for (const auto& a : axes) {
      if (std::abs(std::abs(a.direction.x()) - 1.0) > 1e-12) {
        throw std::invalid_argument("model: waveguide trap axes must lie along x");
      }
    }
  } else {
    if (std::abs(dipole.norm() - 1.0) > 1e-12) throw std::invalid_argument("model: dipole must satisfy |q| = 1");
    for (std::size_t j = 0; j < trap_centers.size(); ++j) {
      for (std::size_t k = j + 1; k < trap_centers.size(); ++k) {
        if ((trap_centers[j] - trap_centers[k]).norm() == 0.0) {
          throw std::invalid_argument("model: coincident trap centers " + pair_label(j, k));
        }
      }
    }
  }

  std::vector<std::string> warnings;
  for (const auto& a : axes) {
    if (a.eta > 0.3) warnings.push_back("eta > 0.3: outside the Lamb-Dicke regime");
  }
  if (rabi > 0.1) warnings.push_back("rabi > 0.1 Gamma: weak-drive assumption is questionable");
  return warnings;
}

ModelParams waveguide_params(const std::vector<double>& centers, double rabi, double detuning) {
  ModelParams p;
  p.geometry = Geometry::waveguide_1d;
  p.rabi = rabi;
  p.detuning = detuning;
  for (double x : centers) p.trap_centers.emplace_back(x, 0.0, 0.0);
  return p;
}

MotionalGrid motional_grid(const ModelParams& params) {
  if (params.axes.empty()) return MotionalGrid();
  std::vector<AxisSpec> specs;
  for (const auto& a : params.axes) {
    specs.push_back({a.direction, a.eta, a.n_max, a.n_max + params.dvr_oversample});
  }
  return MotionalGrid(std::move(specs));
}

SparseOperator build_h0(const CompositeBasis& basis, const ModelParams& params,
                        const std::vector<MotionalGrid>& grids) {
  if (grids.size() != basis.n_atoms()) throw std::invalid_argument("build_h0: one grid per atom required");
  std::vector<SparseOperator::Entry> entries;
  entries.reserve(basis.dim());
  for (std::size_t f = 0; f < basis.dim(); ++f) {
    double e = 0.0;
    for (std::size_t j = 0; j < basis.n_atoms(); ++j) {
      const auto q = grids[j].quanta(static_cast<std::size_t>(basis.vibrational(f, j)));
      for (std::size_t a = 0; a < q.size(); ++a) e += params.axes[a].trap_freq * (q[a] + 0.5);
      e -= params.detuning * basis.electronic(f, j);
    }
    entries.push_back({f, f, e});
  }
  return SparseOperator::from_entries(basis.dim(), entries);
}

SparseOperator build_hl(const CompositeBasis& basis, const ModelParams& params,
                        const std::vector<MotionalGrid>& grids) {
  if (grids.size() != basis.n_atoms()) throw std::invalid_argument("build_hl: one grid per atom required");
  const Vec3 k = params.drive_direction;
  SparseOperator h(basis.dim());
  for (std::size_t j = 0; j < basis.n_atoms(); ++j) {
    const cplx phase = std::exp(kI * k.dot(params.trap_centers[j]));
    const DenseMatrix e = grids[j].matrix_elements([&k](const Vec3& r) { return std::exp(kI * k.dot(r)); });
    const DenseMatrix up = local::product(electronic(1, 0), (0.5 * params.rabi * phase) * e);
    const SparseOperator term = lift_atom_operator(basis, j, up);
    h += term;
    h += term.adjoint();
  }
  return h;
}

std::vector<PairTable> build_pair_tables(const ModelParams& params, const std::vector<MotionalGrid>& grids,
                                         const PairKernel& kernel) {
  std::vector<PairTable> tables;
  for (std::size_t j = 0; j < params.n_atoms(); ++j) {
    for (std::size_t jp = 0; jp < params.n_atoms(); ++jp) {
      if (j == jp) continue;
      const Vec3 sep = params.trap_centers[j] - params.trap_centers[jp];
      PairTable t;
      t.j = j;
      t.jp = jp;
      try {
        t.omega = grids[j].pair_matrix_elements(grids[jp],
                                                [&](const Vec3& r) { return cplx(kernel.evaluate(sep + r).omega); });
      } catch (const std::domain_error& e) {
        throw std::invalid_argument("assemble_model: atoms " + pair_label(j, jp) + " touch: " + e.what());
      }
      t.gamma = grids[j].pair_matrix_elements(grids[jp], [&](const Vec3& r) { return cplx(kernel.gamma(sep + r)); });
      tables.push_back(std::move(t));
    }
  }
  return tables;
}

SparseOperator build_hdd(const CompositeBasis& basis, const std::vector<PairTable>& tables) {
  const std::size_t nv = basis.n_vib();
  const auto ld = static_cast<Eigen::Index>(basis.local_dim());
  SparseOperator h(basis.dim());
  for (const auto& t : tables) {
    // sigma_j^+ sigma_j'^- Omega_jj'
    DenseMatrix local_op = DenseMatrix::Zero(ld * ld, ld * ld);
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t vp = 0; vp < nv; ++vp) {
        for (std::size_t w = 0; w < nv; ++w) {
          for (std::size_t wp = 0; wp < nv; ++wp) {
            const auto row = static_cast<Eigen::Index>((nv + v) * basis.local_dim() + vp);
            const auto col = static_cast<Eigen::Index>(w * basis.local_dim() + nv + wp);
            local_op(row, col) = t.omega(static_cast<Eigen::Index>(v * nv + vp), static_cast<Eigen::Index>(w * nv + wp));
          }
        }
      }
    }
    h += lift_pair_operator(basis, t.j, t.jp, local_op);
  }
  return h;
}

Dissipator build_dissipator(const CompositeBasis& basis, const ModelParams& params,
                            const std::vector<MotionalGrid>& grids, const std::vector<PairTable>& tables,
                            const PairKernel& kernel) {
  const std::size_t nv = basis.n_vib();
  const auto ld = static_cast<Eigen::Index>(basis.local_dim());
  Dissipator out;
  out.decay = SparseOperator(basis.dim());

  for (std::size_t j = 0; j < basis.n_atoms(); ++j) {
    out.decay += kernel.self_gamma * lift_atom_operator(basis, j, local::excited(nv));
  }
  for (const auto& t : tables) {
    // sigma_j'^+ sigma_j^- Gamma_jj'
    DenseMatrix local_op = DenseMatrix::Zero(ld * ld, ld * ld);
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t vp = 0; vp < nv; ++vp) {
        for (std::size_t w = 0; w < nv; ++w) {
          for (std::size_t wp = 0; wp < nv; ++wp) {
            const auto row = static_cast<Eigen::Index>(v * basis.local_dim() + nv + vp);
            const auto col = static_cast<Eigen::Index>((nv + w) * basis.local_dim() + wp);
            local_op(row, col) = t.gamma(static_cast<Eigen::Index>(v * nv + vp), static_cast<Eigen::Index>(w * nv + wp));
          }
        }
      }
    }
    out.decay += lift_pair_operator(basis, t.j, t.jp, local_op);
  }

  // Jump terms: the j-side vibrational factor acts from the left, the j'-side
  // factor from the right.  The sandwich kernel is split into rank-one pieces.
  const auto nvi = static_cast<Eigen::Index>(nv);
  for (std::size_t j = 0; j < basis.n_atoms(); ++j) {
    for (std::size_t jp = 0; jp < basis.n_atoms(); ++jp) {
      const Vec3 sep = j == jp ? Vec3::Zero() : Vec3(params.trap_centers[j] - params.trap_centers[jp]);
      const DenseMatrix k = grids[j].sandwich_kernel(
          grids[jp], [&](const Vec3& r) { return cplx(j == jp && r.isZero(0.0) ? kernel.self_gamma : kernel.gamma(sep + r)); });
      const Eigen::JacobiSVD<DenseMatrix> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const auto& s = svd.singularValues();
      if (s.size() == 0 || s(0) == 0.0) continue;
      for (Eigen::Index r = 0; r < s.size(); ++r) {
        if (s(r) <= 1e-14 * s(0)) break;
        DenseMatrix a(nvi, nvi), b(nvi, nvi);
        for (Eigen::Index v = 0; v < nvi; ++v) {
          for (Eigen::Index w = 0; w < nvi; ++w) {
            a(v, w) = s(r) * svd.matrixU()(v * nvi + w, r);
            b(v, w) = std::conj(svd.matrixV()(v * nvi + w, r));
          }
        }
        out.jumps.push_back({j, jp, lift_atom_operator(basis, j, local::product(electronic(0, 1), a)),
                             lift_atom_operator(basis, jp, local::product(electronic(1, 0), b))});
      }
    }
  }
  return out;
}

LindbladModel::LindbladModel(CompositeBasis basis, ModelParams params, std::vector<MotionalGrid> grids,
                             SparseOperator h0, SparseOperator hl, SparseOperator hdd, Dissipator dissipator,
                             std::vector<PairTable> tables)
    : basis_(std::move(basis)),
      params_(std::move(params)),
      grids_(std::move(grids)),
      h0_(std::move(h0)),
      hl_(std::move(hl)),
      hdd_(std::move(hdd)),
      hamiltonian_(h0_ + hl_ + hdd_),
      dissipator_(std::move(dissipator)),
      tables_(std::move(tables)),
      effective_(hamiltonian_ - cplx(0.0, 0.5) * dissipator_.decay) {
  effective_adjoint_cols_ = ColMajorOperator(effective_.adjoint().matrix());
  effective_adjoint_cols_.makeCompressed();
  jump_right_cols_.reserve(dissipator_.jumps.size());
  for (const auto& t : dissipator_.jumps) {
    jump_right_cols_.emplace_back(t.right.matrix());
    jump_right_cols_.back().makeCompressed();
  }
}

PairKernel default_kernel(const ModelParams& params) {
  return params.geometry == Geometry::waveguide_1d ? waveguide_pair_kernel() : free_space_pair_kernel(params.dipole);
}

LindbladModel assemble_model(const ModelParams& params) { return assemble_model(params, default_kernel(params)); }

LindbladModel assemble_model(const ModelParams& params, const PairKernel& kernel) {
  params.validate();
  if (!kernel.evaluate || !kernel.gamma) throw std::invalid_argument("assemble_model: incomplete kernel");
  CompositeBasis basis(params.n_atoms(), params.n_vib());
  std::vector<MotionalGrid> grids(params.n_atoms(), motional_grid(params));
  if (params.geometry == Geometry::waveguide_1d) check_waveguide_ordering(params, grids);
  check_gamma_psd(params, kernel);

  SparseOperator h0 = build_h0(basis, params, grids);
  SparseOperator hl = build_hl(basis, params, grids);
  std::vector<PairTable> tables = build_pair_tables(params, grids, kernel);
  SparseOperator hdd = build_hdd(basis, tables);
  Dissipator diss = build_dissipator(basis, params, grids, tables, kernel);
  return LindbladModel(std::move(basis), params, std::move(grids), std::move(h0), std::move(hl), std::move(hdd),
                       std::move(diss), std::move(tables));
}

}  // namespace arraylight
