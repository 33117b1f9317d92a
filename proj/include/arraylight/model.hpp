#pragma once

#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "arraylight/basis.hpp"
#include "arraylight/dvr.hpp"
#include "arraylight/kernels.hpp"
#include "arraylight/sparse_operator.hpp"
#include "arraylight/types.hpp"

namespace arraylight {

enum class Geometry { waveguide_1d, free_space_3d };

/// One harmonic trap direction, shared by all atoms.
struct TrapAxis {
  Vec3 direction = Vec3::UnitX();
  double trap_freq = 0.0;  ///< omega_t / Gamma
  double eta = 0.0;        ///< k0 sqrt(hbar / (2 M omega_t))
  int n_max = 0;
};

/// Physical parameters in internal units (Gamma = k0 = hbar = 1).
struct ModelParams {
  Geometry geometry = Geometry::waveguide_1d;
  double rabi = 1e-4;      ///< Omega / Gamma
  double detuning = 0.0;   ///< Delta / Gamma
  std::vector<Vec3> trap_centers;               ///< k0 R_j (waveguide: x component only)
  Vec3 drive_direction = Vec3::UnitX();         ///< unit vector along k0 (waveguide: +-x)
  CVec3 dipole = CVec3(0.0, 0.0, 1.0);          ///< q, free space only
  std::vector<TrapAxis> axes;                   ///< empty: pinned atoms
  /// DVR cutoff above n_max used for position-dependent matrix elements.
  /// 0 gives exactly unitary phase operators on the truncated space.
  int dvr_oversample = 16;

  std::size_t n_atoms() const { return trap_centers.size(); }
  std::size_t n_vib() const;

  /// Throws std::invalid_argument for unusable parameters; returns warnings
  /// (eta > 0.3, Omega > 0.1 Gamma).
  std::vector<std::string> validate() const;
};

/// Waveguide parameters with atoms at k0 X_j = centers[j].
ModelParams waveguide_params(const std::vector<double>& centers, double rabi, double detuning);

/// The per-atom DVR grid implied by the trap axes.
MotionalGrid motional_grid(const ModelParams& params);

/// sigma_j^- A rho B sigma_j'^+  with A on atom j and B on atom j'.
struct JumpTerm {
  std::size_t emitter = 0;  // j
  std::size_t partner = 0;  // j'
  SparseOperator left;      // sigma_j^- A
  SparseOperator right;     // B sigma_j'^+
};

/// Vibrational two-atom operators for an ordered pair (j, j'), indexed
/// v * n_vib + v' with v on atom j.
struct PairTable {
  std::size_t j = 0;
  std::size_t jp = 0;
  DenseMatrix omega;
  DenseMatrix gamma;
};

SparseOperator build_h0(const CompositeBasis& basis, const ModelParams& params,
                        const std::vector<MotionalGrid>& grids);
SparseOperator build_hl(const CompositeBasis& basis, const ModelParams& params,
                        const std::vector<MotionalGrid>& grids);
std::vector<PairTable> build_pair_tables(const ModelParams& params, const std::vector<MotionalGrid>& grids,
                                         const PairKernel& kernel);
SparseOperator build_hdd(const CompositeBasis& basis, const std::vector<PairTable>& tables);

/// Dissipator of the master equation:
///   L(rho) = sum_t left_t rho right_t - (1/2){decay, rho}
/// with decay = sum_{j j'} sigma_j'^+ sigma_j^- Gamma_jj'.
struct Dissipator {
  SparseOperator decay;
  std::vector<JumpTerm> jumps;
};
Dissipator build_dissipator(const CompositeBasis& basis, const ModelParams& params,
                            const std::vector<MotionalGrid>& grids, const std::vector<PairTable>& tables,
                            const PairKernel& kernel);

/// Assembled master equation.  Immutable; safe to share across threads.
class LindbladModel {
 public:
  using ColMajorOperator = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;

  LindbladModel(CompositeBasis basis, ModelParams params, std::vector<MotionalGrid> grids,
                SparseOperator h0, SparseOperator hl, SparseOperator hdd, Dissipator dissipator,
                std::vector<PairTable> tables);

  const CompositeBasis& basis() const { return basis_; }
  const ModelParams& params() const { return params_; }
  const std::vector<MotionalGrid>& grids() const { return grids_; }
  std::size_t dim() const { return basis_.dim(); }

  const SparseOperator& h0() const { return h0_; }
  const SparseOperator& hl() const { return hl_; }
  const SparseOperator& hdd() const { return hdd_; }
  const SparseOperator& hamiltonian() const { return hamiltonian_; }
  const SparseOperator& decay() const { return dissipator_.decay; }
  const std::vector<JumpTerm>& jumps() const { return dissipator_.jumps; }
  const std::vector<PairTable>& pair_tables() const { return tables_; }
  /// H - (i/2) decay
  const SparseOperator& effective() const { return effective_; }

  // Column-major copies for right multiplication.
  const ColMajorOperator& effective_adjoint_cols() const { return effective_adjoint_cols_; }
  const std::vector<ColMajorOperator>& jump_right_cols() const { return jump_right_cols_; }

 private:
  CompositeBasis basis_;
  ModelParams params_;
  std::vector<MotionalGrid> grids_;
  SparseOperator h0_, hl_, hdd_, hamiltonian_;
  Dissipator dissipator_;
  std::vector<PairTable> tables_;
  SparseOperator effective_;
  ColMajorOperator effective_adjoint_cols_;
  std::vector<ColMajorOperator> jump_right_cols_;
};

LindbladModel assemble_model(const ModelParams& params);
/// Same plumbing with an injected kernel (used to swap 1D/3D or mock physics).
LindbladModel assemble_model(const ModelParams& params, const PairKernel& kernel);

/// Kernel matching params.geometry.
PairKernel default_kernel(const ModelParams& params);

}  // namespace arraylight
