#include "arraylight/liouvillian.hpp"

#include <stdexcept>
#include <vector>

namespace arraylight {

namespace {
void check_dims(const LindbladModel& model, const DenseMatrix& rho) {
  const auto d = static_cast<Eigen::Index>(model.dim());
  if (rho.rows() != d || rho.cols() != d) {
    throw std::invalid_argument("liouvillian_apply: density matrix does not match the model dimension");
  }
}
}  // namespace

DenseMatrix liouvillian_apply(const LindbladModel& model, const DenseMatrix& rho) {
  check_dims(model, rho);
  const Eigen::Index d = rho.rows();
  const auto& h = model.effective().matrix();
  const auto& hd = model.effective_adjoint_cols();
  const auto& jumps = model.jumps();
  const auto& rights = model.jump_right_cols();
  const cplx minus_i(0.0, -1.0);
  const cplx plus_i(0.0, 1.0);

  DenseMatrix out(d, d);
  DenseMatrix tmp(d, d);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (Eigen::Index c = 0; c < d; ++c) {
      out.col(c).noalias() = minus_i * (h * rho.col(c));
      for (LindbladModel::ColMajorOperator::InnerIterator it(hd, c); it; ++it) {
        out.col(c) += (plus_i * it.value()) * rho.col(it.row());
      }
    }
    for (std::size_t t = 0; t < jumps.size(); ++t) {
      const auto& left = jumps[t].left.matrix();
#pragma omp for schedule(static)
      for (Eigen::Index c = 0; c < d; ++c) tmp.col(c).noalias() = left * rho.col(c);
#pragma omp for schedule(static)
      for (Eigen::Index c = 0; c < d; ++c) {
        for (LindbladModel::ColMajorOperator::InnerIterator it(rights[t], c); it; ++it) {
          out.col(c) += it.value() * tmp.col(it.row());
        }
      }
    }
  }
  return out;
}

namespace reference {

DenseMatrix liouvillian_apply(const LindbladModel& model, const DenseMatrix& rho) {
  check_dims(model, rho);
  const auto& h = model.effective().matrix();
  const SparseOperator::Storage hd = model.effective().adjoint().matrix();
  DenseMatrix out = cplx(0.0, -1.0) * (h * rho) + cplx(0.0, 1.0) * (rho * hd);
  for (const auto& t : model.jumps()) {
    const DenseMatrix lr = t.left.matrix() * rho;
    out += lr * t.right.matrix();
  }
  return out;
}

}  // namespace reference

SuperOperator liouvillian_superoperator(const LindbladModel& model) {
  const std::size_t d = model.dim();
  const auto& h = model.effective();
  std::vector<Eigen::Triplet<cplx, std::ptrdiff_t>> trips;

  const auto h_entries = h.entries();
  trips.reserve(2 * d * h_entries.size());
  for (const auto& e : h_entries) {
    for (std::size_t c = 0; c < d; ++c) {
      // -i H rho
      trips.emplace_back(vec_index(d, e.row, c), vec_index(d, e.col, c), cplx(0.0, -1.0) * e.value);
      // +i rho H^dag : (rho H^dag)(c, e.row) picks up conj(H(e.row, e.col)) rho(c, e.col)
      trips.emplace_back(vec_index(d, c, e.row), vec_index(d, c, e.col), cplx(0.0, 1.0) * std::conj(e.value));
    }
  }
  for (const auto& t : model.jumps()) {
    const auto le = t.left.entries();
    const auto re = t.right.entries();
    for (const auto& l : le) {
      for (const auto& r : re) {
        // (L rho R)(l.row, r.col) += L(l.row, l.col) rho(l.col, r.row) R(r.row, r.col)
        trips.emplace_back(vec_index(d, l.row, r.col), vec_index(d, l.col, r.row), l.value * r.value);
      }
    }
  }
  const auto n = static_cast<std::ptrdiff_t>(d * d);
  SuperOperator s(n, n);
  s.setFromTriplets(trips.begin(), trips.end());
  s.prune(cplx(0.0, 0.0));
  s.makeCompressed();
  return s;
}

}  // namespace arraylight
