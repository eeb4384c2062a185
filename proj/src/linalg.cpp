#include "clusterfeed/linalg.hpp"

#include <algorithm>

#include "clusterfeed/errors.hpp"

namespace clusterfeed {

CMat hermitian_part(const CMat& m) { return 0.5 * (m + m.adjoint()); }

double min_hermitian_eigenvalue(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

CMat whitening_basis(const CMat& b, double rel_floor, Eigen::Index* deflated) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(b));
  const RVec& lam = es.eigenvalues();
  const Eigen::Index n = lam.size();
  const double top = n > 0 ? lam(n - 1) : 0.0;
  if (!(top > 0.0)) {
    if (deflated) *deflated = n;
    return CMat(b.rows(), 0);
  }
  Eigen::Index keep = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lam(i) > rel_floor * top) ++keep;
  }
  CMat t(b.rows(), keep);
  for (Eigen::Index j = 0; j < keep; ++j) {
    const Eigen::Index src = n - keep + j;
    t.col(j) = es.eigenvectors().col(src) / std::sqrt(lam(src));
  }
  if (deflated) *deflated = n - keep;
  return t;
}

PencilEigen hermitian_pencil(const CMat& a, const CMat& b, double rel_floor) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DomainError("hermitian_pencil: dimension mismatch");
  }
  PencilEigen out;
  const CMat t = whitening_basis(b, rel_floor, &out.deflated);
  if (t.cols() == 0) {
    out.values.resize(0);
    out.vectors.resize(a.rows(), 0);
    return out;
  }
  const CMat reduced = hermitian_part(t.adjoint() * a * t);
  Eigen::SelfAdjointEigenSolver<CMat> es(reduced);
  out.values = es.eigenvalues();
  out.vectors = t * es.eigenvectors();
  return out;
}

RMat realify(const CMat& m) {
  const CMat h = hermitian_part(m);
  const Eigen::Index n = h.rows();
  RMat r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = h.real();
  r.topRightCorner(n, n) = -h.imag();
  r.bottomLeftCorner(n, n) = h.imag();
  r.bottomRightCorner(n, n) = h.real();
  return 0.5 * (r + r.transpose());
}

RVec realify(const CVec& v) {
  RVec x(2 * v.size());
  x.head(v.size()) = v.real();
  x.tail(v.size()) = v.imag();
  return x;
}

CVec complexify(const RVec& x) {
  const Eigen::Index n = x.size() / 2;
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(x(i), x(n + i));
  return v;
}

}  // namespace clusterfeed
