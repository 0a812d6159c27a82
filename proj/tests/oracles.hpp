#pragma once

// Independent dense-operator references built from Kronecker products. They
// share no code with the library's bit-manipulation kernels.

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline Mat pauli(int axis) {
  Mat m(2, 2);
  if (axis == 0) m << 0, 1, 1, 0;
  if (axis == 1) m << 0, cplx(0, -1), cplx(0, 1), 0;
  if (axis == 2) m << 1, 0, 0, -1;
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Single-site operator op placed on `site` (site 0 leftmost factor).
inline Mat embed(const Mat& op, int site, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = kron(out, k == site ? op : Mat::Identity(2, 2));
  return out;
}

inline Mat site_pauli(int site, int axis, int n) { return embed(pauli(axis), site, n); }

inline double expect(const Eigen::VectorXcd& psi, const Mat& op) {
  return psi.dot(op * psi).real();
}

// Dense connected correlation matrix, 3N x 3N.
inline Eigen::MatrixXd correlation(const Eigen::VectorXcd& psi, int n) {
  std::vector<Mat> ops;
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < 3; ++a) ops.push_back(site_pauli(i, a, n));
  Eigen::MatrixXd c(3 * n, 3 * n);
  for (int p = 0; p < 3 * n; ++p)
    for (int q = 0; q < 3 * n; ++q) {
      const Mat sym = 0.5 * (ops[p] * ops[q] + ops[q] * ops[p]);
      c(p, q) = expect(psi, sym) - expect(psi, ops[p]) * expect(psi, ops[q]);
    }
  return c;
}

// Dense XXZ Hamiltonian with s = sigma / 2.
inline Mat xxz(int n, double jp, double jz, const std::vector<double>& h, double gamma,
               bool periodic) {
  const Eigen::Index d = Eigen::Index{1} << n;
  Mat H = Mat::Zero(d, d);
  const int bonds = periodic ? n : n - 1;
  for (int b = 0; b < bonds; ++b) {
    const int j = (b + 1) % n;
    for (int a = 0; a < 2; ++a) H += 0.25 * jp * site_pauli(b, a, n) * site_pauli(j, a, n);
    H += 0.25 * jz * site_pauli(b, 2, n) * site_pauli(j, 2, n);
  }
  for (int i = 0; i < n; ++i) {
    H += 0.5 * h[static_cast<std::size_t>(i)] * site_pauli(i, 2, n);
    H += 0.5 * gamma * site_pauli(i, 0, n);
  }
  return H;
}

}  // namespace oracle
