#pragma once

// Independent reference implementations used only by the tests. Nothing here
// calls into the library's propagators or Hamiltonian builders.

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
inline const Complex I{0.0, 1.0};

// Pauli matrices in the textbook (up, down) ordering, then conjugated by σx
// to reach the (down, up) storage order.
inline Mat pauli_std(char axis) {
  Mat m = Mat::Zero(2, 2);
  if (axis == 'x') m << 0, 1, 1, 0;
  if (axis == 'y') m << 0, -I, I, 0;
  if (axis == 'z') m << 1, 0, 0, -1;
  return m;
}

inline Mat pauli(char axis) {
  const Mat flip = pauli_std('x');
  return flip * pauli_std(axis) * flip;
}

inline Mat id2() { return Mat::Identity(2, 2); }

inline Mat kron4(const Mat& a, const Mat& b, const Mat& c, const Mat& d) {
  const Mat ab = Eigen::kroneckerProduct(a, b).eval();
  const Mat abc = Eigen::kroneckerProduct(ab, c).eval();
  return Eigen::kroneckerProduct(abc, d).eval();
}

inline Mat kron3(const Mat& a, const Mat& b, const Mat& c) {
  const Mat ab = Eigen::kroneckerProduct(a, b).eval();
  return Eigen::kroneckerProduct(ab, c).eval();
}

struct Params {
  double e_q, e_c, e_qp, j1, j2, alpha, delta;
};

// Full 16×16 Hamiltonian from explicit tensor products.
inline Mat hamiltonian(const Params& p, double omega) {
  const Mat pe = (Mat(2, 2) << 0, 0, 0, 1).finished();
  const Mat x_orb = pauli('x');
  const Mat one = id2();
  auto spin = [&](const Mat& q, const Mat& c, const Mat& qp) { return kron4(one, q, c, qp); };
  Mat zeeman = p.e_q * spin(pauli('z'), one, one) + p.e_c * spin(one, pauli('z'), one) +
               p.e_qp * spin(one, one, pauli('z'));
  Mat exch = Mat::Zero(8, 8);
  for (char a : {'x', 'y', 'z'}) {
    exch += p.j1 * kron3(pauli(a), pauli(a), one);
    exch += p.j2 * kron3(one, pauli(a), pauli(a));
  }
  exch -= p.alpha * p.j1 * kron3(pauli('z'), pauli('z'), one);
  exch -= p.alpha * p.j2 * kron3(one, pauli('z'), pauli('z'));
  exch += p.delta * Mat::Identity(8, 8);
  return zeeman + 0.5 * omega * kron4(x_orb, one, one, one) +
         Eigen::kroneckerProduct(pe, exch).eval();
}

// Excited-state spin Hamiltonian (8×8), without the detuning.
inline Mat excited(const Params& p) {
  Params q = p;
  q.delta = 0.0;
  return hamiltonian(q, 0.0).bottomRightCorner(8, 8);
}

inline Mat expm(const Mat& h, double t) { return (Mat(-I * t * h)).exp(); }

// Classical RK4 with a fixed step for i dU/dt = H(t) U.
inline Mat rk4_propagator(const std::function<Mat(double)>& h, double t0, double t1, int steps) {
  const long n = h(t0).rows();
  Mat u = Mat::Identity(n, n);
  const double dt = (t1 - t0) / steps;
  auto f = [&](double t, const Mat& y) -> Mat { return -I * h(t) * y; };
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * dt;
    const Mat k1 = f(t, u);
    const Mat k2 = f(t + dt / 2, u + dt / 2 * k1);
    const Mat k3 = f(t + dt / 2, u + dt / 2 * k2);
    const Mat k4 = f(t + dt, u + dt * k3);
    u += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return u;
}

// Entangling power from the Makhlin invariant G1: e = (2/9)(1 − |G1|),
// G1 = tr²(m)/(16 det U) with m = U_B^T U_B in the magic basis.
inline double entangling_power_makhlin(const Eigen::Matrix4cd& u) {
  Eigen::Matrix4cd q;
  const double s = 1.0 / std::sqrt(2.0);
  q << 1, 0, 0, I, 0, I, 1, 0, 0, I, -1, 0, 1, 0, 0, -I;
  q *= s;
  const Eigen::Matrix4cd ub = q.adjoint() * u * q;
  const Eigen::Matrix4cd m = ub.transpose() * ub;
  const Complex tr = m.trace();
  const Complex g1 = tr * tr / (16.0 * u.determinant());
  return 2.0 / 9.0 * (1.0 - std::abs(g1));
}

// Resonant two-level Rabi driving with spontaneous decay at rate gamma,
// starting in the ground state (Torrey solution):
//   ρee(t) = Ω²/(2Ω² + Γ²)·[1 − e^{−3Γt/4}(cos λt + (3Γ/4λ) sin λt)],
//   λ = √(Ω² − Γ²/16), valid for Ω > Γ/4.
inline double torrey_excited_population(double omega, double gamma, double t) {
  const double lambda = std::sqrt(omega * omega - gamma * gamma / 16.0);
  const double envelope = std::exp(-0.75 * gamma * t);
  return omega * omega / (2 * omega * omega + gamma * gamma) *
         (1.0 - envelope * (std::cos(lambda * t) + 0.75 * gamma / lambda * std::sin(lambda * t)));
}

inline Mat random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat z(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) z(r, c) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  const Mat rdiag = qr.matrixQR().diagonal();
  for (int c = 0; c < n; ++c) q.col(c) *= std::polar(1.0, std::arg(rdiag(c)));
  return q;
}

inline Mat random_density(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = Complex(g(rng), g(rng));
  Mat rho = a * a.adjoint();
  return rho / rho.trace().real();
}

}  // namespace oracle
