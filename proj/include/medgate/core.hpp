#pragma once

// Hilbert-space bookkeeping for the mediated three-spin system.
//
// The full space is orbital ⊗ Q ⊗ C ⊗ Q' with the orbital (|g⟩, |e⟩) as the
// most significant factor:
//
//     flat = 8·orbital + 4·spinQ + 2·spinC + spinQ'
//
// Spin label 1 is "up" (σz = +1) and 0 is "down" (σz = −1). Energies and
// rates are angular frequencies in ps⁻¹ with ħ = 1.

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace medgate {

using Complex = std::complex<double>;
inline constexpr Complex kI{0.0, 1.0};

using Op16 = Eigen::Matrix<Complex, 16, 16>;
using Op8 = Eigen::Matrix<Complex, 8, 8>;
using Op4 = Eigen::Matrix<Complex, 4, 4>;
using Op3 = Eigen::Matrix<Complex, 3, 3>;
using Op2 = Eigen::Matrix<Complex, 2, 2>;
using Vec16 = Eigen::Matrix<Complex, 16, 1>;
using Vec8 = Eigen::Matrix<Complex, 8, 1>;
using Vec4 = Eigen::Matrix<Complex, 4, 1>;
using Vec3 = Eigen::Matrix<Complex, 3, 1>;
using Vec2 = Eigen::Matrix<Complex, 2, 1>;

using DensityMatrix = Op16;

/// Seedable generator; always passed explicitly.
using Rng = std::mt19937_64;

enum class Orbital : int { g = 0, e = 1 };
enum class Site { Q, C, Qp };
enum class Axis { x, y, z };

/// Tensor factors of the 16-dimensional space, in storage order.
enum class Subsystem : int { orbital = 0, Q = 1, C = 2, Qp = 3 };

struct BasisIndex {
  int orbital = 0;
  int spin_q = 0;
  int spin_c = 0;
  int spin_qp = 0;

  [[nodiscard]] int flat() const { return 8 * orbital + 4 * spin_q + 2 * spin_c + spin_qp; }
  static BasisIndex from_flat(int index);

  friend bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

/// Index of |QCQ'⟩ inside the 8-dimensional spin space.
constexpr int spin_index(int q, int c, int qp) { return 4 * q + 2 * c + qp; }

/// Flat indices of the logical states |00⟩,|01⟩,|10⟩,|11⟩ (|QQ'⟩) with the
/// control in |0⟩ and the orbital in |g⟩.
inline constexpr std::array<int, 4> kLogicalIndices{0, 1, 4, 5};

/// Static model parameters. E_Q, E_C, E_Q', J1, J2 and delta in ps⁻¹.
struct SystemParams {
  double e_q = 0.1;
  double e_c = 0.1;
  double e_qp = 0.1;
  double j1 = 0.05;
  double j2 = 0.05;
  double alpha = 1.0;
  double delta = 0.0;

  /// R = 2·E_Q/E_C − 1.
  [[nodiscard]] double ratio() const;
  /// J1' = 2·J1/E_C.
  [[nodiscard]] double j1_reduced() const;
  /// J2' = 2·J2/E_C.
  [[nodiscard]] double j2_reduced() const;

  /// Build parameters from the reduced quantities with E_Q = E_Q'.
  static SystemParams from_reduced(double e_c, double ratio, double j1_reduced, double j2_reduced,
                                   double alpha = 1.0, double delta = 0.0);
};

/// 4×4 gate on |QQ'⟩ plus the population lost from the logical sector.
struct LogicalGate {
  Op4 matrix = Op4::Identity();
  double leakage = 0.0;
};

/// σ_axis on one spin, identity on the other spins and on the orbital.
Op16 pauli_on(Site site, Axis axis);

/// |o⟩⟨o| on the orbital factor.
Op16 orbital_projector(Orbital o);

/// |e⟩⟨g| + |g⟩⟨e| on the orbital factor.
Op16 orbital_flip();

/// |g⟩⟨e| on the orbital factor (the optical lowering operator).
Op16 orbital_lowering();

/// Reduced density matrix over the factors listed in `keep` (in ascending
/// factor order). `dims` gives the factor dimensions, most significant first.
/// Throws std::invalid_argument on out-of-range or repeated factor indices.
Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, std::span<const int> dims,
                               std::span<const int> keep);

/// Convenience overload for the 16-dimensional system.
Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, std::initializer_list<Subsystem> keep);

/// tr(ρ²).
double purity(const Eigen::MatrixXcd& rho);

struct QubitPair {
  Vec2 first;
  Vec2 second;
};

/// Haar-random single-qubit state (uniform on the Bloch sphere).
Vec2 haar_qubit(Rng& rng);

/// Two independent Haar-random qubit states.
QubitPair haar_product_pair(Rng& rng);

// Numerical hygiene helpers.
double hermiticity_defect(const Eigen::MatrixXcd& m);
double unitarity_defect(const Eigen::MatrixXcd& u);
/// Smallest eigenvalue of the Hermitian part of ρ.
double min_eigenvalue(const Eigen::MatrixXcd& rho);

/// Exact exp(−i·H·t) for Hermitian H via eigendecomposition.
template <int N>
Eigen::Matrix<Complex, N, N> expm_hermitian(const Eigen::Matrix<Complex, N, N>& h, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Complex, N, N>> solver(h);
  const auto& vecs = solver.eigenvectors();
  Eigen::Matrix<Complex, N, 1> phases;
  for (int k = 0; k < h.rows(); ++k) phases(k) = std::exp(-kI * solver.eigenvalues()(k) * t);
  return vecs * phases.asDiagonal() * vecs.adjoint();
}

/// Reduce an angle to (−π, π].
double wrap_angle(double angle);

/// Deterministic 64-bit seed mixing (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace medgate
