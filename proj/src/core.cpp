#include "medgate/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace medgate {

BasisIndex BasisIndex::from_flat(int index) {
  if (index < 0 || index > 15) throw std::invalid_argument("basis index out of range [0, 15]");
  return BasisIndex{(index >> 3) & 1, (index >> 2) & 1, (index >> 1) & 1, index & 1};
}

double SystemParams::ratio() const {
  if (e_c == 0.0) throw std::invalid_argument("E_C must be nonzero to form R");
  return 2.0 * e_q / e_c - 1.0;
}

double SystemParams::j1_reduced() const {
  if (e_c == 0.0) throw std::invalid_argument("E_C must be nonzero to form J1'");
  return 2.0 * j1 / e_c;
}

double SystemParams::j2_reduced() const {
  if (e_c == 0.0) throw std::invalid_argument("E_C must be nonzero to form J2'");
  return 2.0 * j2 / e_c;
}

SystemParams SystemParams::from_reduced(double e_c, double ratio, double j1_reduced,
                                        double j2_reduced, double alpha, double delta) {
  if (e_c == 0.0) throw std::invalid_argument("E_C must be nonzero");
  SystemParams p;
  p.e_c = e_c;
  p.e_q = 0.5 * e_c * (ratio + 1.0);
  p.e_qp = p.e_q;
  p.j1 = 0.5 * e_c * j1_reduced;
  p.j2 = 0.5 * e_c * j2_reduced;
  p.alpha = alpha;
  p.delta = delta;
  return p;
}

namespace {

Op2 pauli(Axis axis) {
  Op2 m = Op2::Zero();
  switch (axis) {
    case Axis::x:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Axis::y:
      // basis order (|0⟩=down, |1⟩=up): σy|down⟩ = −i|up⟩
      m(0, 1) = kI;
      m(1, 0) = -kI;
      break;
    case Axis::z:
      m(0, 0) = -1.0;
      m(1, 1) = 1.0;
      break;
  }
  return m;
}

// Embed a single-factor 2×2 operator at factor position `factor` (0 = orbital).
Op16 embed(const Op2& op, int factor) {
  const int shift = 3 - factor;
  Op16 out = Op16::Zero();
  for (int row = 0; row < 16; ++row) {
    for (int col = 0; col < 16; ++col) {
      const int rest_mask = ~(1 << shift) & 0xF;
      if ((row & rest_mask) != (col & rest_mask)) continue;
      out(row, col) = op((row >> shift) & 1, (col >> shift) & 1);
    }
  }
  return out;
}

int factor_of(Site site) {
  switch (site) {
    case Site::Q:
      return 1;
    case Site::C:
      return 2;
    case Site::Qp:
      return 3;
  }
  return 1;
}

}  // namespace

Op16 pauli_on(Site site, Axis axis) { return embed(pauli(axis), factor_of(site)); }

Op16 orbital_projector(Orbital o) {
  Op2 p = Op2::Zero();
  p(static_cast<int>(o), static_cast<int>(o)) = 1.0;
  return embed(p, 0);
}

Op16 orbital_flip() { return embed(pauli(Axis::x), 0); }

Op16 orbital_lowering() {
  Op2 m = Op2::Zero();
  m(0, 1) = 1.0;
  return embed(m, 0);
}

Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, std::span<const int> dims,
                               std::span<const int> keep) {
  const int nfactors = static_cast<int>(dims.size());
  int total = 1;
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("factor dimension must be positive");
    total *= d;
  }
  if (rho.rows() != total || rho.cols() != total)
    throw std::invalid_argument("density matrix size does not match factor dimensions");

  std::vector<bool> kept(nfactors, false);
  for (int k : keep) {
    if (k < 0 || k >= nfactors) throw std::invalid_argument("subsystem label out of range");
    if (kept[k]) throw std::invalid_argument("subsystem listed twice");
    kept[k] = true;
  }

  // Strides of each factor in the flat index.
  std::vector<int> stride(nfactors, 1);
  for (int f = nfactors - 2; f >= 0; --f) stride[f] = stride[f + 1] * dims[f + 1];

  std::vector<int> kept_factors;
  std::vector<int> traced_factors;
  for (int f = 0; f < nfactors; ++f) (kept[f] ? kept_factors : traced_factors).push_back(f);

  int kept_dim = 1;
  for (int f : kept_factors) kept_dim *= dims[f];
  int traced_dim = total / kept_dim;

  // Map a (kept, traced) multi-index pair to a flat index.
  auto flat = [&](int kept_index, int traced_index) {
    int index = 0;
    for (auto it = kept_factors.rbegin(); it != kept_factors.rend(); ++it) {
      index += (kept_index % dims[*it]) * stride[*it];
      kept_index /= dims[*it];
    }
    for (auto it = traced_factors.rbegin(); it != traced_factors.rend(); ++it) {
      index += (traced_index % dims[*it]) * stride[*it];
      traced_index /= dims[*it];
    }
    return index;
  };

  Eigen::MatrixXcd reduced = Eigen::MatrixXcd::Zero(kept_dim, kept_dim);
  for (int a = 0; a < kept_dim; ++a)
    for (int b = 0; b < kept_dim; ++b)
      for (int t = 0; t < traced_dim; ++t) reduced(a, b) += rho(flat(a, t), flat(b, t));
  return reduced;
}

Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, std::initializer_list<Subsystem> keep) {
  static constexpr std::array<int, 4> dims{2, 2, 2, 2};
  std::vector<int> indices;
  for (Subsystem s : keep) indices.push_back(static_cast<int>(s));
  std::sort(indices.begin(), indices.end());
  return partial_trace(rho, dims, indices);
}

double purity(const Eigen::MatrixXcd& rho) {
  // tr(ρ²) = Σ_ij ρ_ij ρ_ji; for Hermitian ρ this is the squared Frobenius norm.
  return (rho.array() * rho.transpose().array()).sum().real();
}

Vec2 haar_qubit(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double cos_theta = 2.0 * unit(rng) - 1.0;
  const double phi = 2.0 * std::numbers::pi * unit(rng);
  const double up = std::sqrt(0.5 * (1.0 + cos_theta));
  const double down = std::sqrt(0.5 * (1.0 - cos_theta));
  Vec2 psi;
  psi(0) = down;
  psi(1) = up * std::exp(kI * phi);
  return psi;
}

QubitPair haar_product_pair(Rng& rng) {
  QubitPair pair;
  pair.first = haar_qubit(rng);
  pair.second = haar_qubit(rng);
  return pair;
}

double hermiticity_defect(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
  const auto n = u.rows();
  return (u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Eigen::MatrixXcd& rho) {
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(angle + std::numbers::pi, two_pi);
  if (wrapped <= 0.0) wrapped += two_pi;
  return wrapped - std::numbers::pi;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace medgate
