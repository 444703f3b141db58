#include "medgate/entangling_power.hpp"

#include <cmath>
#include <vector>

#include "medgate/parallel.hpp"

namespace medgate {

namespace {

constexpr int kShards = 64;
constexpr double kMaxLeakage = 1e-6;
constexpr double kStructureTol = 1e-8;

struct Moments {
  long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }

  void merge(const Moments& other) {
    if (other.count == 0) return;
    const long total = count + other.count;
    const double d = other.mean - mean;
    mean += d * other.count / total;
    m2 += other.m2 + d * d * static_cast<double>(count) * other.count / total;
    count = total;
  }
};

}  // namespace

double linear_entropy(const Eigen::VectorXcd& psi, int dim_a, int dim_b) {
  if (psi.size() != static_cast<Eigen::Index>(dim_a) * dim_b)
    throw std::invalid_argument("state size does not match the bipartition");
  // Row index = A, column index = B.
  Eigen::MatrixXcd m(dim_a, dim_b);
  for (int a = 0; a < dim_a; ++a)
    for (int b = 0; b < dim_b; ++b) m(a, b) = psi(a * dim_b + b);
  const Eigen::MatrixXcd rho_a = m * m.adjoint();
  return 1.0 - purity(rho_a);
}

double linear_entropy(const Vec4& psi) {
  Op2 m;
  m << psi(0), psi(1), psi(2), psi(3);
  const Op2 rho = m * m.adjoint();
  return 1.0 - (rho.array() * rho.transpose().array()).sum().real();
}

double block_structure_residual(const Op4& u) {
  double residual = 0.0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const bool corner = (r == c) && (r == 0 || r == 3);
      const bool centre = (r == 1 || r == 2) && (c == 1 || c == 2);
      if (!corner && !centre) residual = std::max(residual, std::abs(u(r, c)));
    }
  }
  return residual;
}

Op4 nearest_unitary(const Op4& u) {
  const Eigen::JacobiSVD<Op4> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

EntanglingPowerEstimate entangling_power_mc(const LogicalGate& gate, long samples,
                                            std::uint64_t seed, int threads) {
  if (samples < 2) throw std::invalid_argument("Monte Carlo needs at least two samples");
  if (gate.leakage > kMaxLeakage)
    throw std::invalid_argument("entangling power is ill-defined for a leaky gate");

  std::vector<Moments> shard_moments(kShards);
  parallel_for(kShards, threads, [&](std::size_t shard) {
    Rng rng(mix_seed(seed, shard));
    const long begin = samples * static_cast<long>(shard) / kShards;
    const long end = samples * static_cast<long>(shard + 1) / kShards;
    Moments m;
    for (long s = begin; s < end; ++s) {
      const QubitPair in = haar_product_pair(rng);
      Vec4 product;
      product << in.first(0) * in.second(0), in.first(0) * in.second(1),
          in.first(1) * in.second(0), in.first(1) * in.second(1);
      m.add(linear_entropy(Vec4(gate.matrix * product)));
    }
    shard_moments[shard] = m;
  });

  Moments total;
  for (const Moments& m : shard_moments) total.merge(m);
  EntanglingPowerEstimate est;
  est.value = total.mean;
  est.samples = total.count;
  est.stderr_ = std::sqrt(total.m2 / (total.count - 1) / total.count);
  return est;
}

double entangling_power_closed(const LogicalGate& gate) {
  const Op4& u = gate.matrix;
  if (block_structure_residual(u) > kStructureTol)
    throw std::invalid_argument("closed form needs a block-structured gate; use Monte Carlo");
  if (unitarity_defect(u) > kStructureTol)
    throw std::invalid_argument("closed form needs a unitary gate");

  const Complex corner = u(0, 0) * u(3, 3);
  const Complex psi = u(1, 1), chi_p = u(1, 2), chi = u(2, 1), psi_p = u(2, 2);
  auto sq = [](Complex z) { return std::norm(z); };
  const double value =
      8.0 - 2.0 * sq(psi) - sq(psi) * sq(psi) - 2.0 * sq(psi_p) - sq(psi_p) * sq(psi_p) -
      2.0 * sq(chi) - 2.0 * sq(chi_p) - sq(chi) * sq(chi) - sq(chi_p) * sq(chi_p) -
      2.0 * (corner * std::conj(chi * chi_p)).real() - 2.0 * (corner * std::conj(psi * psi_p)).real();
  return value / 18.0;
}

}  // namespace medgate
