#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "svoter/errors.hpp"
#include "svoter/limitwalk.hpp"
#include "svoter/stats.hpp"

namespace svoter::limitwalk {

namespace {

void check_dense(std::size_t n) {
  if (n == 0) throw std::invalid_argument("matrix oracle: empty range");
  if (n > kDenseCap) throw SizingError("matrix oracle: dimension exceeds the dense cap of 2048");
}

struct Spectral {
  Eigen::VectorXd eigenvalues;  // of the symmetrized generator, ascending
  Eigen::MatrixXd vectors;
  Eigen::VectorXd sqrt_mu;
};

Spectral symmetrized_spectrum(std::span<const double> xi) {
  const auto n = static_cast<Eigen::Index>(xi.size());
  check_dense(xi.size());
  // D^{1/2} G D^{-1/2} with D = diag(mu), mu proportional to xi:
  // off-diagonal 1/(n sqrt(xi_x xi_y)), diagonal -(n-1)/(n xi_x).
  const double nd = static_cast<double>(n);
  Eigen::VectorXd inv_sqrt(n);
  for (Eigen::Index x = 0; x < n; ++x) inv_sqrt(x) = 1.0 / std::sqrt(xi[x]);
  Eigen::MatrixXd s = inv_sqrt * inv_sqrt.transpose() / nd;
  for (Eigen::Index x = 0; x < n; ++x) s(x, x) = -(nd - 1.0) / (nd * xi[x]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) throw SolverError("symmetrized generator: eigensolver failed");
  Spectral sp;
  sp.eigenvalues = solver.eigenvalues();
  sp.vectors = solver.eigenvectors();
  const auto mu = stationary_distribution(xi);
  sp.sqrt_mu.resize(n);
  for (Eigen::Index x = 0; x < n; ++x) sp.sqrt_mu(x) = std::sqrt(mu[x]);
  return sp;
}

}  // namespace

Eigen::MatrixXd generator_matrix(std::span<const double> xi) {
  check_dense(xi.size());
  const auto n = static_cast<Eigen::Index>(xi.size());
  const double nd = static_cast<double>(n);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    const double off = 1.0 / (nd * xi[x]);
    g.row(x).setConstant(off);
    g(x, x) = -(nd - 1.0) / (nd * xi[x]);
  }
  return g;
}

Eigen::MatrixXd generator_matrix(const env::LimitEnvironment& xi, std::size_t n) {
  return generator_matrix(xi.head(n));
}

Eigen::MatrixXd semigroup_matrix(std::span<const double> xi, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("semigroup_matrix: t must be >= 0");
  const Eigen::MatrixXd g = generator_matrix(xi);
  const auto n = g.rows();
  if (t == 0.0 || n == 1) return Eigen::MatrixXd::Identity(n, n);
  const double q = (-g.diagonal()).maxCoeff();
  // Split t into 2^j steps with q h <= 1, uniformize one step, then square.
  int j = 0;
  double h = t;
  while (q * h > 1.0) {
    h *= 0.5;
    ++j;
  }
  const Eigen::MatrixXd kernel = Eigen::MatrixXd::Identity(n, n) + g / q;
  const double qh = q * h;
  double weight = std::exp(-qh);
  double mass = weight;
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd p = weight * power;
  for (int k = 1; 1.0 - mass > 1e-17 && k < 200; ++k) {
    power = power * kernel;
    weight *= qh / k;
    mass += weight;
    p += weight * power;
  }
  // The Poisson tail beyond the truncation (< 1e-16) is restored as mass
  // so that rows stay stochastic through the squarings.
  p /= mass;
  for (int s = 0; s < j; ++s) {
    p = p * p;
    // Squaring compounds rounding in the row sums; project back onto
    // stochastic rows.
    p.array().colwise() /= p.rowwise().sum().array();
  }
  return p;
}

Eigen::MatrixXd semigroup_matrix(const env::LimitEnvironment& xi, std::size_t n, double t) {
  return semigroup_matrix(xi.head(n), t);
}

Eigen::MatrixXd semigroup_matrix_spectral(std::span<const double> xi, double t) {
  const Spectral sp = symmetrized_spectrum(xi);
  const Eigen::VectorXd e = (sp.eigenvalues * t).array().exp();
  const Eigen::MatrixXd sym = sp.vectors * e.asDiagonal() * sp.vectors.transpose();
  // P_t = D^{-1/2} exp(tS) D^{1/2}.
  return sp.sqrt_mu.cwiseInverse().asDiagonal() * sym * sp.sqrt_mu.asDiagonal();
}

std::vector<double> entrance_law_exact(std::span<const double> xi, double t) {
  const Eigen::MatrixXd p = semigroup_matrix(xi, t);
  const Eigen::VectorXd r = p.colwise().mean();
  return {r.data(), r.data() + r.size()};
}

TvResult coupled_pair_tv(const env::LimitEnvironment& xi, std::size_t n, std::uint32_t x,
                         std::uint32_t y, double t) {
  if (x >= n || y >= n) throw std::invalid_argument("coupled_pair_tv: site outside [n]");
  const Eigen::MatrixXd p = semigroup_matrix(xi, n, t);
  TvResult r;
  r.exact_tv = 0.5 * (p.row(x) - p.row(y)).cwiseAbs().sum();
  r.bound = std::exp(-t / xi.xi[0]);
  return r;
}

double spectral_gap(std::span<const double> xi) {
  if (xi.size() < 2) throw std::invalid_argument("spectral_gap: need at least two sites");
  const Spectral sp = symmetrized_spectrum(xi);
  // Eigenvalues of S are <= 0 with the top one equal to 0.
  return -sp.eigenvalues(sp.eigenvalues.size() - 2);
}

double spectral_gap(const env::LimitEnvironment& xi, std::size_t n) { return spectral_gap(xi.head(n)); }

double meeting_probability_bound(std::span<const double> xi, std::uint32_t x, std::uint32_t y,
                                 const SiteSet& a, double T, double c) {
  if (x == y) throw std::invalid_argument("meeting_probability_bound: need x != y");
  if (!(c > 0.0)) throw std::invalid_argument("meeting_probability_bound: c must be > 0");
  if (x >= xi.size() || y >= xi.size()) throw std::invalid_argument("meeting_probability_bound: site outside range");
  double mass = 0.0, squares = 0.0;
  for (std::uint32_t z : a) {
    if (z >= xi.size()) throw std::invalid_argument("meeting_probability_bound: site outside range");
    mass += xi[z];
    squares += xi[z] * xi[z];
  }
  return c / (xi[x] * xi[y]) * (T * mass + squares);
}

double meeting_probability_lower_bound(std::span<const double> xi, double t, bool as_printed) {
  const auto mu = stationary_distribution(xi);
  const double decay = std::exp((as_printed ? 1.0 : -1.0) * t / xi[0]);
  // For a fixed cut h the best a is decay / mu(h); scan all cuts.
  double best = 0.0, squares = 0.0;
  for (std::size_t h = 0; h < mu.size(); ++h) {
    squares += mu[h] * mu[h];
    const double a = decay / mu[h];
    if (a < 1.0) best = std::max(best, (1.0 - a) * (1.0 - a) * squares);
  }
  return best;
}

double meeting_probability_exact(std::span<const double> xi, std::uint32_t x, std::uint32_t y, double t) {
  const Eigen::MatrixXd p = semigroup_matrix(xi, t);
  if (x >= p.rows() || y >= p.rows()) throw std::invalid_argument("meeting_probability_exact: site outside range");
  return p.row(x).dot(p.row(y));
}

double self_adjointness_check(const env::LimitEnvironment& xi, std::size_t n, double t,
                              std::span<const double> f, std::span<const double> g) {
  if (f.size() != n || g.size() != n) throw std::invalid_argument("self_adjointness_check: size mismatch");
  if (t == 0.0) return 0.0;
  const Eigen::MatrixXd p = semigroup_matrix(xi, n, t);
  const auto mu = stationary_distribution(xi, n);
  const Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(n));
  const Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(n));
  const Eigen::Map<const Eigen::VectorXd> m(mu.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd pf = p * fv;
  const Eigen::VectorXd pg = p * gv;
  return std::fabs(pf.cwiseProduct(gv).dot(m) - fv.cwiseProduct(pg).dot(m));
}

double time_outside_expectation(std::span<const double> xi, std::size_t n, std::size_t m,
                                std::uint32_t start, double t) {
  if (start >= n) throw std::invalid_argument("time_outside_expectation: start outside [n]");
  // The trace on [n] is the walk on [n]; rings at z leave [n] with
  // probability (m - n)/m. Integrate exp(sG) over [0, t] in the spectral basis.
  const auto head = xi.first(n);
  const Spectral sp = symmetrized_spectrum(head);
  Eigen::VectorXd integral(sp.eigenvalues.size());
  for (Eigen::Index k = 0; k < integral.size(); ++k) {
    const double lam = sp.eigenvalues(k);
    integral(k) = std::fabs(lam * t) < 1e-12 ? t : std::expm1(lam * t) / lam;
  }
  const Eigen::MatrixXd occ = sp.sqrt_mu.cwiseInverse().asDiagonal() *
                              (sp.vectors * integral.asDiagonal() * sp.vectors.transpose()) *
                              sp.sqrt_mu.asDiagonal();
  const double leave = static_cast<double>(m - n) / static_cast<double>(m);
  double visits = 0.0;
  for (std::size_t z = 0; z < n; ++z) visits += occ(start, static_cast<Eigen::Index>(z)) * leave / xi[z];
  return visits * excursion_mean_formula(xi, n, m);
}

double calibrate_entrance_tail_constant(std::span<const double> xi, double alpha,
                                        std::span<const double> t_grid,
                                        std::span<const std::size_t> n_grid) {
  double c = 0.0;
  for (double t : t_grid) {
    const auto r = entrance_law_exact(xi, t);
    for (std::size_t n : n_grid) {
      if (n >= r.size()) throw std::invalid_argument("calibration: n must be below the truncation");
      double tail = 0.0;
      for (std::size_t y = n; y < r.size(); ++y) tail += r[y];
      c = std::max(c, tail / (t * std::pow(static_cast<double>(n), 1.0 - 1.0 / alpha)));
    }
  }
  return c;
}

}  // namespace svoter::limitwalk
