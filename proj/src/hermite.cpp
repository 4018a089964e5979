#include "lowrank/hermite.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "lowrank/errors.hpp"

namespace lowrank {

double oscillator_eval(int ell, double z) {
  if (ell < 0) throw std::invalid_argument("oscillator_eval: ell must be >= 0");
  if (ell == 0) return 1.0;
  double prev = 1.0;   // phi_0
  double cur = z;      // phi_1
  for (int k = 1; k < ell; ++k) {
    const double next =
        (z * cur - std::sqrt(static_cast<double>(k)) * prev) /
        std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

double linearization_coeff(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0)
    throw std::invalid_argument("linearization_coeff: negative order");
  if ((a + b + c) % 2 != 0) return 0.0;
  if (a + b < c || a + c < b || b + c < a) return 0.0;
  const int s = (a + b + c) / 2;
  const auto lf = [](int k) { return std::lgamma(static_cast<double>(k) + 1.0); };
  const double log_value = 0.5 * (lf(a) + lf(b) + lf(c)) - lf(s - c) -
                           lf(s - b) - lf(s - a);
  return std::exp(log_value);
}

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_) {
    if (e < 0) throw std::invalid_argument("MultiIndex: negative entry");
  }
  std::sort(entries_.begin(), entries_.end());
}

std::int64_t basis_dimension(int r, int d) {
  // C(r+d, d) without overflow at the scales we run.
  std::int64_t num = 1;
  for (int k = 1; k <= d; ++k) num = num * (r + k) / k;
  return num;
}

namespace {

void enumerate_multisets(int r, int degree, int min_entry,
                         std::vector<int>& prefix,
                         std::vector<MultiIndex>& out) {
  if (degree == 0) {
    out.emplace_back(prefix);
    return;
  }
  for (int e = min_entry; e < r; ++e) {
    prefix.push_back(e);
    enumerate_multisets(r, degree - 1, e, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<MultiIndex> multi_index_space(int r, int d) {
  if (r < 1 || d < 1)
    throw std::invalid_argument("multi_index_space: need r >= 1 and d >= 1");
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(basis_dimension(r, d)));
  std::vector<int> prefix;
  for (int degree = 0; degree <= d; ++degree)
    enumerate_multisets(r, degree, 0, prefix, out);
  return out;
}

CoefficientVector::CoefficientVector(int r_, int d_, Eigen::VectorXd values_)
    : r(r_), d(d_), values(std::move(values_)) {
  if (values.size() != basis_dimension(r, d))
    throw std::invalid_argument(
        "CoefficientVector: values length does not match C(r+d, d)");
}

CoefficientVector CoefficientVector::zero(int r, int d) {
  return CoefficientVector(r, d,
                           Eigen::VectorXd::Zero(basis_dimension(r, d)));
}

Basis::Basis(int r, int d) : r_(r), d_(d), indices_(multi_index_space(r, d)) {
  factor_offsets_.reserve(indices_.size() + 1);
  factor_offsets_.push_back(0);
  std::vector<int> mult(static_cast<std::size_t>(r), 0);
  for (const MultiIndex& I : indices_) {
    std::fill(mult.begin(), mult.end(), 0);
    for (int e : I.entries()) ++mult[static_cast<std::size_t>(e)];
    for (int j = 0; j < r; ++j) {
      if (mult[static_cast<std::size_t>(j)] > 0)
        factors_.emplace_back(j, mult[static_cast<std::size_t>(j)]);
    }
    factor_offsets_.push_back(static_cast<int>(factors_.size()));
  }

  // Sparse maps c -> coefficients of d/dz_j p, via phi_k' = sqrt(k) phi_{k-1}.
  deriv_maps_.assign(static_cast<std::size_t>(r), {});
  std::map<std::vector<int>, int> lookup;
  for (int i = 0; i < size(); ++i) lookup[indices_[i].entries()] = i;
  for (int i = 0; i < size(); ++i) {
    const auto& entries = indices_[static_cast<std::size_t>(i)].entries();
    std::fill(mult.begin(), mult.end(), 0);
    for (int e : entries) ++mult[static_cast<std::size_t>(e)];
    for (int j = 0; j < r; ++j) {
      const int a = mult[static_cast<std::size_t>(j)];
      if (a == 0) continue;
      std::vector<int> reduced = entries;
      reduced.erase(std::find(reduced.begin(), reduced.end(), j));
      const int dst = lookup.at(reduced);
      deriv_maps_[static_cast<std::size_t>(j)].push_back(
          {i, dst, std::sqrt(static_cast<double>(a))});
    }
  }
}

const Basis& Basis::get(int r, int d) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<Basis>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{r, d}];
  if (!slot) slot = std::unique_ptr<Basis>(new Basis(r, d));
  return *slot;
}

int Basis::index_of(const MultiIndex& I) const {
  const auto it = std::lower_bound(indices_.begin(), indices_.end(), I);
  if (it == indices_.end() || !(*it == I))
    throw std::invalid_argument("Basis::index_of: index not in basis");
  return static_cast<int>(it - indices_.begin());
}

void Basis::oscillator_table(const Eigen::VectorXd& z, double* table) const {
  if (z.size() != r_)
    throw std::invalid_argument("Basis: point dimension does not match r");
  const int cols = d_ + 1;
  for (int j = 0; j < r_; ++j) {
    double* row = table + j * cols;
    row[0] = 1.0;
    if (d_ >= 1) row[1] = z[j];
    for (int k = 1; k < d_; ++k) {
      row[k + 1] = (z[j] * row[k] - std::sqrt(static_cast<double>(k)) * row[k - 1]) /
                   std::sqrt(static_cast<double>(k + 1));
    }
  }
}

double Basis::phi_from_table(int index, const double* table) const {
  const int cols = d_ + 1;
  double prod = 1.0;
  for (int f = factor_offsets_[index]; f < factor_offsets_[index + 1]; ++f) {
    const auto& [coord, mult] = factors_[static_cast<std::size_t>(f)];
    prod *= table[coord * cols + mult];
  }
  return prod;
}

Basis::Workspace Basis::make_workspace() const {
  Workspace ws;
  ws.table.resize(static_cast<std::size_t>(r_ * (d_ + 1)));
  ws.phi.resize(size());
  return ws;
}

void Basis::features(const Eigen::VectorXd& z, Workspace& ws) const {
  oscillator_table(z, ws.table.data());
  for (int i = 0; i < size(); ++i)
    ws.phi[i] = phi_from_table(i, ws.table.data());
}

Eigen::VectorXd Basis::features(const Eigen::VectorXd& z) const {
  Workspace ws = make_workspace();
  features(z, ws);
  return ws.phi;
}

double Basis::eval(const CoefficientVector& c, const Eigen::VectorXd& z,
                   Workspace& ws) const {
  oscillator_table(z, ws.table.data());
  double sum = 0.0;
  for (int i = 0; i < size(); ++i)
    sum += c.values[i] * phi_from_table(i, ws.table.data());
  return sum;
}

double Basis::eval(const CoefficientVector& c, const Eigen::VectorXd& z) const {
  Workspace ws = make_workspace();
  return eval(c, z, ws);
}

CoefficientVector Basis::derivative(const CoefficientVector& c, int j) const {
  if (j < 0 || j >= r_)
    throw std::invalid_argument("Basis::derivative: coordinate out of range");
  CoefficientVector out = CoefficientVector::zero(r_, d_);
  for (const DerivEntry& e : deriv_maps_[static_cast<std::size_t>(j)])
    out.values[e.dst] += e.w * c.values[e.src];
  return out;
}

void Basis::gradient(const CoefficientVector& c, const Eigen::VectorXd& z,
                     Workspace& ws, Eigen::VectorXd& out) const {
  oscillator_table(z, ws.table.data());
  ws.phi.setZero();
  // phi values are shared across the r partials; compute them once.
  for (int i = 0; i < size(); ++i)
    ws.phi[i] = phi_from_table(i, ws.table.data());
  out.resize(r_);
  for (int j = 0; j < r_; ++j) {
    double sum = 0.0;
    for (const DerivEntry& e : deriv_maps_[static_cast<std::size_t>(j)])
      sum += e.w * c.values[e.src] * ws.phi[e.dst];
    out[j] = sum;
  }
}

Eigen::VectorXd Basis::gradient(const CoefficientVector& c,
                                const Eigen::VectorXd& z) const {
  Workspace ws = make_workspace();
  Eigen::VectorXd out;
  gradient(c, z, ws, out);
  return out;
}

double phi_eval(const MultiIndex& I, const Eigen::VectorXd& z) {
  if (I.max_entry() >= z.size())
    throw std::invalid_argument("phi_eval: index entry exceeds point dimension");
  double prod = 1.0;
  int run_start = 0;
  const auto& entries = I.entries();
  for (std::size_t i = 0; i <= entries.size(); ++i) {
    if (i == entries.size() ||
        (i > 0 && entries[i] != entries[static_cast<std::size_t>(run_start)])) {
      if (i > 0) {
        const int coord = entries[static_cast<std::size_t>(run_start)];
        const int mult = static_cast<int>(i) - run_start;
        prod *= oscillator_eval(mult, z[coord]);
      }
      run_start = static_cast<int>(i);
    }
  }
  return prod;
}

double poly_eval(const CoefficientVector& c, const Eigen::VectorXd& z) {
  if (z.size() != c.r)
    throw std::invalid_argument("poly_eval: point dimension does not match r");
  return Basis::get(c.r, c.d).eval(c, z);
}

Eigen::VectorXd poly_gradient(const CoefficientVector& c,
                              const Eigen::VectorXd& z) {
  if (z.size() != c.r)
    throw std::invalid_argument("poly_gradient: point dimension does not match r");
  return Basis::get(c.r, c.d).gradient(c, z);
}

double hermite_variance(const CoefficientVector& c) {
  double sum = 0.0;
  for (Eigen::Index i = 1; i < c.values.size(); ++i)
    sum += c.values[i] * c.values[i];
  return sum;
}

QuadratureRule gauss_hermite(int m) {
  if (m < 1) throw std::invalid_argument("gauss_hermite: need m >= 1");
  // Golub-Welsch on the Jacobi matrix of the probabilist's Hermite
  // recurrence: zero diagonal, off-diagonal sqrt(k).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    const double b = std::sqrt(static_cast<double>(k));
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success)
    throw numerical_guard_error("gauss_hermite: eigendecomposition failed");
  QuadratureRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    const double first = solver.eigenvectors()(0, i);
    rule.weights[i] = first * first;
  }
  return rule;
}

}  // namespace lowrank
