#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace lowrank {

/// phi_ell(z) = He_ell(z) / sqrt(ell!), the normalized probabilist's Hermite
/// polynomial, evaluated by the three-term recurrence
///   z*phi_k = sqrt(k+1)*phi_{k+1} + sqrt(k)*phi_{k-1}.
double oscillator_eval(int ell, double z);

/// E[phi_a(g) phi_b(g) phi_c(g)] for g ~ N(0,1): the closed-form product
/// of factorials when a,b,c satisfy the triangle and even-sum conditions,
/// zero otherwise. Symmetric in its arguments.
double linearization_coeff(int a, int b, int c);

/// A multiset of variable indices in [0, r) identifying one tensor-product
/// basis function phi_I. Entries are kept sorted; the empty multiset is the
/// constant term.
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);

  int degree() const { return static_cast<int>(entries_.size()); }
  const std::vector<int>& entries() const { return entries_; }
  int max_entry() const { return entries_.empty() ? -1 : entries_.back(); }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.entries_ == b.entries_;
  }
  friend bool operator!=(const MultiIndex& a, const MultiIndex& b) {
    return !(a == b);
  }
  /// Graded ordering: first by degree, then lexicographic on the sorted
  /// entry lists. This is the frozen serialization order.
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return a.entries_ < b.entries_;
  }

private:
  std::vector<int> entries_;
};

/// All C(r+d, d) multisets of size <= d over [r] in graded-lex order;
/// index 0 is the empty multiset.
std::vector<MultiIndex> multi_index_space(int r, int d);

/// Number of multisets of size <= d over [r], i.e. C(r+d, d).
std::int64_t basis_dimension(int r, int d);

/// Dense coefficients over the canonical multi-index ordering; defines the
/// r-variate polynomial p(z) = sum_I c_I phi_I(z) of degree <= d.
struct CoefficientVector {
  int r = 0;
  int d = 0;
  Eigen::VectorXd values;

  CoefficientVector() = default;
  CoefficientVector(int r_, int d_, Eigen::VectorXd values_);
  static CoefficientVector zero(int r, int d);
};

/// Shared immutable evaluation machinery for one (r, d) pair: the canonical
/// index list, multiplicity layout, and the sparse derivative maps used by
/// gradient evaluation. Instances are built once and cached process-wide;
/// all methods are const and thread-safe.
class Basis {
public:
  static const Basis& get(int r, int d);

  int r() const { return r_; }
  int d() const { return d_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  int index_of(const MultiIndex& I) const;

  /// Fills table[j*(d+1)+k] = phi_k(z_j) for all j in [r], k in [0, d].
  void oscillator_table(const Eigen::VectorXd& z, double* table) const;

  /// phi_I(z) for the basis function at `index`, given a filled table.
  double phi_from_table(int index, const double* table) const;

  /// All basis functions at z, in canonical order.
  Eigen::VectorXd features(const Eigen::VectorXd& z) const;

  double eval(const CoefficientVector& c, const Eigen::VectorXd& z) const;
  Eigen::VectorXd gradient(const CoefficientVector& c,
                           const Eigen::VectorXd& z) const;

  /// Coefficients of the partial derivative d/dz_j p as a polynomial of
  /// degree <= d-1 (embedded in the same (r, d) layout).
  CoefficientVector derivative(const CoefficientVector& c, int j) const;

  /// Scratch space sized for this basis; avoids allocation in hot loops.
  struct Workspace {
    std::vector<double> table;
    Eigen::VectorXd phi;
  };
  Workspace make_workspace() const;

  void features(const Eigen::VectorXd& z, Workspace& ws) const;
  double eval(const CoefficientVector& c, const Eigen::VectorXd& z,
              Workspace& ws) const;
  void gradient(const CoefficientVector& c, const Eigen::VectorXd& z,
                Workspace& ws, Eigen::VectorXd& out) const;

private:
  Basis(int r, int d);

  struct DerivEntry {
    int src;    // coefficient index of I
    int dst;    // coefficient index of I with one copy of j removed
    double w;   // sqrt(multiplicity of j in I)
  };

  int r_;
  int d_;
  std::vector<MultiIndex> indices_;
  // Nonzero (coordinate, multiplicity) pairs per index, flattened.
  std::vector<std::pair<int, int>> factors_;
  std::vector<int> factor_offsets_;  // size() + 1 entries
  std::vector<std::vector<DerivEntry>> deriv_maps_;  // one per coordinate
};

double phi_eval(const MultiIndex& I, const Eigen::VectorXd& z);
double poly_eval(const CoefficientVector& c, const Eigen::VectorXd& z);
Eigen::VectorXd poly_gradient(const CoefficientVector& c,
                              const Eigen::VectorXd& z);

/// Var[p(g)] for g ~ N(0, Id_r): the sum of squared non-constant
/// coefficients, by orthonormality of the basis.
double hermite_variance(const CoefficientVector& c);

/// Gauss-Hermite rule for the standard Gaussian weight: m nodes/weights with
/// sum_i w_i f(x_i) = E[f(g)] exactly for polynomials of degree <= 2m-1.
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
QuadratureRule gauss_hermite(int m);

}  // namespace lowrank
