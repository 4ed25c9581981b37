#pragma once

// Dense small-dimension real linear algebra: matrices of size d <= 20,
// one-sided Jacobi SVD, Cartan projections, simple-root gaps and exterior
// powers.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace flagcert {

using Vec = std::vector<double>;

inline constexpr std::size_t kMaxDimension = 20;
inline constexpr std::size_t kMaxExteriorDimension = 200;

class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t dim);

  static Matrix identity(std::size_t dim);
  static Matrix diagonal(std::span<const double> diag);
  static Matrix from_rows(const std::vector<Vec>& rows);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return dim_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  std::span<const double> data() const noexcept { return data_; }

  /// True when every entry is an integer of magnitude below 2^53, so the
  /// matrix can be compared and hashed exactly.
  bool is_exact_integer() const;

  Matrix transpose() const;
  Vec column(std::size_t j) const;
  Vec apply(std::span<const double> v) const;
  Vec apply_transpose(std::span<const double> v) const;
  double max_abs() const;

  Matrix& operator*=(double s);
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator*(double s, Matrix m) { return m *= s; }
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

double determinant(const Matrix& m);
Matrix inverse(const Matrix& m);

/// Scales by |det|^{-1/d} and flips sign so the first entry that is not
/// negligible is positive. Exact integer matrices with |det| = 1 keep
/// their integer entries.
Matrix projective_normalize(const Matrix& m);

/// Projective equality: relative sup-norm distance of normalized
/// representatives up to sign, or exact comparison for integer matrices.
bool projectively_equal(const Matrix& a, const Matrix& b, double tol = 1e-9);

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
Matrix expm(const Matrix& x);

/// Integer power; negative exponents use the inverse.
Matrix power(const Matrix& m, long long n);

struct SingularDecomposition {
  Matrix u;
  Vec sigma;
  Matrix v;
  double residual = 0.0;
  int sweeps = 0;
};

struct SvdOptions {
  int max_sweeps = 100;
  /// Skips the invertibility check; used for normalized products whose
  /// smallest singular values underflow relative to the largest.
  bool allow_singular = false;
};

SingularDecomposition svd(const Matrix& m, SvdOptions options = {});

struct CartanVector {
  Vec mu;
  std::size_t dim() const noexcept { return mu.size(); }
};

CartanVector cartan_projection(const Matrix& m);
CartanVector cartan_from_singular_values(std::span<const double> sigma);

/// gaps[i] = mu[i] - mu[i+1]; gaps[k-1] is the P_k divergence observable.
Vec simple_root_gaps(const CartanVector& cv);

/// Entry (I, J) is the minor of m on row set I and column set J, with
/// k-subsets in lexicographic order.
Matrix exterior_power(const Matrix& m, std::size_t k);
std::vector<std::vector<std::size_t>> k_subsets(std::size_t n, std::size_t k);
std::size_t binomial(std::size_t n, std::size_t k);

/// Wedge product v_1 ^ ... ^ v_k in the lexicographic basis of the k-th
/// exterior power.
Vec wedge(const std::vector<Vec>& vectors);

struct GapTrace {
  Vec values;
  bool divergent = false;
  double threshold = 5.0;
};

/// Finite-sequence proxy for P_k divergence: the last value exceeds the
/// threshold and, within the last quartile, the minimum over the second
/// half is strictly larger than the minimum over the first half.
bool flag_divergent(std::span<const double> values, double threshold);

GapTrace gap_trace(std::span<const Matrix> seq, std::size_t k, double threshold = 5.0);

// Small vector helpers shared across modules.
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
Vec normalized(std::span<const double> a);
Vec axpy(double alpha, std::span<const double> x, std::span<const double> y);

std::string format_double(double x);

}  // namespace flagcert
