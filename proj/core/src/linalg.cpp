#include "flagcert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "flagcert/errors.hpp"

namespace flagcert {

namespace {

void require_same_dim(const Matrix& a, const Matrix& b) {
  if (a.dim() != b.dim()) {
    fail(ErrorCode::DimensionMismatch,
         "matrix dimensions " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
}

// Determinant of a square block given row-major storage, by LU with
// partial pivoting. The block is consumed.
double lu_determinant(std::vector<double>& a, std::size_t n) {
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    double best = std::abs(a[c * n + c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r * n + c]) > best) {
        best = std::abs(a[r * n + c]);
        pivot = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[c * n + j], a[pivot * n + j]);
      det = -det;
    }
    const double d = a[c * n + c];
    det *= d;
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / d;
      if (f == 0.0) continue;
      for (std::size_t j = c + 1; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
    }
  }
  return det;
}

}  // namespace

Matrix::Matrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

Matrix Matrix::identity(std::size_t dim) {
  Matrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows) {
  Matrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) {
      fail(ErrorCode::DimensionMismatch, "matrix rows must form a square array");
    }
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<Vec> r;
  for (const auto& row : rows) r.emplace_back(row);
  return from_rows(r);
}

bool Matrix::is_exact_integer() const {
  constexpr double kLimit = 9007199254740992.0;  // 2^53
  return std::all_of(data_.begin(), data_.end(), [](double x) {
    return std::isfinite(x) && std::abs(x) < kLimit && x == std::nearbyint(x);
  });
}

Matrix Matrix::transpose() const {
  Matrix t(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vec Matrix::column(std::size_t j) const {
  Vec c(dim_);
  for (std::size_t i = 0; i < dim_; ++i) c[i] = (*this)(i, j);
  return c;
}

Vec Matrix::apply(std::span<const double> v) const {
  if (v.size() != dim_) fail(ErrorCode::DimensionMismatch, "matrix-vector product");
  Vec out(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += (*this)(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

Vec Matrix::apply_transpose(std::span<const double> v) const {
  if (v.size() != dim_) fail(ErrorCode::DimensionMismatch, "transpose-vector product");
  Vec out(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out[j] += (*this)(i, j) * v[i];
  return out;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

Matrix& Matrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require_same_dim(a, b);
  const std::size_t n = a.dim();
  Matrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_dim(a, b);
  Matrix c = a;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) c(i, j) += b(i, j);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_dim(a, b);
  Matrix c = a;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) c(i, j) -= b(i, j);
  return c;
}

double determinant(const Matrix& m) {
  std::vector<double> a(m.data().begin(), m.data().end());
  return lu_determinant(a, m.dim());
}

Matrix inverse(const Matrix& m) {
  const std::size_t n = m.dim();
  const double scale = m.max_abs();
  if (scale == 0.0) fail(ErrorCode::SingularInput, "zero matrix has no inverse");
  std::vector<double> a(n * 2 * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i * 2 * n + j] = m(i, j) / scale;
    a[i * 2 * n + n + i] = 1.0;
  }
  const std::size_t w = 2 * n;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * w + c]) > std::abs(a[pivot * w + c])) pivot = r;
    if (std::abs(a[pivot * w + c]) < 1e-300) fail(ErrorCode::SingularInput, "matrix is singular");
    if (pivot != c)
      for (std::size_t j = 0; j < w; ++j) std::swap(a[c * w + j], a[pivot * w + j]);
    const double d = a[c * w + c];
    for (std::size_t j = 0; j < w; ++j) a[c * w + j] /= d;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r * w + c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < w; ++j) a[r * w + j] -= f * a[c * w + j];
    }
  }
  Matrix inv(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = a[i * w + n + j] / scale;
  if (m.is_exact_integer()) {
    const double det = determinant(m);
    if (std::abs(std::abs(det) - 1.0) < 1e-9) {
      // Unimodular integer matrices have integer inverses.
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = std::nearbyint(inv(i, j));
    }
  }
  return inv;
}

Matrix projective_normalize(const Matrix& m) {
  const std::size_t n = m.dim();
  Matrix out = m;
  const double det = determinant(m);
  if (det == 0.0 || !std::isfinite(det)) {
    fail(ErrorCode::SingularInput, "cannot normalize a singular matrix");
  }
  const bool unimodular_integer = m.is_exact_integer() && std::abs(std::abs(det) - 1.0) < 1e-9;
  if (!unimodular_integer) {
    out *= std::pow(std::abs(det), -1.0 / static_cast<double>(n));
  }
  const double cutoff = 1e-12 * out.max_abs();
  for (double x : out.data()) {
    if (std::abs(x) > cutoff) {
      if (x < 0.0) out *= -1.0;
      break;
    }
  }
  return out;
}

bool projectively_equal(const Matrix& a, const Matrix& b, double tol) {
  if (a.dim() != b.dim()) return false;
  if (a.is_exact_integer() && b.is_exact_integer()) {
    if (a == b) return true;
    Matrix nb = b;
    nb *= -1.0;
    if (a == nb) return true;
    // Integer representatives may still differ by a scalar.
  }
  const Matrix na = projective_normalize(a);
  const Matrix nb = projective_normalize(b);
  double dm = 0.0, dp = 0.0;
  for (std::size_t i = 0; i < na.data().size(); ++i) {
    dm = std::max(dm, std::abs(na.data()[i] - nb.data()[i]));
    dp = std::max(dp, std::abs(na.data()[i] + nb.data()[i]));
  }
  return std::min(dm, dp) <= tol * std::max(1.0, na.max_abs());
}

Matrix expm(const Matrix& x) {
  const std::size_t n = x.dim();
  double nrm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(x(i, j));
    nrm = std::max(nrm, row);
  }
  int squarings = 0;
  if (nrm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  Matrix a = x;
  a *= std::ldexp(1.0, -squarings);
  Matrix result = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k <= 20; ++k) {
    term = term * a;
    term *= 1.0 / k;
    result = result + term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

Matrix power(const Matrix& m, long long n) {
  Matrix base = n < 0 ? inverse(m) : m;
  unsigned long long e = n < 0 ? static_cast<unsigned long long>(-n) : static_cast<unsigned long long>(n);
  Matrix result = Matrix::identity(m.dim());
  while (e > 0) {
    if (e & 1ULL) result = result * base;
    e >>= 1ULL;
    if (e > 0) base = base * base;
  }
  return result;
}

SingularDecomposition svd(const Matrix& m, SvdOptions options) {
  const std::size_t n = m.dim();
  if (n == 0) fail(ErrorCode::DimensionMismatch, "svd of an empty matrix");
  const double scale = m.max_abs();
  if (!(scale > 0.0) || !std::isfinite(scale)) fail(ErrorCode::SingularInput, "matrix is zero or non-finite");
  Matrix w = m;
  w *= 1.0 / scale;
  if (!options.allow_singular) {
    const double det = determinant(w);
    if (!(std::abs(det) > 1e-300)) fail(ErrorCode::SingularInput, "determinant underflows after scaling");
  }

  // One-sided Jacobi on columns: W <- W J, V <- V J, fixed cyclic order.
  Matrix v = Matrix::identity(n);
  const double tol = static_cast<double>(n) * std::numeric_limits<double>::epsilon();
  auto col_norm = [&](std::size_t j) {
    double s = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, std::abs(w(i, j)));
    if (mx == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = w(i, j) / mx;
      s += t * t;
    }
    return mx * std::sqrt(s);
  };
  int sweep = 0;
  bool converged = n == 1;
  while (!converged) {
    if (sweep >= options.max_sweeps) {
      fail(ErrorCode::NoConvergence, "Jacobi SVD exceeded " + std::to_string(options.max_sweeps) + " sweeps");
    }
    ++sweep;
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double np = col_norm(p);
        const double nq = col_norm(q);
        if (np == 0.0 || nq == 0.0) continue;
        double cosine = 0.0;
        for (std::size_t i = 0; i < n; ++i) cosine += (w(i, p) / np) * (w(i, q) / nq);
        if (std::abs(cosine) <= tol) continue;
        converged = false;
        const double zeta = (nq / np - np / nq) / (2.0 * cosine);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
  }

  std::vector<double> sig(n);
  for (std::size_t j = 0; j < n; ++j) sig[j] = col_norm(j);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sig[a] > sig[b]; });

  SingularDecomposition out;
  out.u = Matrix(n);
  out.v = Matrix(n);
  out.sigma.resize(n);
  out.sweeps = sweep;
  for (std::size_t jj = 0; jj < n; ++jj) {
    const std::size_t j = order[jj];
    const double s = sig[j];
    if (!(s > 0.0)) {
      if (!options.allow_singular) fail(ErrorCode::SingularInput, "zero singular value");
      out.sigma[jj] = 0.0;
      for (std::size_t i = 0; i < n; ++i) out.v(i, jj) = v(i, j);
      continue;
    }
    out.sigma[jj] = s * scale;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(w(i, j)) > std::abs(w(arg, j))) arg = i;
    const double sign = w(arg, j) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      out.u(i, jj) = sign * w(i, j) / s;
      out.v(i, jj) = sign * v(i, j);
    }
  }

  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double r = 0.0;
      for (std::size_t k = 0; k < n; ++k) r += out.u(i, k) * out.sigma[k] * out.v(j, k);
      res = std::max(res, std::abs(r - m(i, j)));
    }
  out.residual = res / scale;
  return out;
}

CartanVector cartan_from_singular_values(std::span<const double> sigma) {
  CartanVector cv;
  cv.mu.resize(sigma.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    cv.mu[i] = std::log(sigma[i]);
    mean += cv.mu[i];
  }
  mean /= static_cast<double>(sigma.size());
  for (double& x : cv.mu) x -= mean;
  return cv;
}

CartanVector cartan_projection(const Matrix& m) { return cartan_from_singular_values(svd(m).sigma); }

Vec simple_root_gaps(const CartanVector& cv) {
  Vec gaps;
  for (std::size_t i = 0; i + 1 < cv.mu.size(); ++i) gaps.push_back(std::max(0.0, cv.mu[i] - cv.mu[i + 1]));
  return gaps;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::vector<std::size_t>> k_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n) return out;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

Matrix exterior_power(const Matrix& m, std::size_t k) {
  const std::size_t d = m.dim();
  if (k < 1 || k + 1 > d) {
    fail(ErrorCode::BadDegree, "exterior degree " + std::to_string(k) + " outside [1, " + std::to_string(d - 1) + "]");
  }
  const std::size_t big = binomial(d, k);
  if (big > kMaxExteriorDimension) fail(ErrorCode::BadDegree, "exterior power dimension exceeds 200");
  const auto subsets = k_subsets(d, k);
  Matrix out(big);
  std::vector<double> block(k * k);
  for (std::size_t a = 0; a < big; ++a) {
    for (std::size_t b = 0; b < big; ++b) {
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) block[i * k + j] = m(subsets[a][i], subsets[b][j]);
      out(a, b) = lu_determinant(block, k);
    }
  }
  return out;
}

Vec wedge(const std::vector<Vec>& vectors) {
  const std::size_t k = vectors.size();
  if (k == 0) return {1.0};
  const std::size_t d = vectors.front().size();
  const auto subsets = k_subsets(d, k);
  Vec out(subsets.size());
  std::vector<double> block(k * k);
  for (std::size_t a = 0; a < subsets.size(); ++a) {
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) block[i * k + j] = vectors[j][subsets[a][i]];
    out[a] = lu_determinant(block, k);
  }
  return out;
}

bool flag_divergent(std::span<const double> values, double threshold) {
  if (values.empty() || !(values.back() > threshold)) return false;
  const std::size_t n = values.size();
  const std::size_t start = n - std::max<std::size_t>(2, n / 4);
  const std::size_t mid = start + (n - start) / 2;
  const double first = *std::min_element(values.begin() + static_cast<long>(start), values.begin() + static_cast<long>(mid));
  const double second = *std::min_element(values.begin() + static_cast<long>(mid), values.end());
  return second > first;
}

GapTrace gap_trace(std::span<const Matrix> seq, std::size_t k, double threshold) {
  if (seq.empty()) fail(ErrorCode::InsufficientData, "gap_trace needs a nonempty sequence");
  GapTrace out;
  out.threshold = threshold;
  for (const Matrix& g : seq) {
    if (k < 1 || k + 1 > g.dim()) fail(ErrorCode::BadDegree, "gap index outside [1, d-1]");
    const auto dec = svd(g);
    out.values.push_back(std::log(dec.sigma[k - 1] / dec.sigma[k]));
  }
  out.divergent = flag_divergent(out.values, threshold);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::DimensionMismatch, "dot product");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) {
  double mx = 0.0;
  for (double x : a) mx = std::max(mx, std::abs(x));
  if (mx == 0.0 || !std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : a) s += (x / mx) * (x / mx);
  return mx * std::sqrt(s);
}

Vec normalized(std::span<const double> a) {
  const double n = norm(a);
  Vec out(a.begin(), a.end());
  if (n > 0.0)
    for (double& x : out) x /= n;
  return out;
}

Vec axpy(double alpha, std::span<const double> x, std::span<const double> y) {
  Vec out(y.begin(), y.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += alpha * x[i];
  return out;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

}  // namespace flagcert
