#include "corenet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "corenet/error.hpp"

namespace corenet {

namespace {

[[noreturn]] void dimension_error(const char* op, std::size_t expected, std::size_t got) {
  std::ostringstream msg;
  msg << op << ": dimension mismatch (expected " << expected << ", got " << got << ")";
  throw Error(ErrorKind::kDimensionMismatch, msg.str());
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimensionMismatch: return "dimension_mismatch";
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kChecksum: return "checksum";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kConvergence: return "convergence";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kInsufficientData: return "insufficient_data";
    case ErrorKind::kNoPositiveMass: return "no_positive_mass";
  }
  return "unknown";
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    dimension_error("DenseMatrix", rows * cols, data_.size());
  }
}

std::size_t DenseMatrix::nnz() const {
  return static_cast<std::size_t>(
      std::count_if(data_.begin(), data_.end(), [](double x) { return x != 0.0; }));
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SparseRow canonicalize(SparseRow row) {
  std::stable_sort(row.begin(), row.end(),
                   [](const SparseEntry& a, const SparseEntry& b) { return a.col < b.col; });
  SparseRow out;
  out.reserve(row.size());
  for (const auto& e : row) {
    if (!out.empty() && out.back().col == e.col) {
      out.back().value += e.value;
    } else {
      out.push_back(e);
    }
  }
  std::erase_if(out, [](const SparseEntry& e) { return e.value == 0.0; });
  return out;
}

SparseRowMatrix::SparseRowMatrix(std::size_t rows, std::size_t cols)
    : cols_(cols), row_ptr_(rows + 1, 0) {}

SparseRowMatrix::SparseRowMatrix(std::size_t cols, const std::vector<SparseRow>& rows)
    : cols_(cols) {
  row_ptr_.reserve(rows.size() + 1);
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (r[k].col >= cols) {
        throw Error(ErrorKind::kInvalidArgument, "SparseRowMatrix: column index out of range");
      }
      if (k > 0 && r[k].col <= r[k - 1].col) {
        throw Error(ErrorKind::kInvalidArgument,
                    "SparseRowMatrix: column indices must be strictly increasing");
      }
      if (r[k].value == 0.0) {
        throw Error(ErrorKind::kInvalidArgument, "SparseRowMatrix: explicit zero stored");
      }
      col_idx_.push_back(r[k].col);
      values_.push_back(r[k].value);
    }
    row_ptr_.push_back(values_.size());
  }
}

SparseRowMatrix SparseRowMatrix::from_dense(const DenseMatrix& m) {
  std::vector<SparseRow> rows(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) rows[i].push_back({j, m(i, j)});
    }
  }
  return SparseRowMatrix(m.cols(), rows);
}

SparseRow SparseRowMatrix::row(std::size_t i) const {
  SparseRow r;
  auto cols = row_cols(i);
  auto vals = row_values(i);
  r.reserve(cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) r.push_back({cols[k], vals[k]});
  return r;
}

DenseMatrix SparseRowMatrix::to_dense() const {
  DenseMatrix d(rows(), cols_);
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, col_idx_[k]) = values_[k];
  }
  return d;
}

Vector matvec(const DenseMatrix& m, std::span<const double> v) {
  if (v.size() != m.cols()) dimension_error("matvec", m.cols(), v.size());
  Vector out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * v[j];
    out[i] = acc;
  }
  return out;
}

Vector matvec(const SparseRowMatrix& m, std::span<const double> v) {
  if (v.size() != m.cols()) dimension_error("matvec", m.cols(), v.size());
  Vector out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto cols = m.row_cols(i);
    const auto vals = m.row_values(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) acc += vals[k] * v[cols[k]];
    out[i] = acc;
  }
  return out;
}

double dot(const SparseRow& row, std::span<const double> v) {
  double acc = 0.0;
  for (const auto& e : row) {
    if (e.col >= v.size()) dimension_error("dot", v.size(), e.col + 1);
    acc += e.value * v[e.col];
  }
  return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) dimension_error("dot", a.size(), b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Vector relu(std::span<const double> v) {
  Vector out(v.begin(), v.end());
  for (double& x : out) x = std::max(x, 0.0);
  return out;
}

MatrixNorms norms(const DenseMatrix& m) {
  MatrixNorms n;
  double sq = 0.0;
  for (double x : m.data()) {
    n.l1 += std::abs(x);
    sq += x * x;
  }
  n.frobenius = std::sqrt(sq);
  return n;
}

DenseMatrix SvdFactors::reconstruct() const {
  const std::size_t rows = left.empty() ? 0 : left.front().size();
  const std::size_t cols = right.empty() ? 0 : right.front().size();
  DenseMatrix m(rows, cols);
  for (std::size_t k = 0; k < rank(); ++k) {
    for (std::size_t i = 0; i < rows; ++i) {
      const double scaled = singular_values[k] * left[k][i];
      for (std::size_t j = 0; j < cols; ++j) m(i, j) += scaled * right[k][j];
    }
  }
  return m;
}

SymmetricEigen jacobi_eigen(const DenseMatrix& symmetric, const JacobiOptions& options) {
  const std::size_t n = symmetric.rows();
  if (symmetric.cols() != n) dimension_error("jacobi_eigen", n, symmetric.cols());

  DenseMatrix a = symmetric;
  DenseMatrix v = DenseMatrix::identity(n);
  const double scale = norms(a).frobenius;

  auto off_diagonal = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) s += a(i, j) * a(i, j);
      }
    }
    return std::sqrt(s);
  };

  double residual = off_diagonal();
  int sweep = 0;
  while (residual > options.tolerance * scale) {
    if (sweep == options.max_sweeps) {
      std::ostringstream msg;
      msg << "jacobi_eigen: no convergence after " << sweep
          << " sweeps (off-diagonal residual " << residual << ")";
      throw Error(ErrorKind::kConvergence, msg.str());
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    ++sweep;
    residual = off_diagonal();
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

namespace {

// Removes the components along `basis` (modified Gram-Schmidt).
void orthogonalize(Vector& x, const std::vector<Vector>& basis) {
  for (const auto& b : basis) {
    const double proj = dot(x, b);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= proj * b[i];
  }
}

// Unit vector orthogonal to `basis`, chosen from the canonical basis.
Vector complete_basis(std::size_t dim, const std::vector<Vector>& basis) {
  Vector best;
  double best_norm = -1.0;
  for (std::size_t k = 0; k < dim; ++k) {
    Vector e(dim, 0.0);
    e[k] = 1.0;
    orthogonalize(e, basis);
    orthogonalize(e, basis);
    const double n = norm2(e);
    if (n > best_norm) {
      best_norm = n;
      best = std::move(e);
    }
  }
  for (double& x : best) x /= best_norm;
  return best;
}

}  // namespace

SvdFactors truncated_svd(const DenseMatrix& m, std::size_t rank, const JacobiOptions& options) {
  const std::size_t small = std::min(m.rows(), m.cols());
  if (rank < 1 || rank > small) {
    std::ostringstream msg;
    msg << "truncated_svd: rank " << rank << " outside [1, " << small << "]";
    throw Error(ErrorKind::kInvalidArgument, msg.str());
  }

  // Eigenvectors of the smaller Gram matrix give one side of the factors; the
  // other side is recovered by one multiplication.
  const bool left_from_gram = m.rows() <= m.cols();
  const DenseMatrix& big = m;
  const DenseMatrix mt = m.transposed();
  const std::size_t n = small;
  DenseMatrix gram(n, n);
  const DenseMatrix& side = left_from_gram ? big : mt;  // n x other
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double g = dot(side.row(i), side.row(j));
      gram(i, j) = g;
      gram(j, i) = g;
    }
  }
  const SymmetricEigen eig = jacobi_eigen(gram, options);

  struct Triple {
    double sigma;
    Vector gram_side;
    Vector other_side;
  };
  std::vector<Triple> triples;
  std::vector<Vector> gram_basis;
  std::vector<Vector> other_basis;
  const DenseMatrix& other_op = left_from_gram ? mt : big;  // maps gram side to other side
  const std::size_t other_dim = other_op.rows();
  const double sigma_max = std::sqrt(std::max(eig.values.front(), 0.0));

  for (std::size_t k = 0; k < rank; ++k) {
    Vector g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = eig.vectors(i, k);
    Vector o = matvec(other_op, g);
    double sigma = norm2(o);
    if (sigma <= 1e-13 * std::max(sigma_max, 1e-300)) {
      sigma = 0.0;
      o = complete_basis(other_dim, other_basis);
    } else {
      for (double& x : o) x /= sigma;
      orthogonalize(o, other_basis);
      const double nrm = norm2(o);
      for (double& x : o) x /= nrm;
    }
    gram_basis.push_back(g);
    other_basis.push_back(o);
    triples.push_back({sigma, std::move(g), std::move(o)});
  }
  std::stable_sort(triples.begin(), triples.end(),
                   [](const Triple& a, const Triple& b) { return a.sigma > b.sigma; });

  SvdFactors f;
  for (auto& t : triples) {
    f.singular_values.push_back(t.sigma);
    if (left_from_gram) {
      f.left.push_back(std::move(t.gram_side));
      f.right.push_back(std::move(t.other_side));
    } else {
      f.left.push_back(std::move(t.other_side));
      f.right.push_back(std::move(t.gram_side));
    }
  }
  return f;
}

}  // namespace corenet
