#include "gravomg/sparse.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "gravomg/errors.hpp"

namespace gravomg {

namespace {

void check_vector(std::size_t got, Index expected, const char* what) {
  if (static_cast<Index>(got) != expected) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                         ", got " + std::to_string(got));
  }
}

// Row-wise accumulator for sparse products: dense values plus a touched list.
class RowAccumulator {
public:
  explicit RowAccumulator(Index cols) : values_(cols, 0.0), used_(cols, false) {}

  void add(Index j, double v) {
    if (!used_[j]) {
      used_[j] = true;
      touched_.push_back(j);
    }
    values_[j] += v;
  }

  void flush(std::vector<Index>& cols, std::vector<double>& vals) {
    std::sort(touched_.begin(), touched_.end());
    for (Index j : touched_) {
      if (std::abs(values_[j]) >= kDropTolerance) {
        cols.push_back(j);
        vals.push_back(values_[j]);
      }
      values_[j] = 0.0;
      used_[j] = false;
    }
    touched_.clear();
  }

private:
  std::vector<double> values_;
  std::vector<bool> used_;
  std::vector<Index> touched_;
};

}  // namespace

SparseMatrix::SparseMatrix(Index rows, Index cols)
    : rows_(rows), cols_(cols), row_offsets_(static_cast<std::size_t>(rows) + 1, 0) {
  if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
}

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets,
                           std::vector<Index> col_indices, std::vector<double> values)
    : rows_(rows), cols_(cols), row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)), values_(std::move(values)) {
  if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
  if (static_cast<Index>(row_offsets_.size()) != rows + 1)
    throw DimensionError("row offsets must have rows + 1 entries");
  if (col_indices_.size() != values_.size())
    throw DimensionError("column index and value arrays differ in length");
  if (row_offsets_.front() != 0 || row_offsets_.back() != nnz())
    throw DimensionError("row offsets must start at 0 and end at nnz");
  for (Index i = 0; i < rows; ++i) {
    if (row_offsets_[i + 1] < row_offsets_[i]) throw DimensionError("row offsets decrease");
    for (Index k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (col_indices_[k] < 0 || col_indices_[k] >= cols)
        throw DimensionError("column index out of range in row " + std::to_string(i));
      if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1])
        throw DimensionError("column indices not strictly increasing in row " + std::to_string(i));
    }
  }
  // Drop explicit zeros.
  Index out = 0;
  std::vector<Index> offsets(row_offsets_.size(), 0);
  for (Index i = 0; i < rows; ++i) {
    for (Index k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (std::abs(values_[k]) >= kDropTolerance) {
        col_indices_[out] = col_indices_[k];
        values_[out] = values_[k];
        ++out;
      }
    }
    offsets[i + 1] = out;
  }
  col_indices_.resize(out);
  values_.resize(out);
  row_offsets_ = std::move(offsets);
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::span<const Triplet> triplets) {
  SparseMatrix m(rows, cols);
  std::vector<Index> counts(static_cast<std::size_t>(rows) + 1, 0);
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw DimensionError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                           ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    ++counts[t.row + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  std::vector<std::pair<Index, double>> bucket(triplets.size());
  std::vector<Index> fill(counts.begin(), counts.end() - 1);
  for (const Triplet& t : triplets) bucket[fill[t.row]++] = {t.col, t.value};

  m.col_indices_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  for (Index i = 0; i < rows; ++i) {
    auto first = bucket.begin() + counts[i];
    auto last = bucket.begin() + counts[i + 1];
    std::sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = first; it != last;) {
      Index col = it->first;
      double sum = 0.0;
      for (; it != last && it->first == col; ++it) sum += it->second;
      if (std::abs(sum) >= kDropTolerance) {
        m.col_indices_.push_back(col);
        m.values_.push_back(sum);
      }
    }
    m.row_offsets_[i + 1] = m.nnz();
  }
  return m;
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
  return diagonal(ones);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d) {
  const Index n = static_cast<Index>(d.size());
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (Index i = 0; i < n; ++i) t.push_back({i, i, d[i]});
  return from_triplets(n, n, t);
}

double SparseMatrix::coeff(Index i, Index j) const {
  auto cols = row_cols(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[row_offsets_[i] + (it - cols.begin())];
}

std::vector<double> SparseMatrix::diagonal_values() const {
  std::vector<double> d(static_cast<std::size_t>(std::min(rows_, cols_)), 0.0);
  for (Index i = 0; i < static_cast<Index>(d.size()); ++i) d[i] = coeff(i, i);
  return d;
}

bool SparseMatrix::is_symmetric(double rel_tol) const {
  if (rows_ != cols_) return false;
  double scale = 0.0;
  for (double v : values_) scale = std::max(scale, std::abs(v));
  const double tol = rel_tol * scale;
  for (Index i = 0; i < rows_; ++i) {
    auto cols = row_cols(i);
    auto vals = row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (std::abs(vals[k] - coeff(cols[k], i)) > tol) return false;
    }
  }
  return true;
}

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
  std::vector<double> y(static_cast<std::size_t>(a.rows()), 0.0);
  spmv_into(a, x, y);
  return y;
}

void spmv_into(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  check_vector(x.size(), a.cols(), "spmv input");
  check_vector(y.size(), a.rows(), "spmv output");
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (Index i = 0; i < a.rows(); ++i) {
    double sum = 0.0;
    for (Index k = offsets[i]; k < offsets[i + 1]; ++k) sum += vals[k] * x[cols[k]];
    y[i] = sum;
  }
}

SparseMatrix transpose(const SparseMatrix& a) {
  std::vector<Index> offsets(static_cast<std::size_t>(a.cols()) + 1, 0);
  for (Index c : a.col_indices()) ++offsets[c + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<Index> cols(static_cast<std::size_t>(a.nnz()));
  std::vector<double> vals(static_cast<std::size_t>(a.nnz()));
  std::vector<Index> fill(offsets.begin(), offsets.end() - 1);
  // Ascending row traversal keeps each output row sorted.
  for (Index i = 0; i < a.rows(); ++i) {
    auto rc = a.row_cols(i);
    auto rv = a.row_values(i);
    for (std::size_t k = 0; k < rc.size(); ++k) {
      Index pos = fill[rc[k]]++;
      cols[pos] = i;
      vals[pos] = rv[k];
    }
  }
  return SparseMatrix(a.cols(), a.rows(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("multiply: inner dimensions " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + " differ");
  RowAccumulator acc(b.cols());
  std::vector<Index> offsets(static_cast<std::size_t>(a.rows()) + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  for (Index i = 0; i < a.rows(); ++i) {
    auto ac = a.row_cols(i);
    auto av = a.row_values(i);
    for (std::size_t k = 0; k < ac.size(); ++k) {
      auto bc = b.row_cols(ac[k]);
      auto bv = b.row_values(ac[k]);
      for (std::size_t m = 0; m < bc.size(); ++m) acc.add(bc[m], av[k] * bv[m]);
    }
    acc.flush(cols, vals);
    offsets[i + 1] = static_cast<Index>(cols.size());
  }
  return SparseMatrix(a.rows(), b.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("add: shapes differ");
  RowAccumulator acc(a.cols());
  std::vector<Index> offsets(static_cast<std::size_t>(a.rows()) + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  for (Index i = 0; i < a.rows(); ++i) {
    auto ac = a.row_cols(i);
    auto av = a.row_values(i);
    for (std::size_t k = 0; k < ac.size(); ++k) acc.add(ac[k], alpha * av[k]);
    auto bc = b.row_cols(i);
    auto bv = b.row_values(i);
    for (std::size_t k = 0; k < bc.size(); ++k) acc.add(bc[k], beta * bv[k]);
    acc.flush(cols, vals);
    offsets[i + 1] = static_cast<Index>(cols.size());
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix scale_rows(const SparseMatrix& a, std::span<const double> d) {
  check_vector(d.size(), a.rows(), "scale_rows");
  std::vector<Index> offsets(a.row_offsets().begin(), a.row_offsets().end());
  std::vector<Index> cols(a.col_indices().begin(), a.col_indices().end());
  std::vector<double> vals(a.values().begin(), a.values().end());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = offsets[i]; k < offsets[i + 1]; ++k) vals[k] *= d[i];
  return SparseMatrix(a.rows(), a.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix triple_product(const SparseMatrix& p, const SparseMatrix& a) {
  if (a.rows() != a.cols() || p.rows() != a.rows())
    throw DimensionError("triple_product: need square A with rows(P) = rows(A)");
  SparseMatrix coarse = multiply(transpose(p), multiply(a, p));
  if (a.is_symmetric()) coarse = add(coarse, transpose(coarse), 0.5, 0.5);
  return coarse;
}

double frobenius_norm(const SparseMatrix& a) {
  double sum = 0.0;
  for (double v : a.values()) sum += v * v;
  return std::sqrt(sum);
}

void gauss_seidel(const SparseMatrix& a, std::span<double> x, std::span<const double> b, int sweeps) {
  if (a.rows() != a.cols()) throw DimensionError("gauss_seidel: matrix not square");
  check_vector(x.size(), a.rows(), "gauss_seidel iterate");
  check_vector(b.size(), a.rows(), "gauss_seidel right-hand side");
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (int s = 0; s < sweeps; ++s) {
    for (Index i = 0; i < a.rows(); ++i) {
      double sum = b[i];
      double diag = 0.0;
      for (Index k = offsets[i]; k < offsets[i + 1]; ++k) {
        if (cols[k] == i)
          diag = vals[k];
        else
          sum -= vals[k] * x[cols[k]];
      }
      if (std::abs(diag) <= kDropTolerance) throw ZeroDiagonalError(static_cast<std::size_t>(i));
      x[i] = sum / diag;
    }
  }
}

DenseCholesky::DenseCholesky(const SparseMatrix& a) : n_(a.rows()) {
  if (a.rows() != a.cols()) throw DimensionError("cholesky: matrix not square");
  const auto n = static_cast<std::size_t>(n_);
  lower_.assign(n * n, 0.0);
  double max_diag = 0.0;
  for (Index i = 0; i < n_; ++i) {
    auto rc = a.row_cols(i);
    auto rv = a.row_values(i);
    for (std::size_t k = 0; k < rc.size(); ++k) {
      if (rc[k] <= i) lower_[i * n + rc[k]] = rv[k];
      if (rc[k] == i) max_diag = std::max(max_diag, rv[k]);
    }
  }
  const double pivot_floor = 1e-13 * max_diag;
  for (std::size_t i = 0; i < n; ++i) {
    double* row_i = &lower_[i * n];
    for (std::size_t j = 0; j <= i; ++j) {
      const double* row_j = &lower_[j * n];
      double s = row_i[j];
      for (std::size_t k = 0; k < j; ++k) s -= row_i[k] * row_j[k];
      if (j == i) {
        if (!(s > pivot_floor)) throw NotPositiveDefiniteError(i);
        row_i[i] = std::sqrt(s);
      } else {
        row_i[j] = s / row_j[j];
      }
    }
  }
}

std::vector<double> DenseCholesky::solve(std::span<const double> b) const {
  check_vector(b.size(), n_, "cholesky right-hand side");
  const auto n = static_cast<std::size_t>(n_);
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = &lower_[i * n];
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k) s -= row[k] * y[k];
    y[i] = s / row[i];
  }
  // Back substitution with L^T, column-oriented so rows of L stay contiguous.
  for (std::size_t i = n; i-- > 0;) {
    const double* row = &lower_[i * n];
    y[i] /= row[i];
    for (std::size_t k = 0; k < i; ++k) y[k] -= row[k] * y[i];
  }
  return y;
}

std::vector<double> dense_cholesky_solve(const SparseMatrix& a, std::span<const double> b) {
  return DenseCholesky(a).solve(b);
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty Matrix Market file", 1);
  ++line_no;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate")
    throw ParseError("expected '%%MatrixMarket matrix coordinate' banner", line_no);
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer" && field != "double")
    throw ParseError("unsupported Matrix Market field '" + field + "'", line_no);
  if (symmetry != "general" && symmetry != "symmetric")
    throw ParseError("unsupported Matrix Market symmetry '" + symmetry + "'", line_no);

  Index rows = -1, cols = -1, entries = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> entries) || rows < 0 || cols < 0 || entries < 0)
      throw ParseError("bad size line", line_no);
    break;
  }
  if (entries < 0) throw ParseError("missing size line", line_no);

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(entries));
  Index read = 0;
  while (read < entries && std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    Index i, j;
    double v;
    if (!(entry >> i >> j >> v)) throw ParseError("bad matrix entry", line_no);
    if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError("entry index out of range", line_no);
    triplets.push_back({i - 1, j - 1, v});
    if (symmetry == "symmetric" && i != j) triplets.push_back({j - 1, i - 1, v});
    ++read;
  }
  if (read != entries)
    throw ParseError("expected " + std::to_string(entries) + " entries, found " + std::to_string(read),
                     line_no);
  return SparseMatrix::from_triplets(rows, cols, triplets);
}

void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  out.precision(17);
  for (Index i = 0; i < a.rows(); ++i) {
    auto rc = a.row_cols(i);
    auto rv = a.row_values(i);
    for (std::size_t k = 0; k < rc.size(); ++k) out << i + 1 << ' ' << rc[k] + 1 << ' ' << rv[k] << '\n';
  }
}

}  // namespace gravomg
