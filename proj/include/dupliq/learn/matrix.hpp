#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace dupliq::learn {

/// Compressed sparse rows. Column indices increase strictly within a row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> indptr = {0};
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  void add_row(std::span<const std::pair<std::uint32_t, double>> entries);
};

/// Design matrix handed to the classifiers: either dense row-major or CSR.
/// The storage kind also picks the KNN metric (euclidean vs cosine).
class Matrix {
 public:
  Matrix() = default;
  static Matrix dense(std::size_t rows, std::size_t cols, std::vector<double> values);
  static Matrix sparse(CsrMatrix csr);

  bool is_sparse() const { return sparse_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double at(std::size_t row, std::size_t col) const;

  /// Dense storage only.
  std::span<const double> dense_row(std::size_t row) const {
    return {dense_.data() + row * cols_, cols_};
  }
  /// Sparse storage only.
  std::span<const std::uint32_t> row_indices(std::size_t row) const {
    return {csr_.indices.data() + csr_.indptr[row], csr_.indptr[row + 1] - csr_.indptr[row]};
  }
  std::span<const double> row_values(std::size_t row) const {
    return {csr_.values.data() + csr_.indptr[row], csr_.indptr[row + 1] - csr_.indptr[row]};
  }
  const CsrMatrix& csr() const { return csr_; }
  const std::vector<double>& dense_values() const { return dense_; }

  /// Calls f(col, value) for every stored non-zero of a row, in column order.
  template <typename F>
  void for_each_nonzero(std::size_t row, F&& f) const {
    if (sparse_) {
      for (std::size_t k = csr_.indptr[row]; k < csr_.indptr[row + 1]; ++k) f(csr_.indices[k], csr_.values[k]);
    } else {
      const double* r = dense_.data() + row * cols_;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (r[c] != 0.0) f(static_cast<std::uint32_t>(c), r[c]);
      }
    }
  }

  Matrix select_rows(std::span<const std::size_t> rows) const;
  /// Copy whose column `col` at row i holds the original value at perm[i].
  Matrix with_permuted_column(std::size_t col, std::span<const std::size_t> perm) const;
  bool has_non_finite() const;

 private:
  bool sparse_ = false;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> dense_;
  CsrMatrix csr_;
};

/// Per-column non-zero entries sorted by value (ties by row); the implicit
/// zeros are whatever rows a column does not list.
struct ColumnStore {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> colptr;
  std::vector<std::uint32_t> row_ids;
  std::vector<double> values;

  static ColumnStore build(const Matrix& x);
};

/// svmlight text ("label idx:value ...", zero-based indices) preceded by a
/// "# dim N" line so trailing all-zero columns survive a round trip.
void save_svmlight(const CsrMatrix& x, std::span<const int> labels, const std::filesystem::path& path);
std::pair<CsrMatrix, std::vector<int>> load_svmlight(const std::filesystem::path& path);

}  // namespace dupliq::learn
