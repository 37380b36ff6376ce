#include "dupliq/learn/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "dupliq/common.hpp"

namespace dupliq::learn {

void CsrMatrix::add_row(std::span<const std::pair<std::uint32_t, double>> entries) {
  long long previous = -1;
  for (const auto& [col, value] : entries) {
    if (static_cast<long long>(col) <= previous) throw ContractError("sparse row indices must increase");
    if (col >= cols) throw ContractError("sparse column index out of range");
    previous = col;
    if (value == 0.0) continue;
    indices.push_back(col);
    values.push_back(value);
  }
  indptr.push_back(indices.size());
  ++rows;
}

Matrix Matrix::dense(std::size_t rows, std::size_t cols, std::vector<double> values) {
  if (values.size() != rows * cols) throw ContractError("dense matrix size mismatch");
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.dense_ = std::move(values);
  return m;
}

Matrix Matrix::sparse(CsrMatrix csr) {
  if (csr.indptr.size() != csr.rows + 1) throw ContractError("csr indptr size mismatch");
  Matrix m;
  m.sparse_ = true;
  m.rows_ = csr.rows;
  m.cols_ = csr.cols;
  m.csr_ = std::move(csr);
  return m;
}

double Matrix::at(std::size_t row, std::size_t col) const {
  if (!sparse_) return dense_[row * cols_ + col];
  const auto first = csr_.indices.begin() + static_cast<std::ptrdiff_t>(csr_.indptr[row]);
  const auto last = csr_.indices.begin() + static_cast<std::ptrdiff_t>(csr_.indptr[row + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(col));
  if (it == last || *it != col) return 0.0;
  return csr_.values[static_cast<std::size_t>(it - csr_.indices.begin())];
}

Matrix Matrix::select_rows(std::span<const std::size_t> rows) const {
  if (!sparse_) {
    std::vector<double> values;
    values.reserve(rows.size() * cols_);
    for (std::size_t r : rows) {
      const auto row = dense_row(r);
      values.insert(values.end(), row.begin(), row.end());
    }
    return dense(rows.size(), cols_, std::move(values));
  }
  CsrMatrix out;
  out.cols = cols_;
  for (std::size_t r : rows) {
    for (std::size_t k = csr_.indptr[r]; k < csr_.indptr[r + 1]; ++k) {
      out.indices.push_back(csr_.indices[k]);
      out.values.push_back(csr_.values[k]);
    }
    out.indptr.push_back(out.indices.size());
    ++out.rows;
  }
  return sparse(std::move(out));
}

Matrix Matrix::with_permuted_column(std::size_t col, std::span<const std::size_t> perm) const {
  if (perm.size() != rows_) throw ContractError("permutation length mismatch");
  if (!sparse_) {
    Matrix out = *this;
    for (std::size_t r = 0; r < rows_; ++r) out.dense_[r * cols_ + col] = dense_[perm[r] * cols_ + col];
    return out;
  }
  CsrMatrix out;
  out.cols = cols_;
  std::vector<std::pair<std::uint32_t, double>> entries;
  for (std::size_t r = 0; r < rows_; ++r) {
    entries.clear();
    for (std::size_t k = csr_.indptr[r]; k < csr_.indptr[r + 1]; ++k) {
      if (csr_.indices[k] != col) entries.emplace_back(csr_.indices[k], csr_.values[k]);
    }
    const double moved = at(perm[r], col);
    if (moved != 0.0) {
      const auto pos = std::lower_bound(entries.begin(), entries.end(),
                                        std::pair<std::uint32_t, double>(static_cast<std::uint32_t>(col), -INFINITY));
      entries.insert(pos, {static_cast<std::uint32_t>(col), moved});
    }
    out.add_row(entries);
  }
  return sparse(std::move(out));
}

bool Matrix::has_non_finite() const {
  const auto& v = sparse_ ? csr_.values : dense_;
  return std::any_of(v.begin(), v.end(), [](double x) { return !std::isfinite(x); });
}

ColumnStore ColumnStore::build(const Matrix& x) {
  ColumnStore store;
  store.rows = x.rows();
  store.cols = x.cols();
  std::vector<std::size_t> counts(x.cols() + 1, 0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    x.for_each_nonzero(r, [&](std::uint32_t c, double) { ++counts[c + 1]; });
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  store.colptr = counts;
  store.row_ids.resize(counts.back());
  store.values.resize(counts.back());
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    x.for_each_nonzero(r, [&](std::uint32_t c, double v) {
      const std::size_t slot = cursor[c]++;
      store.row_ids[slot] = static_cast<std::uint32_t>(r);
      store.values[slot] = v;
    });
  }
  std::vector<std::size_t> order;
  std::vector<std::uint32_t> rows_tmp;
  std::vector<double> values_tmp;
  for (std::size_t c = 0; c < store.cols; ++c) {
    const std::size_t begin = store.colptr[c];
    const std::size_t end = store.colptr[c + 1];
    order.resize(end - begin);
    std::iota(order.begin(), order.end(), begin);
    // Rows were inserted in ascending order, so a stable sort keeps row ties ordered.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return store.values[a] < store.values[b]; });
    rows_tmp.resize(order.size());
    values_tmp.resize(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      rows_tmp[k] = store.row_ids[order[k]];
      values_tmp[k] = store.values[order[k]];
    }
    std::copy(rows_tmp.begin(), rows_tmp.end(), store.row_ids.begin() + static_cast<std::ptrdiff_t>(begin));
    std::copy(values_tmp.begin(), values_tmp.end(), store.values.begin() + static_cast<std::ptrdiff_t>(begin));
  }
  return store;
}

void save_svmlight(const CsrMatrix& x, std::span<const int> labels, const std::filesystem::path& path) {
  if (labels.size() != x.rows) throw ContractError("label count does not match rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# dim " << x.cols << '\n';
  std::string line;
  for (std::size_t r = 0; r < x.rows; ++r) {
    line = labels[r] ? "1" : "0";
    for (std::size_t k = x.indptr[r]; k < x.indptr[r + 1]; ++k) {
      line += ' ';
      line += std::to_string(x.indices[k]);
      line += ':';
      line += format_double(x.values[k]);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::pair<CsrMatrix, std::vector<int>> load_svmlight(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("# dim ", 0) != 0) {
    throw ContractError(path.string() + ": missing '# dim N' header");
  }
  CsrMatrix x;
  x.cols = static_cast<std::size_t>(parse_integer(std::string_view(line).substr(6), "svmlight header"));
  std::vector<int> labels;
  std::vector<std::pair<std::uint32_t, double>> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + " line " + std::to_string(line_no);
    std::string_view rest(line);
    const std::size_t space = rest.find(' ');
    const std::string_view label = rest.substr(0, space);
    if (label != "0" && label != "1") throw ContractError(where + ": label must be 0 or 1");
    labels.push_back(label == "1");
    entries.clear();
    rest = space == std::string_view::npos ? std::string_view() : rest.substr(space + 1);
    while (!rest.empty()) {
      const std::size_t next = rest.find(' ');
      const std::string_view item = rest.substr(0, next);
      rest = next == std::string_view::npos ? std::string_view() : rest.substr(next + 1);
      if (item.empty()) continue;
      const std::size_t colon = item.find(':');
      if (colon == std::string_view::npos) throw ContractError(where + ": malformed entry");
      entries.emplace_back(static_cast<std::uint32_t>(parse_integer(item.substr(0, colon), where)),
                           parse_double(item.substr(colon + 1), where));
    }
    x.add_row(entries);
  }
  return {std::move(x), std::move(labels)};
}

}  // namespace dupliq::learn
