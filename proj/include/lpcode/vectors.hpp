#pragma once

#include <cstdint>
#include <vector>

namespace lpcode {

using DenseVector = std::vector<double>;

/// Sorted-index sparse vector with an explicit dimension.
struct SparseVector {
  std::uint32_t dim = 0;
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  std::size_t nnz() const { return index.size(); }
};

inline std::size_t dimension(const DenseVector& v) { return v.size(); }
inline std::size_t dimension(const SparseVector& v) { return v.dim; }

template <typename F>
void for_each_nonzero(const DenseVector& v, F&& f) {
  for (std::size_t j = 0; j < v.size(); ++j)
    if (v[j] != 0) f(j, v[j]);
}

template <typename F>
void for_each_nonzero(const SparseVector& v, F&& f) {
  for (std::size_t k = 0; k < v.index.size(); ++k) f(static_cast<std::size_t>(v.index[k]), v.value[k]);
}

inline double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0;
  std::size_t i = 0, j = 0;
  while (i < a.index.size() && j < b.index.size()) {
    if (a.index[i] < b.index[j]) {
      ++i;
    } else if (a.index[i] > b.index[j]) {
      ++j;
    } else {
      s += a.value[i++] * b.value[j++];
    }
  }
  return s;
}

/// [a, b] with b's indices shifted by a.dim.
inline SparseVector concat(const SparseVector& a, const SparseVector& b) {
  SparseVector out;
  out.dim = a.dim + b.dim;
  out.index = a.index;
  out.value = a.value;
  for (std::size_t k = 0; k < b.index.size(); ++k) {
    out.index.push_back(b.index[k] + a.dim);
    out.value.push_back(b.value[k]);
  }
  return out;
}

}  // namespace lpcode
