#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lubrex/rational.hpp"

namespace lubrex {

/// A monomial of the graded algebra generated by t_j = (1/j!) h^{j-1} d^j h,
/// encoded as the (k+1)-tuple (i_0, i_1, ..., i_k):
///
///   phi = h^{i_0} * prod_j (d^j h / j!)^{i_j},
///
/// subject to the superdegree condition i_1 + 2 i_2 + ... + k i_k = k and the
/// h-power bookkeeping i_0 = i_2 + 2 i_3 + ... + (k-1) i_k. The slot i_0 is
/// redundant but stored and validated.
using BasisElement = std::vector<std::uint8_t>;

/// Returns true if `t` is a valid superdegree-k tuple (both conditions above).
bool is_valid_tuple(std::span<const std::uint8_t> t, int k);

/// Number of integer partitions of k (the dimension d_k). Computed with the
/// same incremental counting loop that generates the bases.
std::int64_t partition_count(int k);

/// Canonical basis of the superdegree-k subspace: d_k tuples of length k+1,
/// stored column-major and sorted lexicographically from the last slot down
/// to the first. Column 1 (1-based) is always the pure-h_x tuple (0,k,0,...).
class Basis {
 public:
  Basis() = default;
  Basis(int k, std::vector<std::uint8_t> slots);

  int k() const { return k_; }
  std::int64_t dim() const { return dim_; }
  int tuple_len() const { return k_ + 1; }

  std::span<const std::uint8_t> tuple(std::int64_t col) const {  // 0-based column
    return {slots_.data() + col * tuple_len(), static_cast<std::size_t>(tuple_len())};
  }

  /// 0-based column of `t`; throws Error(NotInBasis) if invalid or absent.
  /// Binary search, so O(log d_k).
  std::int64_t index_of(std::span<const std::uint8_t> t) const;

 private:
  int k_ = 0;
  std::int64_t dim_ = 0;
  std::vector<std::uint8_t> slots_;  // dim * (k+1), column-major
};

/// 1-based column index, the contract used throughout the matrix formulas.
inline std::int64_t basis_index(const Basis& b, std::span<const std::uint8_t> t) {
  return b.index_of(t) + 1;
}

/// All bases for 0 <= k <= k_max, generated by the incremental set-union
/// loop (seed each Phi_k with t_1^k, then fold in t_j products for j >= 2).
class BasisSet {
 public:
  explicit BasisSet(int k_max);

  int k_max() const { return static_cast<int>(bases_.size()) - 1; }
  const Basis& at(int k) const { return bases_[static_cast<std::size_t>(k)]; }

 private:
  std::vector<Basis> bases_;
};

enum class OperatorKind { h_dx, hx_mult, shifted };

/// Sparse integer matrix of shape d_{k+1} x d_k mapping superdegree k to k+1.
/// Stored by source column. `shifted` means h*d/dx - c * (h_x multiplication)
/// and its entries are exactly (h_dx entries) - c * (hx_mult entries).
struct SparseOperator {
  OperatorKind kind = OperatorKind::h_dx;
  int source_k = 0;
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  Rational shift;  // c, only meaningful for kind == shifted

  std::vector<std::int64_t> col_ptr;  // size cols+1
  std::vector<std::int64_t> row_idx;
  std::vector<Rational> value;

  Rational entry(std::int64_t i, std::int64_t j) const;
};

/// The two primitive operators for every superdegree below k_max, in a flat
/// integer-coefficient form tuned for the row recursion (coefficients of
/// h_dx are i_r (r+1); hx_mult is a single unit entry per column).
class OperatorTable {
 public:
  OperatorTable(const BasisSet& bases, int k_top);  // operators for 0 <= k < k_top

  int k_top() const { return k_top_; }

  /// out += h_dx applied to v (v over Phi_k, out over Phi_{k+1}).
  template <class T>
  void apply_h_dx(int k, std::span<const T> v, std::span<T> out) const;

  /// out += (h_x .) applied to v.
  template <class T>
  void apply_hx(int k, std::span<const T> v, std::span<T> out) const;

  /// out = (h_dx - c * hx_mult) v, the shifted operator used by every row of
  /// the matrix recursion.
  template <class T>
  void apply_shifted(int k, std::int64_t c, std::span<const T> v, std::span<T> out) const;

  std::int64_t dim(int k) const { return dims_[static_cast<std::size_t>(k)]; }

  struct Layer {
    // h_dx, by source column
    std::vector<std::int64_t> dx_ptr;
    std::vector<std::int64_t> dx_row;
    std::vector<std::int32_t> dx_coef;
    // hx_mult: one target row per source column
    std::vector<std::int64_t> hx_row;
  };
  const Layer& layer(int k) const { return layers_[static_cast<std::size_t>(k)]; }

 private:
  int k_top_;
  std::vector<std::int64_t> dims_;  // d_k for 0 <= k <= k_top
  std::vector<Layer> layers_;       // index k: maps k -> k+1
};

/// Materializes one operator as a sparse matrix (spec surface; the recursion
/// itself uses OperatorTable). `c` is ignored unless kind == shifted.
SparseOperator build_operator(const BasisSet& bases, OperatorKind kind, int k,
                              const Rational& c = Rational(0));

// --- template bodies ---

template <class T>
void OperatorTable::apply_h_dx(int k, std::span<const T> v, std::span<T> out) const {
  const Layer& L = layers_[static_cast<std::size_t>(k)];
  const std::int64_t n = dim(k);
  for (std::int64_t j = 0; j < n; ++j) {
    if (v[j] == T(0)) continue;
    for (std::int64_t e = L.dx_ptr[j]; e < L.dx_ptr[j + 1]; ++e) {
      out[L.dx_row[e]] += ScalarTraits<T>::from_int(L.dx_coef[e]) * v[j];
    }
  }
}

template <class T>
void OperatorTable::apply_hx(int k, std::span<const T> v, std::span<T> out) const {
  const Layer& L = layers_[static_cast<std::size_t>(k)];
  const std::int64_t n = dim(k);
  for (std::int64_t j = 0; j < n; ++j) {
    if (v[j] == T(0)) continue;
    out[L.hx_row[j]] += v[j];
  }
}

template <class T>
void OperatorTable::apply_shifted(int k, std::int64_t c, std::span<const T> v,
                                  std::span<T> out) const {
  for (auto& x : out) x = T(0);
  const Layer& L = layers_[static_cast<std::size_t>(k)];
  const std::int64_t n = dim(k);
  const T cs = ScalarTraits<T>::from_int(c);
  for (std::int64_t j = 0; j < n; ++j) {
    if (v[j] == T(0)) continue;
    for (std::int64_t e = L.dx_ptr[j]; e < L.dx_ptr[j + 1]; ++e) {
      out[L.dx_row[e]] += ScalarTraits<T>::from_int(L.dx_coef[e]) * v[j];
    }
    out[L.hx_row[j]] -= cs * v[j];
  }
}

}  // namespace lubrex
