#include "lubrex/partition_basis.hpp"

#include <algorithm>
#include <map>

#include "lubrex/errors.hpp"

namespace lubrex {

namespace {

// Last slot down to first, strictly increasing column order.
bool tuple_less(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  for (std::size_t s = a.size(); s-- > 0;) {
    if (a[s] != b[s]) return a[s] < b[s];
  }
  return false;
}

}  // namespace

bool is_valid_tuple(std::span<const std::uint8_t> t, int k) {
  if (static_cast<int>(t.size()) != k + 1) return false;
  std::int64_t sdeg = 0, hpow = 0;
  for (int j = 1; j <= k; ++j) {
    sdeg += static_cast<std::int64_t>(j) * t[static_cast<std::size_t>(j)];
    hpow += static_cast<std::int64_t>(j - 1) * t[static_cast<std::size_t>(j)];
  }
  return sdeg == k && hpow == t[0];
}

std::int64_t partition_count(int k) {
  // Same d_k = d_k + d_{k-j} bookkeeping as the basis generation loop.
  std::vector<std::int64_t> d(static_cast<std::size_t>(k) + 1, 1);
  for (int j = 2; j <= k; ++j) {
    for (int m = j; m <= k; ++m) d[m] += d[m - j];
  }
  return d[static_cast<std::size_t>(k)];
}

Basis::Basis(int k, std::vector<std::uint8_t> slots)
    : k_(k), dim_(static_cast<std::int64_t>(slots.size()) / (k + 1)), slots_(std::move(slots)) {}

std::int64_t Basis::index_of(std::span<const std::uint8_t> t) const {
  if (!is_valid_tuple(t, k_)) {
    throw Error(ErrorCode::NotInBasis, "tuple violates superdegree-" + std::to_string(k_) +
                                           " basis invariants");
  }
  std::int64_t lo = 0, hi = dim_;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (tuple_less(tuple(mid), t)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo == dim_ || tuple_less(t, tuple(lo))) {
    throw Error(ErrorCode::NotInBasis, "tuple not present in basis");
  }
  return lo;
}

BasisSet::BasisSet(int k_max) {
  // Working sets: per k, a growing list of tuples (flat, length k+1 each).
  std::vector<std::vector<std::uint8_t>> work(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    std::vector<std::uint8_t> t(static_cast<std::size_t>(k) + 1, 0);
    if (k >= 1) t[1] = static_cast<std::uint8_t>(k);  // t_1^k
    work[static_cast<std::size_t>(k)] = std::move(t);
  }
  for (int j = 2; j <= k_max; ++j) {
    for (int k = j; k <= k_max; ++k) {
      const auto& src = work[static_cast<std::size_t>(k - j)];
      auto& dst = work[static_cast<std::size_t>(k)];
      const int src_len = k - j + 1;
      const int dst_len = k + 1;
      const std::int64_t n_src = static_cast<std::int64_t>(src.size()) / src_len;
      // t_j * phi: copy, pad, bump slot j and the h-power slot.
      for (std::int64_t c = 0; c < n_src; ++c) {
        std::vector<std::uint8_t> t(static_cast<std::size_t>(dst_len), 0);
        std::copy_n(src.data() + c * src_len, src_len, t.data());
        t[static_cast<std::size_t>(j)] += 1;
        t[0] += static_cast<std::uint8_t>(j - 1);
        dst.insert(dst.end(), t.begin(), t.end());
      }
    }
  }
  bases_.reserve(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    auto& flat = work[static_cast<std::size_t>(k)];
    const int len = k + 1;
    const std::int64_t n = static_cast<std::int64_t>(flat.size()) / len;
    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
      return tuple_less({flat.data() + a * len, static_cast<std::size_t>(len)},
                        {flat.data() + b * len, static_cast<std::size_t>(len)});
    });
    std::vector<std::uint8_t> sorted(flat.size());
    for (std::int64_t i = 0; i < n; ++i) {
      std::copy_n(flat.data() + order[static_cast<std::size_t>(i)] * len, len,
                  sorted.data() + i * len);
    }
    flat.clear();
    flat.shrink_to_fit();
    bases_.emplace_back(k, std::move(sorted));
  }
}

OperatorTable::OperatorTable(const BasisSet& bases, int k_top) : k_top_(k_top) {
  dims_.resize(static_cast<std::size_t>(k_top) + 1);
  for (int k = 0; k <= k_top; ++k) dims_[static_cast<std::size_t>(k)] = bases.at(k).dim();
  layers_.resize(static_cast<std::size_t>(k_top));
  for (int k = 0; k < k_top; ++k) {
    const Basis& src = bases.at(k);
    const Basis& dst = bases.at(k + 1);
    Layer& L = layers_[static_cast<std::size_t>(k)];
    const std::int64_t n = src.dim();
    L.dx_ptr.resize(static_cast<std::size_t>(n) + 1, 0);
    L.hx_row.resize(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> t(static_cast<std::size_t>(k) + 2);
    for (std::int64_t j = 0; j < n; ++j) {
      auto s = src.tuple(j);
      std::copy(s.begin(), s.end(), t.begin());
      t[static_cast<std::size_t>(k) + 1] = 0;

      // h_x * phi
      t[1] += 1;
      L.hx_row[static_cast<std::size_t>(j)] = dst.index_of(t);
      t[1] -= 1;

      // h d/dx phi: for each occupied slot r (including r = 0), coefficient
      // i_r (r+1), target bumps slot r+1 and the h-power slot.
      for (int r = 0; r <= k; ++r) {
        const int ir = t[static_cast<std::size_t>(r)];
        if (ir == 0) continue;
        t[0] += 1;
        t[static_cast<std::size_t>(r)] -= 1;
        t[static_cast<std::size_t>(r) + 1] += 1;
        L.dx_row.push_back(dst.index_of(t));
        L.dx_coef.push_back(static_cast<std::int32_t>(ir) * (r + 1));
        t[static_cast<std::size_t>(r) + 1] -= 1;
        t[static_cast<std::size_t>(r)] += 1;
        t[0] -= 1;
      }
      L.dx_ptr[static_cast<std::size_t>(j) + 1] = static_cast<std::int64_t>(L.dx_row.size());
    }
  }
}

Rational SparseOperator::entry(std::int64_t i, std::int64_t j) const {
  for (std::int64_t e = col_ptr[static_cast<std::size_t>(j)];
       e < col_ptr[static_cast<std::size_t>(j) + 1]; ++e) {
    if (row_idx[static_cast<std::size_t>(e)] == i) return value[static_cast<std::size_t>(e)];
  }
  return Rational(0);
}

SparseOperator build_operator(const BasisSet& bases, OperatorKind kind, int k,
                              const Rational& c) {
  const Basis& src = bases.at(k);
  const Basis& dst = bases.at(k + 1);
  SparseOperator op;
  op.kind = kind;
  op.source_k = k;
  op.rows = dst.dim();
  op.cols = src.dim();
  op.shift = (kind == OperatorKind::shifted) ? c : Rational(0);
  op.col_ptr.resize(static_cast<std::size_t>(op.cols) + 1, 0);

  std::vector<std::uint8_t> t(static_cast<std::size_t>(k) + 2);
  std::map<std::int64_t, Rational> col;
  for (std::int64_t j = 0; j < op.cols; ++j) {
    col.clear();
    auto s = src.tuple(j);
    std::copy(s.begin(), s.end(), t.begin());
    t[static_cast<std::size_t>(k) + 1] = 0;

    if (kind == OperatorKind::h_dx || kind == OperatorKind::shifted) {
      for (int r = 0; r <= k; ++r) {
        const int ir = t[static_cast<std::size_t>(r)];
        if (ir == 0) continue;
        t[0] += 1;
        t[static_cast<std::size_t>(r)] -= 1;
        t[static_cast<std::size_t>(r) + 1] += 1;
        col[dst.index_of(t)] += Rational(ir * (r + 1));
        t[static_cast<std::size_t>(r) + 1] -= 1;
        t[static_cast<std::size_t>(r)] += 1;
        t[0] -= 1;
      }
    }
    if (kind == OperatorKind::hx_mult || kind == OperatorKind::shifted) {
      const Rational w = (kind == OperatorKind::hx_mult) ? Rational(1) : -c;
      t[1] += 1;
      col[dst.index_of(t)] += w;
      t[1] -= 1;
    }
    for (auto& [row, val] : col) {
      if (val == 0) continue;
      op.row_idx.push_back(row);
      op.value.push_back(val);
    }
    op.col_ptr[static_cast<std::size_t>(j) + 1] = static_cast<std::int64_t>(op.row_idx.size());
  }
  return op;
}

}  // namespace lubrex
