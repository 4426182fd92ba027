#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "irrhodge/matrix.hpp"

namespace irrhodge {

// Subspaces of K^n are represented by matrices whose columns span them
// (columns need not be independent unless stated).  All operations return
// column-matrices again.

template <class K>
Matrix<K> subspace_sum(const Matrix<K>& a, const Matrix<K>& b) {
  if (a.nr != b.nr) throw std::invalid_argument("subspace_sum: ambient mismatch");
  return image_basis(hstack(a, b));
}

// Basis of span(a) ∩ span(b): kernel of [a | -b] projected through a.
template <class K>
Matrix<K> subspace_intersect(const Matrix<K>& a, const Matrix<K>& b) {
  if (a.nr != b.nr) throw std::invalid_argument("subspace_intersect: ambient mismatch");
  Matrix<K> k = kernel_basis(hstack(a, negate(b)));
  // top block (a-coordinates) of each kernel column, mapped through a
  Matrix<K> top(a.nc, k.nc);
  for (int i = 0; i < a.nc; ++i) top.rows[i] = k.rows[i];
  return image_basis(mul(a, top));
}

template <class K>
bool subspace_contains_vector(const Matrix<K>& a, const std::vector<K>& v) {
  return solve(a, v).has_value();
}

// span(b) ⊆ span(a)?
template <class K>
bool subspace_contains(const Matrix<K>& a, const Matrix<K>& b) {
  if (a.nr != b.nr) throw std::invalid_argument("subspace_contains: ambient mismatch");
  int ra = rank(a);
  return rank(hstack(a, b)) == ra;
}

template <class K>
bool subspace_equal(const Matrix<K>& a, const Matrix<K>& b) {
  int ra = rank(a), rb = rank(b);
  return ra == rb && rank(hstack(a, b)) == ra;
}

// {x : d x ∈ span(w)} as a column basis (for spectral-sequence Z-terms).
template <class K>
Matrix<K> preimage(const Matrix<K>& d, const Matrix<K>& w) {
  if (d.nr != w.nr) throw std::invalid_argument("preimage: ambient mismatch");
  Matrix<K> k = kernel_basis(hstack(d, negate(w)));
  Matrix<K> top(d.nc, k.nc);
  for (int i = 0; i < d.nc; ++i) top.rows[i] = k.rows[i];
  return image_basis(top);
}

// A subquotient span(z)/span(b) of K^n with b ⊆ z (checked on construction).
// Representatives are the columns of z completing a column basis of b; the
// coordinate map solves against [basis(b) | reps].
template <class K>
struct Subquotient {
  int n = 0;
  Matrix<K> z, b;      // given spanning sets
  Matrix<K> b_basis;   // independent columns of b
  Matrix<K> reps;      // columns of z completing b_basis to a basis of span(z)
  Matrix<K> coord_mat; // hstack(b_basis, reps)

  Subquotient() = default;
  Subquotient(Matrix<K> z_, Matrix<K> b_) : n(z_.nr), z(std::move(z_)), b(std::move(b_)) {
    if (b.nr != n) throw std::invalid_argument("Subquotient: ambient mismatch");
    b_basis = image_basis(b);
    if (!subspace_contains(z, b)) throw std::invalid_argument("Subquotient: b not inside z");
    auto [m, cols] = image_basis_cols(hstack(b_basis, z));
    reps = Matrix<K>(n, 0);
    for (size_t i = 0; i < cols.size(); ++i) {
      int cidx = cols[i];
      if (cidx >= b_basis.nc) {
        // column cidx - b_basis.nc of z
        Matrix<K> colm(n, 1);
        colm.set_col(0, z.col(cidx - b_basis.nc));
        reps = hstack(reps, colm);
      }
    }
    coord_mat = hstack(b_basis, reps);
  }

  int dim() const { return reps.nc; }

  // Coordinates of v (which must lie in span(z)) w.r.t. the representative
  // classes; the b-part of the solution is discarded.
  std::vector<K> coords(const std::vector<K>& v) const {
    auto sol = solve(coord_mat, v);
    if (!sol) throw std::invalid_argument("Subquotient::coords: vector not in z");
    return std::vector<K>(sol->begin() + b_basis.nc, sol->end());
  }

  std::vector<K> rep(int i) const { return reps.col(i); }
};

// Matrix of a linear map span(z1)/span(b1) -> span(z2)/span(b2) induced by
// the ambient map `f` (must send z1 into z2 and b1 into b2; the solve inside
// coords() fails loudly otherwise).
template <class K>
Matrix<K> induced_map(const Subquotient<K>& src, const Subquotient<K>& dst, const Matrix<K>& f) {
  Matrix<K> m(dst.dim(), src.dim());
  for (int i = 0; i < src.dim(); ++i) {
    std::vector<K> img = mat_apply(f, src.rep(i));
    m.set_col(i, dst.coords(img));
  }
  return m;
}

}  // namespace irrhodge
