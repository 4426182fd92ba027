#pragma once

#include <string>
#include <vector>

#include "irrhodge/filtered.hpp"
#include "irrhodge/prng.hpp"
#include "irrhodge/rees.hpp"
#include "irrhodge/spectral.hpp"

namespace irrhodge {

// Random invertible square matrix together with its inverse, built as a
// product of elementary operations so both sides stay exact.
inline std::pair<Matrix<Rat>, Matrix<Rat>> random_invertible(SplitMix64& rng, int n) {
  Matrix<Rat> t = Matrix<Rat>::identity(n);
  Matrix<Rat> tinv = Matrix<Rat>::identity(n);
  int ops = 2 * n + (int)rng.below(4);
  for (int s = 0; s < ops && n > 1; ++s) {
    int i = (int)rng.below((uint64_t)n);
    int j = (int)rng.below((uint64_t)n);
    if (i == j) continue;
    Rat c = ratio((long)rng.range(-3, 3), 1 + (long)rng.below(2));
    if (is_zero(c)) continue;
    // row_i += c * row_j on t;  row_j -= c * row_i on tinv (inverse op order
    // reversed, but elementary inverses commute into the running product).
    for (auto& [col, v] : t.rows[j]) t.add_to(i, col, c * v);
    for (int r = 0; r < n; ++r) {
      Rat v = tinv.at(r, i);
      if (!is_zero(v)) tinv.add_to(r, j, -c * v);
    }
  }
  return {t, tinv};
}

// Random cochain complex in degrees 0..3: a direct sum of dots and elementary
// two-term intervals, conjugated by random invertible changes of basis.
inline CochainComplex<Rat> random_complex(SplitMix64& rng, int max_total_dim) {
  const int span = 4;
  std::vector<int> dims(span, 0);
  // Model differential ranks: r[k] arrows C^k -> C^{k+1}.
  std::vector<int> arrows(span - 1, 0);
  int total = 1 + (int)rng.below((uint64_t)max_total_dim);
  int used = 0;
  while (used < total) {
    int k = (int)rng.below(span);
    bool interval = (k + 1 < span) && used + 2 <= total && rng.below(2) == 0;
    if (interval) {
      dims[k]++;
      dims[k + 1]++;
      arrows[k]++;
      used += 2;
    } else {
      dims[k]++;
      used += 1;
    }
  }

  CochainComplex<Rat> c;
  c.lo = 0;
  c.dims = dims;
  // Model d: the first arrows[k] dimensions of C^k map to the last arrows[k]
  // dimensions of C^{k+1} (disjoint from the sources of d_{k+1}, so d^2 = 0).
  std::vector<Matrix<Rat>> model;
  for (int k = 0; k + 1 < span; ++k) {
    Matrix<Rat> m(dims[k + 1], dims[k]);
    for (int a = 0; a < arrows[k]; ++a) m.rows[dims[k + 1] - arrows[k] + a][a] = Rat(1);
    model.push_back(m);
  }
  // Targets occupy the tail of C^{k+1}; sources occupy the head of C^{k+1}.
  // d_{k+1} d_k = 0 needs target-of-d_k ∩ source-of-d_{k+1} = ∅:
  for (int k = 0; k + 2 < span; ++k)
    if (arrows[k] + arrows[k + 1] > dims[k + 1]) {
      // Not enough room; drop arrows at k+1 until disjoint.
      int excess = arrows[k] + arrows[k + 1] - dims[k + 1];
      Matrix<Rat> m(dims[k + 2], dims[k + 1]);
      for (int a = 0; a < arrows[k + 1] - excess; ++a)
        m.rows[dims[k + 2] - arrows[k + 1] + a][a] = Rat(1);
      model[k + 1] = m;
      arrows[k + 1] -= excess;
    }

  std::vector<Matrix<Rat>> t, tinv;
  for (int k = 0; k < span; ++k) {
    auto [a, b] = random_invertible(rng, dims[k]);
    t.push_back(a);
    tinv.push_back(b);
  }
  for (int k = 0; k + 1 < span; ++k) c.d.push_back(mul(t[k + 1], mul(model[k], tinv[k])));
  c.validate();
  return c;
}

// Random filtration by subcomplexes on top of `base`: levels Λ ⊂ {0,..,3} (or
// half-integers), built deepest-up, each level the d-closure of the previous
// level plus a few random vectors; level 0 forced to be everything.
inline FilteredComplex<Rat> random_filtered_complex(SplitMix64& rng, int max_total_dim) {
  FilteredComplex<Rat> fc;
  fc.base = random_complex(rng, max_total_dim);
  int t = 1 + (int)rng.below(4);
  bool halves = rng.below(4) == 0;
  std::vector<Rat> pool;
  for (int i = 0; i < 8; ++i) {
    Rat v = halves ? ratio(i, 2) : Rat(i);
    if ((halves && i < 8) || (!halves && i < 4)) pool.push_back(v);
  }
  // choose t distinct sorted values from the pool
  std::vector<Rat> lambdas;
  while ((int)lambdas.size() < t && !pool.empty()) {
    size_t idx = rng.below(pool.size());
    lambdas.push_back(pool[idx]);
    pool.erase(pool.begin() + (long)idx);
  }
  std::sort(lambdas.begin(), lambdas.end());
  fc.lambdas = lambdas;
  t = (int)lambdas.size();

  int span = (int)fc.base.dims.size();
  fc.fil.assign(t, std::vector<Matrix<Rat>>());
  std::vector<Matrix<Rat>> prev;  // deeper level (or empty for the deepest)
  for (int i = t - 1; i >= 0; --i) {
    std::vector<Matrix<Rat>> cur;
    for (int kk = 0; kk < span; ++kk) {
      int n = fc.base.dims[kk];
      Matrix<Rat> seed = prev.empty() ? Matrix<Rat>(n, 0) : prev[kk];
      int extra = (i == 0) ? n : (int)rng.below(3);
      Matrix<Rat> add(n, extra);
      for (int cidx = 0; cidx < extra; ++cidx) {
        if (i == 0) {
          add.rows[cidx][cidx] = Rat(1);  // force full space at the top level
        } else {
          for (int r = 0; r < n; ++r) {
            long num = (long)rng.range(-2, 2);
            if (num != 0) add.rows[r][cidx] = Rat(num);
          }
        }
      }
      cur.push_back(image_basis(hstack(seed, add)));
    }
    // close under d, ascending through the degrees
    for (int kk = 0; kk + 1 < span; ++kk) {
      Matrix<Rat> img = mul(fc.base.d[kk], cur[kk]);
      cur[kk + 1] = image_basis(hstack(cur[kk + 1], img));
    }
    fc.fil[i] = cur;
    prev = cur;
  }
  fc.validate();
  return fc;
}

// The three equivalent formulations of E1-degeneration, each computed by an
// independent mechanism.  Returns per-criterion verdicts plus agreement.
struct TripleVerdict {
  bool strict = false;       // every H^k(F^λ) -> H^k injective
  bool e1_counts = false;    // Σ dim E_1 == Σ dim H
  bool rees_free = false;    // Rees cohomology h-torsion-free
  int e1_total = 0;
  int h_total = 0;
  int torsion_exponent = 0;
  bool agree() const { return strict == e1_counts && e1_counts == rees_free; }
};

inline TripleVerdict triple_equivalence(const FilteredComplex<Rat>& fc) {
  TripleVerdict v;
  v.strict = e1_degenerates(fc).degenerates;
  SpectralPage<Rat> e1 = spectral_page(fc, 1);
  v.e1_total = e1.total();
  v.h_total = fc.base.total_cohomology();
  v.e1_counts = (v.e1_total == v.h_total);
  ReesReport<Rat> rr = rees_report(fc);
  v.rees_free = rr.torsion_free;
  v.torsion_exponent = rr.torsion_exponent;
  return v;
}

}  // namespace irrhodge
