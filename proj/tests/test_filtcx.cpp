#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "irrhodge/filt_fuzz.hpp"
#include "irrhodge/filt_json.hpp"
#include "irrhodge/filtered.hpp"
#include "irrhodge/rees.hpp"
#include "irrhodge/spectral.hpp"

using namespace irrhodge;

namespace {

Matrix<Rat> dense(int nr, int nc, std::vector<std::vector<long>> rows) {
  Matrix<Rat> m(nr, nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j)
      if (rows[i][j] != 0) m.rows[i][j] = Rat(rows[i][j]);
  return m;
}

// The minimal strictness failure: 0 -> <a> -d-> <b> -> 0 with d(a)=b, filtered
// by F^0 = everything, F^1 = (0 -> <b>).
FilteredComplex<Rat> two_term_nondegenerate() {
  FilteredComplex<Rat> fc;
  fc.base.lo = 0;
  fc.base.dims = {1, 1};
  fc.base.d = {dense(1, 1, {{1}})};
  fc.lambdas = {Rat(0), Rat(1)};
  fc.fil = {
      {dense(1, 1, {{1}}), dense(1, 1, {{1}})},  // F^0 full
      {Matrix<Rat>(1, 0), dense(1, 1, {{1}})},   // F^1: zero -> <b>
  };
  fc.validate();
  return fc;
}

// Column filtration of a small double complex: column 0 is K -1-> K, column 1
// is K -0-> K, no horizontal maps.  Total degrees 0..2.
FilteredComplex<Rat> column_filtered_double() {
  FilteredComplex<Rat> fc;
  fc.base.lo = 0;
  fc.base.dims = {1, 2, 1};
  // T^0 = col0 vert0; T^1 = (col0 vert1, col1 vert0); T^2 = col1 vert1.
  fc.base.d = {dense(2, 1, {{1}, {0}}), dense(1, 2, {{0, 0}})};
  fc.lambdas = {Rat(0), Rat(1)};
  fc.fil = {
      {dense(1, 1, {{1}}), Matrix<Rat>::identity(2), dense(1, 1, {{1}})},
      {Matrix<Rat>(1, 0), dense(2, 1, {{0}, {1}}), dense(1, 1, {{1}})},
  };
  fc.validate();
  return fc;
}

FilteredComplex<Rat> trivial_filtration(const CochainComplex<Rat>& base) {
  FilteredComplex<Rat> fc;
  fc.base = base;
  fc.lambdas = {Rat(0)};
  fc.fil.emplace_back();
  for (int d : base.dims) fc.fil[0].push_back(Matrix<Rat>::identity(d));
  fc.validate();
  return fc;
}

// One-dimensional complex concentrated in degree `deg` within degrees 0..deg.
CochainComplex<Rat> dot_complex(int deg) {
  CochainComplex<Rat> c;
  c.lo = 0;
  for (int k = 0; k < deg; ++k) c.dims.push_back(0);
  c.dims.push_back(1);
  for (int k = 0; k < deg; ++k) c.d.push_back(Matrix<Rat>(k + 1 == deg ? 1 : 0, 0));
  c.validate();
  return c;
}

}  // namespace

TEST_CASE("two-term filtered complex fails E1 degeneration with a witness at (1,1)") {
  FilteredComplex<Rat> fc = two_term_nondegenerate();

  E1Result<Rat> r = e1_degenerates(fc);
  REQUIRE_FALSE(r.degenerates);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->lambda == Rat(1));
  CHECK(r.witness->k == 1);
  REQUIRE(r.witness->cls.size() == 1);
  CHECK_FALSE(is_zero(r.witness->cls[0]));  // the class is (a multiple of) b

  SpectralPage<Rat> e1 = spectral_page(fc, 1);
  CHECK(e1.total() == 2);
  CHECK(e1.dim_at(0, 0) == 1);
  CHECK(e1.dim_at(1, 0) == 1);
  CHECK(e1.dim_at(0, 1) == 0);

  CHECK(fc.base.total_cohomology() == 0);
  CHECK(spectral_page(fc, 2).total() == 0);
  CHECK(e_infinity(fc).total() == 0);

  ReesReport<Rat> rr = rees_report(fc);
  CHECK_FALSE(rr.torsion_free);
  CHECK(rr.torsion_exponent == 1);

  TripleVerdict v = triple_equivalence(fc);
  CHECK(v.agree());
  CHECK_FALSE(v.strict);
  CHECK(v.e1_total == 2);
  CHECK(v.h_total == 0);
  CHECK(v.torsion_exponent == 1);

  // Induced filtration on cohomology is all zero here (H itself vanishes).
  CHECK(induced_filtration_on_H(fc, 1) == std::vector<int>{0, 0});
}

TEST_CASE("trivial filtration: E1 page equals base cohomology, everything degenerates") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    CochainComplex<Rat> base = random_complex(rng, 10);
    FilteredComplex<Rat> fc = trivial_filtration(base);

    SpectralPage<Rat> e1 = spectral_page(fc, 1);
    for (int k = base.lo; k <= base.hi(); ++k)
      CHECK(e1.dim_at(0, k) == base.cohomology_dim(k));

    TripleVerdict v = triple_equivalence(fc);
    CHECK(v.agree());
    CHECK(v.strict);

    for (int k = base.lo; k <= base.hi(); ++k) {
      std::vector<int> ind = induced_filtration_on_H(fc, k);
      REQUIRE(ind.size() == 1);
      CHECK(ind[0] == base.cohomology_dim(k));
    }
  }
}

TEST_CASE("column filtration of a double complex: E1 entries are column cohomology") {
  FilteredComplex<Rat> fc = column_filtered_double();

  SpectralPage<Rat> e1 = spectral_page(fc, 1);
  // Column 0 (p=0) is exact; column 1 (p=1) has H^0 = H^1 = K.
  CHECK(e1.dim_at(0, 0) == 0);
  CHECK(e1.dim_at(0, 1) == 0);
  CHECK(e1.dim_at(1, 0) == 1);
  CHECK(e1.dim_at(1, 1) == 1);
  CHECK(e1.total() == 2);

  CHECK(fc.base.cohomology_dims() == std::vector<int>{0, 1, 1});
  TripleVerdict v = triple_equivalence(fc);
  CHECK(v.agree());
  CHECK(v.strict);

  // The graded pieces are exactly the columns.
  CHECK(graded_piece(fc, 0).cohomology_dims() == std::vector<int>{0, 0, 0});
  CHECK(graded_piece(fc, 1).cohomology_dims() == std::vector<int>{0, 1, 1});
}

TEST_CASE("E1 page blocks match graded-piece cohomology; d1 squares to zero; E2 = H(E1,d1)") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    FilteredComplex<Rat> fc = random_filtered_complex(rng, 12);
    PageIndexing<Rat> ix(fc);
    std::vector<int> ps = ix.plevels();
    E1Page<Rat> pg = e1_page(fc);
    SpectralPage<Rat> e1 = spectral_page(fc, 1);
    SpectralPage<Rat> e2 = spectral_page(fc, 2);

    for (int i = 0; i < fc.levels(); ++i) {
      CochainComplex<Rat> gr = graded_piece(fc, i);
      for (int k = fc.base.lo; k <= fc.base.hi(); ++k) {
        CHECK(gr.cohomology_dim(k) == e1.dim_at(ps[i], k - ps[i]));
        CHECK(gr.cohomology_dim(k) == pg.dim_at(ps[i], k));
      }
    }

    // d1 composition vanishes.
    for (auto& [key, m] : pg.d1) {
      auto next = pg.d1.find({key.first + 1, key.second + 1});
      if (next != pg.d1.end()) CHECK(is_zero_matrix(mul(next->second, m)));
    }

    // E2 from the E1 differential.
    for (int p : ps)
      for (int k = fc.base.lo; k <= fc.base.hi(); ++k) {
        int dim = pg.dim_at(p, k);
        auto out = pg.d1.find({p, k});
        int ker = dim - (out != pg.d1.end() ? rank(out->second) : 0);
        auto in = pg.d1.find({p - 1, k - 1});
        int im = (in != pg.d1.end()) ? rank(in->second) : 0;
        CHECK(e2.dim_at(p, k - p) == ker - im);
      }
  }
}

TEST_CASE("page totals decrease with r and stabilize at base cohomology") {
  SplitMix64 rng(4096);
  for (int trial = 0; trial < 12; ++trial) {
    FilteredComplex<Rat> fc = random_filtered_complex(rng, 12);
    int rstab = stable_page_index(fc);
    int prev = spectral_page(fc, 1).total();
    for (int r = 2; r <= rstab; ++r) {
      int cur = spectral_page(fc, r).total();
      CHECK(cur <= prev);
      prev = cur;
    }
    SpectralPage<Rat> einf = e_infinity(fc);
    CHECK(einf.total() == fc.base.total_cohomology());
    for (int k = fc.base.lo; k <= fc.base.hi(); ++k)
      CHECK(einf.total_in_degree(k) == fc.base.cohomology_dim(k));
  }
}

TEST_CASE("induced filtration on a planted direct sum splits 2 = 1 + 1") {
  FilteredComplex<Rat> a = trivial_filtration(dot_complex(1));
  FilteredComplex<Rat> b;
  b.base = dot_complex(1);
  b.lambdas = {Rat(0), Rat(1)};
  b.fil = {
      {Matrix<Rat>(0, 0), Matrix<Rat>::identity(1)},
      {Matrix<Rat>(0, 0), Matrix<Rat>::identity(1)},
  };
  b.validate();

  FilteredComplex<Rat> sum = direct_sum(a, b);
  sum.validate();
  CHECK(sum.base.cohomology_dim(1) == 2);
  CHECK(induced_filtration_on_H(sum, 1) == std::vector<int>{2, 1});
  CHECK(induced_gr_on_H(sum, 1) == std::vector<int>{1, 1});
}

TEST_CASE("when E1 degenerates, induced gr dims equal graded-piece cohomology") {
  SplitMix64 rng(555);
  int seen = 0;
  for (int trial = 0; trial < 40 && seen < 12; ++trial) {
    FilteredComplex<Rat> fc = random_filtered_complex(rng, 10);
    if (!e1_degenerates(fc).degenerates) continue;
    ++seen;
    for (int k = fc.base.lo; k <= fc.base.hi(); ++k) {
      std::vector<int> gr = induced_gr_on_H(fc, k);
      for (int i = 0; i < fc.levels(); ++i)
        CHECK(gr[i] == graded_piece(fc, i).cohomology_dim(k));
    }
  }
  CHECK(seen >= 5);
}

TEST_CASE("degeneration verdict is stable under direct sums and level shifts") {
  SplitMix64 rng(31337);
  for (int trial = 0; trial < 10; ++trial) {
    FilteredComplex<Rat> a = random_filtered_complex(rng, 8);
    FilteredComplex<Rat> b = random_filtered_complex(rng, 8);
    bool ea = e1_degenerates(a).degenerates;
    bool eb = e1_degenerates(b).degenerates;

    FilteredComplex<Rat> s = direct_sum(a, b);
    s.validate();
    CHECK(e1_degenerates(s).degenerates == (ea && eb));

    FilteredComplex<Rat> sh = shift_levels(a, ratio(1, 2));
    sh.validate();
    CHECK(e1_degenerates(sh).degenerates == ea);
    FilteredComplex<Rat> sh2 = shift_levels(a, Rat(-2));
    CHECK(e1_degenerates(sh2).degenerates == ea);
  }
}

TEST_CASE("witnesses certify the failure: cocycle in the level, boundary only outside it") {
  SplitMix64 rng(90210);
  int found = 0;
  for (int trial = 0; trial < 80 && found < 5; ++trial) {
    FilteredComplex<Rat> fc = random_filtered_complex(rng, 12);
    E1Result<Rat> r = e1_degenerates(fc);
    if (r.degenerates) continue;
    ++found;
    REQUIRE(r.witness.has_value());
    const E1Witness<Rat>& w = *r.witness;
    int lvl = -1;
    for (int i = 0; i < fc.levels(); ++i)
      if (fc.lambdas[i] == w.lambda) lvl = i;
    REQUIRE(lvl >= 0);

    bool nonzero = false;
    for (auto& x : w.cls) nonzero = nonzero || !is_zero(x);
    CHECK(nonzero);
    CHECK(subspace_contains_vector(fc.level_space(lvl, w.k), w.cls));
    std::vector<Rat> img = mat_apply(fc.base.diff(w.k), w.cls);
    for (auto& x : img) CHECK(is_zero(x));
    CHECK(subspace_contains_vector(fc.base.boundaries(w.k), w.cls));
    Matrix<Rat> bl = image_basis(mul(fc.base.diff(w.k - 1), fc.level_space(lvl, w.k - 1)));
    CHECK_FALSE(subspace_contains_vector(bl, w.cls));
  }
  CHECK(found >= 5);
}

TEST_CASE("triple equivalence holds across a seeded batch, with both verdicts represented") {
  SplitMix64 rng(20260819);
  int degen = 0, nondegen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    FilteredComplex<Rat> fc = random_filtered_complex(rng, 12);
    TripleVerdict v = triple_equivalence(fc);
    CHECK(v.agree());
    (v.strict ? degen : nondegen)++;
  }
  CHECK(degen >= 5);
  CHECK(nondegen >= 5);
}

TEST_CASE("serialization round-trips filtered complexes exactly") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    FilteredComplex<Rat> fc = random_filtered_complex(rng, 10);
    Json j = json_of_filtered(fc);
    FilteredComplex<Rat> fc2 = filtered_from_json(j);
    CHECK(fc.base.dims == fc2.base.dims);
    for (size_t i = 0; i < fc.base.d.size(); ++i) CHECK(fc.base.d[i] == fc2.base.d[i]);
    REQUIRE(fc.lambdas == fc2.lambdas);
    for (int i = 0; i < fc.levels(); ++i)
      for (size_t k = 0; k < fc.fil[i].size(); ++k) CHECK(fc.fil[i][k] == fc2.fil[i][k]);
    CHECK(j.dump() == json_of_filtered(fc2).dump());

    TripleVerdict v1 = triple_equivalence(fc);
    TripleVerdict v2 = triple_equivalence(fc2);
    CHECK(v1.strict == v2.strict);
    CHECK(v1.e1_total == v2.e1_total);
    CHECK(v1.torsion_exponent == v2.torsion_exponent);
  }
}

TEST_CASE("filtered-complex validation rejects malformed inputs") {
  // Filtration that is not a subcomplex: F^1 = (<a> -> 0) but d(a) = b != 0.
  FilteredComplex<Rat> bad;
  bad.base.lo = 0;
  bad.base.dims = {1, 1};
  bad.base.d = {dense(1, 1, {{1}})};
  bad.lambdas = {Rat(0), Rat(1)};
  bad.fil = {
      {Matrix<Rat>::identity(1), Matrix<Rat>::identity(1)},
      {Matrix<Rat>::identity(1), Matrix<Rat>(1, 0)},
  };
  CHECK_THROWS(bad.validate());

  // Top level not the whole space.
  FilteredComplex<Rat> bad2;
  bad2.base.lo = 0;
  bad2.base.dims = {1};
  bad2.lambdas = {Rat(0)};
  bad2.fil = {{Matrix<Rat>(1, 0)}};
  CHECK_THROWS(bad2.validate());

  // Levels not strictly increasing.
  FilteredComplex<Rat> bad3;
  bad3.base.lo = 0;
  bad3.base.dims = {1};
  bad3.lambdas = {Rat(1), Rat(0)};
  bad3.fil = {{Matrix<Rat>::identity(1)}, {Matrix<Rat>::identity(1)}};
  CHECK_THROWS(bad3.validate());

  // d with wrong shape.
  CochainComplex<Rat> badc;
  badc.lo = 0;
  badc.dims = {2, 1};
  badc.d = {dense(2, 2, {{0, 0}, {0, 0}})};
  CHECK_THROWS(badc.validate());

  // d^2 != 0.
  CochainComplex<Rat> badd;
  badd.lo = 0;
  badd.dims = {1, 1, 1};
  badd.d = {dense(1, 1, {{1}}), dense(1, 1, {{1}})};
  CHECK_THROWS(badd.validate());
}

TEST_CASE("rees construction: adapted levels, h=1 and h=0 specializations") {
  FilteredComplex<Rat> fc = two_term_nondegenerate();
  ReesComplex<Rat> rc = build_rees(fc);
  // Degree 0: a enters at the top level (increasing level 1); degree 1: b is
  // already in F^1 (increasing level 0).
  REQUIRE(rc.level.size() == 2);
  CHECK(rc.level[0] == std::vector<int>{1});
  CHECK(rc.level[1] == std::vector<int>{0});
  REQUIRE(rc.x.size() == 1);
  CHECK(rc.x[0][0][0] == Poly<Rat>::monomial(Rat(1), 1));  // d(a) = h * b

  Matrix<Rat> at1 = rees_eval(rc.x[0], Rat(1));
  CHECK(at1 == dense(1, 1, {{1}}));
  Matrix<Rat> at0 = rees_eval(rc.x[0], Rat(0));
  CHECK(is_zero_matrix(at0));

  ReesCohomology<Rat> h1 = rees_cohomology(rc, 1);
  CHECK(h1.free_rank == 0);
  CHECK(h1.torsion_exponents == std::vector<int>{1});
}
