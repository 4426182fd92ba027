#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "irrhodge/localchecks.hpp"
#include "irrhodge/localmodel.hpp"
#include "irrhodge/prng.hpp"

using namespace irrhodge;

namespace {

ChartData chart(int ell, int m, int pz, std::vector<int> e) {
  ChartData c;
  c.ell = ell;
  c.m = m;
  c.pz = pz;
  c.e = std::move(e);
  c.validate();
  return c;
}

Rat rat(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// A random formal log form on the chart; masks respect the dz-regularity rule.
MonomialLogForm<Rat> random_form(SplitMix64& rng, const ChartData& c, int nterms) {
  MonomialLogForm<Rat> f;
  for (int t = 0; t < nterms; ++t) {
    Multidegree a(c.n());
    for (int i = 0; i < c.n(); ++i) a[i] = (int)rng.range(-3, 3);
    uint32_t j = (uint32_t)rng.below(1u << c.n());
    for (int k = c.ell + c.m; k < c.n(); ++k)
      if ((j & (1u << k)) && a[k] < 1) a[k] = 1;
    f.add_term(a, j, rat(rng.range(-4, 4)));
  }
  return f;
}

}  // namespace

TEST_CASE("chart bookkeeping and windows") {
  ChartData c = chart(1, 1, 1, {2});
  CHECK(c.n() == 3);
  CHECK(c.is_pole(0));
  CHECK(c.is_horizontal(1));
  CHECK(c.is_free(2));
  CHECK(c.pole_shift() == std::vector<int>{2, 0, 0});
  CHECK_THROWS_AS(chart(1, 0, 0, {0}), std::invalid_argument);
  CHECK_THROWS_AS(chart(2, 0, 0, {1}), std::invalid_argument);

  MdWindow w = box_window(c, 2);
  CHECK((int)w.size() == 5 * 5 * 5);
  CHECK(w.count(Multidegree{0, 0, 0}) == 1);
  CHECK(w.count(Multidegree{-2, 2, 1}) == 1);

  ChartData c0 = chart(0, 0, 0, {});
  CHECK((int)box_window(c0, 3).size() == 1);
}

TEST_CASE("floor_times and wedge signs") {
  CHECK(floor_times(rat(1, 2), 3) == 1);
  CHECK(floor_times(rat(-1, 2), 3) == -2);
  CHECK(floor_times(rat(-1, 3), 3) == -1);
  CHECK(floor_times(rat(2), 5) == 10);
  CHECK(floor_times(rat(0), 7) == 0);

  CHECK(wedge_sign(0, 0u) == 1);
  CHECK(wedge_sign(1, 0b01u) == -1);
  CHECK(wedge_sign(0, 0b10u) == 1);
  CHECK(wedge_sign(1, 0b10u) == 0);
  CHECK(wedge_sign(2, 0b11u) == 1);
}

TEST_CASE("nabla on monomials") {
  // Coordinates: x (pole, e=1), z (free).
  ChartData c = chart(1, 0, 1, {1});

  SUBCASE("d of x^2 z^3") {
    auto f = MonomialLogForm<Rat>::monomial({2, 3}, 0u, rat(1));
    auto df = nabla(c, f, rat(1), rat(0));
    REQUIRE(df.terms.size() == 2);
    CHECK(df.terms.at({{2, 3}, 0b01u}) == rat(2));
    CHECK(df.terms.at({{2, 3}, 0b10u}) == rat(3));
  }
  SUBCASE("df wedge 1 has a simple pole") {
    auto f = MonomialLogForm<Rat>::monomial({0, 0}, 0u, rat(1));
    auto g = nabla(c, f, rat(0), rat(1));
    REQUIRE(g.terms.size() == 1);
    CHECK(g.terms.at({{-1, 0}, 0b01u}) == rat(-1));
  }
  SUBCASE("full twisted differential of x") {
    auto f = MonomialLogForm<Rat>::monomial({1, 0}, 0u, rat(1));
    auto g = nabla(c, f, rat(1), rat(1));
    REQUIRE(g.terms.size() == 2);
    CHECK(g.terms.at({{1, 0}, 0b01u}) == rat(1));
    CHECK(g.terms.at({{0, 0}, 0b01u}) == rat(-1));
  }
}

TEST_CASE("twisted differential squares to zero on random forms") {
  std::vector<ChartData> charts = {chart(1, 0, 1, {2}), chart(2, 0, 1, {1, 3}),
                                   chart(0, 2, 1, {}), chart(1, 1, 1, {2})};
  std::vector<std::pair<Rat, Rat>> uv = {{rat(1), rat(1)}, {rat(1), rat(0)},
                                         {rat(0), rat(1)}, {rat(2), rat(3)}};
  SplitMix64 rng(20260819);
  for (const auto& c : charts)
    for (const auto& [u, v] : uv)
      for (int trial = 0; trial < 8; ++trial) {
        auto f = random_form(rng, c, 4);
        auto dd = nabla(c, nabla(c, f, u, v), u, v);
        CHECK(dd.is_zero());
      }
}

TEST_CASE("log slice masks") {
  ChartData a = chart(1, 0, 0, {1});
  CHECK(log_slice_masks(a, 0, {-1}, rat(1)) == std::vector<uint32_t>{0u});
  CHECK(log_slice_masks(a, 0, {-1}, rat(0)).empty());
  CHECK(log_slice_masks(a, 1, {-1}, rat(1)) == std::vector<uint32_t>{0b1u});

  ChartData z = chart(0, 0, 1, {});
  CHECK(log_slice_masks(z, 1, {0}, rat(0)).empty());
  CHECK(log_slice_masks(z, 1, {1}, rat(0)) == std::vector<uint32_t>{0b1u});
  CHECK(log_slice_masks(z, 0, {0}, rat(0)) == std::vector<uint32_t>{0u});
  CHECK(log_slice_masks(z, 0, {-1}, rat(0)).empty());

  ChartData y = chart(0, 1, 0, {});
  CHECK(log_slice_masks(y, 1, {0}, rat(0)) == std::vector<uint32_t>{0b1u});

  // Fractional twist with multiplicity: floor((1/2)*2) = 1 admits exponent -1.
  ChartData c2 = chart(1, 0, 0, {2});
  CHECK(log_slice_masks(c2, 1, {-1}, rat(1, 2)) == std::vector<uint32_t>{0b1u});
  CHECK(log_slice_masks(c2, 1, {-2}, rat(1, 2)).empty());
}

TEST_CASE("omega_f slices match the two-family description") {
  ChartData a = chart(1, 0, 0, {1});

  SUBCASE("degree 0 at exponent 1: the function x") {
    Matrix<Rat> s = omega_f_slice<Rat>(a, 0, {1}, rat(0));
    REQUIRE(s.nc == 1);
    CHECK(s.at(0, 0) == rat(1));
    GradedSheafSpace sp;
    sp.chart = a;
    sp.kind = SpaceKind::omega_f;
    auto basis = basis_of<Rat>(sp, {1});
    REQUIRE(basis.size() == 1);
    CHECK(basis[0].terms.at({{1}, 0u}) == rat(1));
  }
  SUBCASE("degree 0 at exponent 0 is empty") {
    CHECK(omega_f_slice<Rat>(a, 0, {0}, rat(0)).nc == 0);
  }
  SUBCASE("degree 1 at exponent 0: dlog x") {
    Matrix<Rat> s = omega_f_slice<Rat>(a, 1, {0}, rat(0));
    REQUIRE(s.nc == 1);
    CHECK(s.at(0, 0) == rat(1));
  }
  SUBCASE("two pole components: the diagonal class") {
    ChartData b = chart(2, 0, 0, {1, 1});
    Matrix<Rat> s = omega_f_slice<Rat>(b, 1, {0, 0}, rat(0));
    REQUIRE(s.nc == 1);
    CHECK(s.at(0, 0) == rat(1));  // coefficient of dlog x1
    CHECK(s.at(1, 0) == rat(1));  // coefficient of dlog x2
  }
  SUBCASE("columns are independent across a sweep") {
    std::vector<ChartData> charts = {a, chart(2, 0, 0, {1, 1}), chart(1, 0, 0, {2}),
                                     chart(1, 1, 0, {2}), chart(1, 1, 1, {2})};
    for (const auto& c : charts)
      for (const Rat& mu : {rat(0), rat(1, 2)})
        for (int p = 0; p <= c.n(); ++p)
          for (const Multidegree& md : box_window(c, 2)) {
            Matrix<Rat> s = omega_f_slice<Rat>(c, p, md, mu);
            CHECK(rank(s) == s.nc);
            CHECK(s.nr == (int)log_slice_masks(c, p, md, mu).size());
          }
  }
}

TEST_CASE("filtration step spaces") {
  ChartData c = chart(1, 0, 0, {2});

  SUBCASE("negative twist forces the zero space") {
    GradedSheafSpace s = hodge_step(c, rat(1, 2), 0);
    CHECK(s.forced_zero);
    CHECK(slice_dim<Rat>(s, {0}) == 0);
    CHECK(slice_dim<Rat>(s, {5}) == 0);
    CHECK(basis_of<Rat>(s, {3}).empty());
  }
  SUBCASE("positive twist admits fractional pole order") {
    GradedSheafSpace s = hodge_step(c, rat(1, 2), 1);
    CHECK(!s.forced_zero);
    CHECK(s.mu == rat(1, 2));
    CHECK(slice_dim<Rat>(s, {-1}) == 1);
    CHECK(slice_dim<Rat>(s, {-2}) == 0);
  }
  SUBCASE("integer step") {
    GradedSheafSpace s = hodge_step(c, rat(1), 1);
    CHECK(slice_dim<Rat>(s, {0}) == 1);
    CHECK(slice_dim<Rat>(s, {-1}) == 0);
  }
  SUBCASE("slice dimensions weakly decrease in lambda") {
    std::vector<Rat> grid = {rat(0), rat(1, 4), rat(1, 2), rat(3, 4), rat(1), rat(5, 4), rat(2)};
    for (int k = 0; k <= 1; ++k)
      for (const Multidegree& md : box_window(c, 3)) {
        int prev = -1;
        for (const Rat& lam : grid) {
          int d = slice_dim<Rat>(hodge_step(c, lam, k), md);
          if (prev >= 0) CHECK(d <= prev);
          prev = d;
        }
      }
  }
  SUBCASE("dimensions are constant between jump grid points") {
    ChartData c2 = chart(2, 0, 0, {2, 3});
    // Jumps only occur where lambda * e_i is an integer; 1/5 and 3/10 lie in
    // the same open interval (1/6 excluded, next jump at 1/3).
    for (int k = 0; k <= c2.n(); ++k)
      for (const Multidegree& md : box_window(c2, 3))
        CHECK(slice_dim<Rat>(hodge_step(c2, rat(1, 5), k), md) ==
              slice_dim<Rat>(hodge_step(c2, rat(3, 10), k), md));
  }
  SUBCASE("window guard") {
    MdWindow w = box_window(c, 1);
    GradedSheafSpace s = hodge_step(c, rat(0), 0, w);
    CHECK_THROWS_AS(basis_of<Rat>(s, {2}), std::invalid_argument);
  }
}

TEST_CASE("graded pieces of the pole-order filtration") {
  SUBCASE("simple pole, integer levels") {
    ChartData a = chart(1, 0, 0, {1});
    for (const Rat& lam : {rat(0), rat(-1)}) {
      auto r = gr_complex<Rat>(a, lam, box_window(a, 3));
      CHECK(r.jumping_count == 1);
      CHECK(!r.identically_zero);
      CHECK(r.all_acyclic);
      int alive = 0;
      for (auto& line : r.lines)
        if (line.alive) {
          alive++;
          CHECK(line.cx.dims == std::vector<int>{1, 1});
          CHECK(line.anchor == Multidegree{(int)lam.get_num().get_si()});
        }
      CHECK(alive == 1);
    }
  }
  SUBCASE("multiplicity two, half-integer level") {
    ChartData c = chart(1, 0, 0, {2});
    auto r = gr_complex<Rat>(c, rat(1, 2), box_window(c, 3));
    CHECK(r.jumping_count == 1);
    CHECK(!r.identically_zero);
    CHECK(r.all_acyclic);
    CHECK(r.supported_on_pred);
    for (auto& line : r.lines)
      if (line.alive) CHECK(line.anchor == Multidegree{1});
  }
  SUBCASE("level with no jumping component vanishes identically") {
    ChartData c = chart(1, 0, 0, {2});
    auto r = gr_complex<Rat>(c, rat(1, 3), box_window(c, 2));
    CHECK(r.jumping_count == 0);
    CHECK(r.identically_zero);
    CHECK(r.all_acyclic);
  }
  SUBCASE("two components: full Koszul lines, assembled total acyclic") {
    ChartData b = chart(2, 0, 0, {1, 1});
    auto r = gr_complex<Rat>(b, rat(0), box_window(b, 2));
    CHECK(!r.identically_zero);
    CHECK(r.all_acyclic);
    bool saw_full = false;
    for (auto& line : r.lines)
      if (line.alive && line.cx.dims == std::vector<int>{1, 2, 1}) saw_full = true;
    CHECK(saw_full);
    CochainComplex<Rat> total = assembled_total(r);
    int want = 0;
    for (auto& line : r.lines) want += line.cx.total_dim();
    CHECK(total.total_dim() == want);
    CHECK(total.total_cohomology() == 0);
  }
  SUBCASE("no poles means no graded pieces") {
    ChartData z = chart(0, 1, 1, {});
    auto r = gr_complex<Rat>(z, rat(0), box_window(z, 2));
    CHECK(r.identically_zero);
  }
  SUBCASE("mixed multiplicities at a partially jumping level") {
    ChartData c = chart(2, 0, 0, {2, 3});
    auto r = gr_complex<Rat>(c, rat(1, 2), box_window(c, 3));
    CHECK(r.jumping_count == 1);
    CHECK(!r.identically_zero);
    CHECK(r.all_acyclic);
    CHECK(r.supported_on_pred);
  }
}

TEST_CASE("pole-order rows: kernel is omega_f, higher cohomology vanishes") {
  SUBCASE("simple pole") {
    auto v = verify_omega_f_log<Rat>(chart(1, 0, 0, {1}), rat(0), 0, box_window(chart(1, 0, 0, {1}), 6));
    CHECK(v.pass);
    CHECK(v.hp_matches_omega_f);
    CHECK(v.lines_full == 1);
    CHECK(v.lines_vacuous == 6);
    CHECK(v.lines_empty == 6);
  }
  SUBCASE("two pole components with multiplicity") {
    ChartData d = chart(2, 0, 0, {1, 2});
    auto v = verify_omega_f_log<Rat>(d, rat(1, 2), 1, box_window(d, 5));
    CHECK(v.pass);
    CHECK(v.hp_matches_omega_f);
    CHECK(v.lines_full > 0);
  }
  SUBCASE("pole, horizontal and free coordinates together") {
    ChartData e = chart(1, 1, 1, {2});
    auto v = verify_omega_f_log<Rat>(e, rat(1, 3), 0, box_window(e, 2));
    CHECK(v.pass);
    CHECK(v.hp_matches_omega_f);
  }
  SUBCASE("top degree row is the omega_f slice itself") {
    ChartData a = chart(1, 0, 0, {1});
    auto v = verify_omega_f_log<Rat>(a, rat(0), 1, box_window(a, 4));
    CHECK(v.pass);
  }
  SUBCASE("sabotaged differential is caught") {
    ChartData a = chart(1, 0, 0, {1});
    auto v = verify_omega_f_log<Rat>(a, rat(0), 0, box_window(a, 2), true);
    CHECK(!v.pass);
    CHECK(!v.failures.empty());
    bool saw_positive = false;
    for (auto& f : v.failures)
      if (f.position >= 1 && f.h_dim > 0) saw_positive = true;
    CHECK(saw_positive);
  }
}

TEST_CASE("relative log complex") {
  CHECK_THROWS_AS(relative_log_complex(chart(0, 1, 0, {}), 1), std::invalid_argument);

  SUBCASE("one pole coordinate: degree-one slice collapses") {
    ChartData a = chart(1, 0, 0, {1});
    GradedSheafSpace s = relative_log_complex(a, 1);
    CHECK(slice_dim<Rat>(s, {0}) == 0);
    GradedSheafSpace s0 = relative_log_complex(a, 0);
    CHECK(slice_dim<Rat>(s0, {0}) == 1);
  }
  SUBCASE("two pole components: one relation among the dlogs") {
    ChartData b = chart(2, 0, 0, {1, 1});
    GradedSheafSpace s = relative_log_complex(b, 1);
    CHECK(slice_dim<Rat>(s, {0, 0}) == 1);
    auto basis = basis_of<Rat>(s, {0, 0});
    CHECK(basis.size() == 1);
  }
  SUBCASE("projection kills the dgg wedge") {
    ChartData b = chart(2, 0, 0, {1, 1});
    for (int p = 1; p <= 2; ++p) {
      Matrix<Rat> proj = relative_projection<Rat>(b, p, {0, 0});
      Matrix<Rat> dgg = dgg_wedge_matrix<Rat>(b, p, {0, 0}, rat(0));
      CHECK(is_zero_matrix(mul(proj, dgg)));
    }
    ChartData d = chart(2, 0, 0, {1, 2});
    for (const Multidegree& md : box_window(d, 1)) {
      Matrix<Rat> proj = relative_projection<Rat>(d, 1, md);
      Matrix<Rat> dgg = dgg_wedge_matrix<Rat>(d, 1, md, rat(0));
      CHECK(is_zero_matrix(mul(proj, dgg)));
    }
  }
}

TEST_CASE("bar reduction keeps pole exponents below the multiplicity") {
  ChartData c = chart(1, 1, 0, {2});
  GradedSheafSpace s;
  s.chart = c;
  s.kind = SpaceKind::bar_relative;
  s.p = 0;
  for (int ax = 0; ax <= 3; ++ax) {
    int d = slice_dim<Rat>(s, {ax, 0});
    CHECK(d == (ax <= 1 ? 1 : 0));
  }
}

TEST_CASE("exactness of the defining sequence and bar acyclicity") {
  for (const auto& c : {chart(1, 0, 0, {1}), chart(1, 1, 0, {2}), chart(2, 0, 0, {1, 1}),
                        chart(0, 1, 1, {}), chart(1, 0, 1, {3})}) {
    auto v = verify_C1_sequence<Rat>(c, box_window(c, c.n() >= 2 ? 3 : 4));
    CHECK(v.pass);
    CHECK(v.termwise_exact);
    CHECK(v.bar_acyclic);
    CHECK(v.sigma_strict);
    CHECK(v.failures.empty());
  }
}

TEST_CASE("quotient cohomology concentrates at the zero slice") {
  SUBCASE("two pole components, degree one") {
    ChartData b = chart(2, 0, 0, {1, 1});
    auto r = quotient_cohomology_lemma<Rat>(b, 1, box_window(b, 3));
    CHECK(r.pass);
    CHECK(r.expected == 1);
    CHECK(r.dim_at_zero == 1);
    CHECK(r.basis.size() == 1);
    CHECK(r.nonzero_slices.empty());
  }
  SUBCASE("pole plus horizontal, degree one") {
    ChartData f = chart(1, 1, 0, {1});
    auto r = quotient_cohomology_lemma<Rat>(f, 1, box_window(f, 3));
    CHECK(r.pass);
    CHECK(r.dim_at_zero == 1);
  }
  SUBCASE("degree zero always gives the constants") {
    for (const auto& c : {chart(1, 0, 0, {1}), chart(2, 0, 0, {1, 1}), chart(1, 1, 0, {1})}) {
      auto r = quotient_cohomology_lemma<Rat>(c, 0, box_window(c, 2));
      CHECK(r.pass);
      CHECK(r.expected == 1);
      CHECK(r.dim_at_zero == 1);
    }
  }
  SUBCASE("degree beyond the count of divisor coordinates vanishes") {
    ChartData b = chart(2, 0, 0, {1, 1});
    auto r = quotient_cohomology_lemma<Rat>(b, 2, box_window(b, 2));
    CHECK(r.pass);
    CHECK(r.expected == 0);
    CHECK(r.dim_at_zero == 0);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(quotient_cohomology_lemma<Rat>(chart(1, 0, 0, {2}), 1,
                                                   box_window(chart(1, 0, 0, {2}), 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(quotient_cohomology_lemma<Rat>(chart(0, 1, 0, {}), 0,
                                                   box_window(chart(0, 1, 0, {}), 1)),
                    std::invalid_argument);
    MdWindow no_zero = {{1}};
    CHECK_THROWS_AS(quotient_cohomology_lemma<Rat>(chart(1, 0, 0, {1}), 0, no_zero),
                    std::invalid_argument);
  }
}

TEST_CASE("twisted complex cohomology decomposes over exponent cosets") {
  ChartData c = chart(1, 1, 0, {2});
  Rat mu = rat(1, 2);
  MdWindow w0 = box_window(c, 2);
  CochainComplex<Rat> big = assemble_twisted_complex(c, mu, rat(1), rat(1), w0);

  // Cosets of the shift lattice Z·e: label a by (a_x mod 2, a_y).
  std::map<std::pair<int, int>, MdWindow> cosets;
  for (const Multidegree& a : w0) cosets[{((a[0] % 2) + 2) % 2, a[1]}].insert(a);

  std::vector<int> dims_sum(c.n() + 1, 0), h_sum(c.n() + 1, 0);
  for (auto& [label, w] : cosets) {
    CochainComplex<Rat> part = assemble_twisted_complex(c, mu, rat(1), rat(1), w);
    for (int k = 0; k <= c.n(); ++k) {
      dims_sum[k] += part.dim(k);
      h_sum[k] += part.cohomology_dim(k);
    }
  }
  for (int k = 0; k <= c.n(); ++k) {
    CHECK(big.dim(k) == dims_sum[k]);
    CHECK(big.cohomology_dim(k) == h_sum[k]);
  }
}

TEST_CASE("display of forms") {
  ChartData c = chart(1, 0, 1, {1});
  GradedSheafSpace sp;
  sp.chart = c;
  sp.kind = SpaceKind::omega_f;
  sp.p = 1;
  auto basis = basis_of<Rat>(sp, {0, 0});
  REQUIRE(basis.size() == 1);
  std::string s = to_string(c, basis[0]);
  CHECK(s.find("dx0/x0") != std::string::npos);

  auto f = MonomialLogForm<Rat>::monomial({1, 2}, 0b10u, rat(3));
  std::string t = to_string(c, f);
  CHECK(t.find("z1^1") != std::string::npos);  // dz carries one z
  CHECK(t.find("dz1") != std::string::npos);
  CHECK(t.find("(3)") != std::string::npos);
  CHECK(to_string(c, MonomialLogForm<Rat>{}) == "0");
}
