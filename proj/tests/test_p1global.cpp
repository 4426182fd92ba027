#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <vector>

#include "doctest.h"
#include "irrhodge/p1global.hpp"
#include "irrhodge/p1model.hpp"
#include "irrhodge/prng.hpp"
#include "irrhodge/spectral.hpp"

using namespace irrhodge;

namespace {

Rat rat(long n, long d = 1) {
  Rat r(n, d);
  r.canonicalize();
  return r;
}

Poly<Rat> poly(std::vector<long> cs) {
  std::vector<Rat> v;
  for (long c : cs) v.push_back(Rat(c));
  return Poly<Rat>(std::move(v));
}

// Expand a factored function into a (numerator, denominator) polynomial pair.
std::pair<Poly<Rat>, Poly<Rat>> expand(const FactoredFun<Rat>& f) {
  Poly<Rat> num = f.num, den = Poly<Rat>::one();
  for (auto& [a, k] : f.exps) {
    if (k > 0)
      num *= poly_pow(linear_factor(a), k);
    else
      den *= poly_pow(linear_factor(a), -k);
  }
  return {num, den};
}

bool same_fun(const FactoredFun<Rat>& f, const FactoredFun<Rat>& g) {
  auto [nf, df] = expand(f);
  auto [ng, dg] = expand(g);
  return (nf * dg - ng * df).is_zero();
}

Rat eval_fun(const FactoredFun<Rat>& f, const Rat& x) {
  Rat v = f.num.eval(x);
  for (auto& [a, k] : f.exps) v = v * scalar_pow(Rat(x - a), k);
  return v;
}

FactoredFun<Rat> random_fun(SplitMix64& rng) {
  FactoredFun<Rat> f;
  std::vector<Rat> pts = {rat(0), rat(1), rat(-2)};
  std::vector<Rat> cs;
  for (int i = 0, n = 1 + (int)rng.below(3); i < n; ++i)
    cs.push_back(rat((long)rng.range(-4, 4)));
  f.num = Poly<Rat>(std::move(cs));
  for (auto& p : pts) {
    int e = (int)rng.range(-2, 2);
    if (e != 0) f.exps[p] = e;
  }
  f.reduce();
  return f;
}

// The five standing instances.
P1Instance<Rat> inst_z_a1() { return make_p1_instance(poly({0, 1}), poly({1})); }
P1Instance<Rat> inst_z_gm() { return make_p1_instance(poly({0, 1}), poly({1}), {rat(0)}); }
P1Instance<Rat> inst_z_plus_inv() { return make_p1_instance(poly({1, 0, 1}), poly({0, 1})); }
P1Instance<Rat> inst_z2() { return make_p1_instance(poly({0, 0, 1}), poly({1})); }
P1Instance<Rat> inst_z3_over_zm1() {
  return make_p1_instance(poly({0, 0, 0, 1}), poly({-1, 1}));
}

}  // namespace

TEST_CASE("factored function arithmetic") {
  // d/dz [ z^2/(z-1) ] = (z^2 - 2z)/(z-1)^2
  FactoredFun<Rat> h;
  h.num = poly({0, 0, 1});
  h.exps[rat(1)] = -1;
  FactoredFun<Rat> dh = deriv(h);
  FactoredFun<Rat> expect;
  expect.num = poly({0, -2, 1});
  expect.exps[rat(1)] = -2;
  CHECK(same_fun(dh, expect));

  // z + 1/z = (z^2+1)/z
  FactoredFun<Rat> z = FactoredFun<Rat>::from_poly(poly({0, 1}));
  FactoredFun<Rat> zinv;
  zinv.num = poly({1});
  zinv.exps[rat(0)] = -1;
  FactoredFun<Rat> s = add(z, zinv);
  FactoredFun<Rat> expect2;
  expect2.num = poly({1, 0, 1});
  expect2.exps[rat(0)] = -1;
  CHECK(same_fun(s, expect2));

  // 1/(w-2) in the opposite chart: -(1/2)·z/(z - 1/2)
  FactoredFun<Rat> g;
  g.num = poly({1});
  g.exps[rat(2)] = -1;
  FactoredFun<Rat> gs = subst_inv(g);
  FactoredFun<Rat> expect3;
  expect3.num = Poly<Rat>::constant(rat(-1, 2));
  expect3.exps[rat(0)] = 1;
  expect3.exps[rat(1, 2)] = -1;
  CHECK(same_fun(gs, expect3));

  SplitMix64 rng(20260819u);
  int checked_eval = 0;
  for (int trial = 0; trial < 40; ++trial) {
    FactoredFun<Rat> f = random_fun(rng), g2 = random_fun(rng);
    auto [nf, df] = expand(f);
    auto [ng, dg] = expand(g2);
    // mul and add against plain polynomial fraction arithmetic
    auto [nm, dm] = expand(mul(f, g2));
    CHECK((nm * (df * dg) - dm * (nf * ng)).is_zero());
    auto [na, da] = expand(add(f, g2));
    CHECK((na * (df * dg) - da * (nf * dg + ng * df)).is_zero());
    // quotient rule
    auto [nd, dd] = expand(deriv(f));
    Poly<Rat> lhs = nd * (df * df);
    Poly<Rat> rhs = dd * (poly_deriv(nf) * df - nf * poly_deriv(df));
    CHECK((lhs - rhs).is_zero());
    // chart transition is an involution and matches pointwise evaluation
    CHECK(same_fun(subst_inv(subst_inv(f)), f));
    Rat x = rat(3);
    if (!irrhodge::is_zero(eval_fun(f, x))) {
      CHECK(eval_fun(subst_inv(f), rat(1, 3)) == eval_fun(f, x));
      ++checked_eval;
    }
  }
  CHECK(checked_eval > 20);
}

TEST_CASE("section bases: exact coordinates, membership, windows") {
  SectionBasis<Rat> B;
  B.m[rat(1)] = 2;
  B.m[rat(0)] = 1;
  B.jlo = -3;
  B.jhi = 3;
  CHECK(B.dim() == 7);
  for (int i = 0; i < B.dim(); ++i) {
    std::vector<Rat> c = B.coords(B.element(i));
    for (int j = 0; j < B.dim(); ++j) CHECK(c[j] == (i == j ? rat(1) : rat(0)));
  }
  FactoredFun<Rat> combo = add(scale(B.element(2), rat(3)), scale(B.element(6), rat(-5)));
  std::vector<Rat> c = B.coords(combo);
  CHECK(c[2] == rat(3));
  CHECK(c[6] == rat(-5));

  // pole deeper than allowed
  FactoredFun<Rat> bad;
  bad.num = poly({1});
  bad.exps[rat(1)] = -3;
  CHECK_THROWS_AS((void)B.coords(bad), SectionError);
  // outside the truncation window
  FactoredFun<Rat> high = FactoredFun<Rat>::from_poly(poly({0, 0, 0, 0, 0, 0, 0, 0, 0, 1}));
  CHECK_THROWS_AS((void)B.coords(high), SectionError);

  // an imposed zero: m < 0 means sections must vanish there
  SectionBasis<Rat> Z;
  Z.m[rat(2)] = -1;
  Z.jlo = 0;
  Z.jhi = 2;
  CHECK_THROWS_AS((void)Z.coords(FactoredFun<Rat>::one()), SectionError);
  FactoredFun<Rat> ok = FactoredFun<Rat>::from_poly(poly({-2, 1}));
  std::vector<Rat> zc = Z.coords(ok);
  CHECK(zc[0] == rat(1));
}

TEST_CASE("rational root extraction") {
  Poly<Rat> p = poly_pow(linear_factor(rat(0)), 3) * poly_pow(linear_factor(rat(1)), 2) *
                linear_factor(rat(-2)) * poly({1, 0, 1});
  Poly<Rat> rest;
  std::map<Rat, int> roots = rational_roots(p, &rest);
  CHECK(roots.size() == 3);
  CHECK(roots.at(rat(0)) == 3);
  CHECK(roots.at(rat(1)) == 2);
  CHECK(roots.at(rat(-2)) == 1);
  CHECK((rest - poly({1, 0, 1})).is_zero());

  Poly<Rat> q = poly({-1, 2}) * poly({2, 3});  // roots 1/2 and -2/3
  std::map<Rat, int> r2 = rational_roots(q);
  CHECK(r2.size() == 2);
  CHECK(r2.at(rat(1, 2)) == 1);
  CHECK(r2.at(rat(-2, 3)) == 1);

  CHECK(rational_roots(poly({7})).empty());
  CHECK_THROWS_AS(rational_roots(Poly<Rat>()), std::invalid_argument);
}

TEST_CASE("instance construction and validation") {
  P1Instance<Rat> a = inst_z_plus_inv();
  CHECK(a.poles_fin.size() == 1);
  CHECK(a.poles_fin.at(rat(0)) == 1);
  CHECK(a.e_inf == 1);
  CHECK(a.sum_e() == 2);
  FactoredFun<Rat> f0 = a.f_chart0();
  FactoredFun<Rat> expect;
  expect.num = poly({1, 0, 1});
  expect.exps[rat(0)] = -1;
  CHECK(same_fun(f0, expect));
  // f in the opposite chart: (1 + w^2)/w again (this f is symmetric)
  CHECK(same_fun(a.f_chart1(), expect));

  P1Instance<Rat> b = inst_z3_over_zm1();
  CHECK(b.poles_fin.at(rat(1)) == 1);
  CHECK(b.e_inf == 2);
  CHECK(b.sum_e() == 3);
  CHECK(b.max_e() == 2);

  // numerator and denominator sharing a root
  CHECK_THROWS_AS(make_p1_instance(poly({-1, 1}), poly({-1, 1})), std::invalid_argument);
  // horizontal point on a pole
  CHECK_THROWS_AS(make_p1_instance(poly({1}), poly({0, 1}), {rat(0)}), std::invalid_argument);
  // denominator with no rational factorization
  CHECK_THROWS_AS(make_p1_instance(poly({1}), poly({1, 0, 1})), std::invalid_argument);
  // inconsistent multiplicity at infinity
  P1Instance<Rat> c = inst_z2();
  c.e_inf = 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("sheaf descriptors and line bundle degrees") {
  // f = z on the affine line: both terms are O(-1)
  CHECK(omega_f_sheaf(inst_z_a1(), Rat(0), 0).bundle_deg() == -1);
  CHECK(omega_f_sheaf(inst_z_a1(), Rat(0), 1).bundle_deg() == -1);
  // f = z with horizontal {0}: the form term is O(0)
  CHECK(omega_f_sheaf(inst_z_gm(), Rat(0), 1).bundle_deg() == 0);
  CHECK(omega_f_sheaf(inst_z_gm(), Rat(0), 0).bundle_deg() == -1);
  // f = z + 1/z: O(-2) and O(0)
  CHECK(omega_f_sheaf(inst_z_plus_inv(), Rat(0), 0).bundle_deg() == -2);
  CHECK(omega_f_sheaf(inst_z_plus_inv(), Rat(0), 1).bundle_deg() == 0);
  // f = z^2: O(-2) and O(-1)
  CHECK(omega_f_sheaf(inst_z2(), Rat(0), 0).bundle_deg() == -2);
  CHECK(omega_f_sheaf(inst_z2(), Rat(0), 1).bundle_deg() == -1);
  // f = z^3/(z-1): O(-3) and O(0)
  CHECK(omega_f_sheaf(inst_z3_over_zm1(), Rat(0), 0).bundle_deg() == -3);
  CHECK(omega_f_sheaf(inst_z3_over_zm1(), Rat(0), 1).bundle_deg() == 0);
  // fractional twist on the non-reduced pole
  CHECK(omega_f_sheaf(inst_z2(), rat(1, 2), 0).bundle_deg() == -1);
  CHECK(omega_f_sheaf(inst_z2(), rat(1, 2), 1).bundle_deg() == 0);

  // filtration step sheaves
  CHECK(yu_sheaf(inst_z2(), rat(1, 2), 0).zero);
  P1SheafData<Rat> s = yu_sheaf(inst_z2(), rat(1, 2), 1);
  CHECK(!s.zero);
  CHECK(s.m_inf == 2);
  CHECK(s.bundle_deg() == 0);
  CHECK(yu_sheaf(inst_z2(), Rat(0), 0).bundle_deg() == 0);
  CHECK(yu_sheaf(inst_z2(), Rat(0), 1).bundle_deg() == 1);
}

TEST_CASE("sheaf cohomology matches the line bundle formulas") {
  // twists of pure degree d at infinity on the instance f = z
  P1Instance<Rat> inst = inst_z_a1();
  for (int d = -4; d <= 4; ++d) {
    P1SheafData<Rat> F;
    F.form_deg = 0;
    F.m_inf = d;
    auto [h0, h1] = sheaf_cohomology(inst, F);
    CHECK(h0 == std::max(d + 1, 0));
    CHECK(h1 == std::max(-d - 1, 0));
    P1SheafData<Rat> G;
    G.form_deg = 1;
    G.m_inf = d + 2;
    auto [g0, g1] = sheaf_cohomology(inst, G);
    CHECK(g0 == std::max(d + 1, 0));
    CHECK(g1 == std::max(-d - 1, 0));
  }
  // every Ω_f^p sheaf of the standing instances: h^q depends only on deg
  std::vector<P1Instance<Rat>> insts = {inst_z_a1(), inst_z_gm(), inst_z_plus_inv(), inst_z2(),
                                        inst_z3_over_zm1()};
  for (auto& in : insts)
    for (int p = 0; p <= 1; ++p) {
      P1SheafData<Rat> F = omega_f_sheaf(in, Rat(0), p);
      int d = F.bundle_deg();
      auto [h0, h1] = sheaf_cohomology(in, F);
      CHECK(h0 == std::max(d + 1, 0));
      CHECK(h1 == std::max(-d - 1, 0));
    }
}

TEST_CASE("hypercohomology dimensions of the standing instances") {
  Rat one(1);
  CHECK(hypercoh_dims(inst_z_a1(), Rat(0), one, one) == std::vector<int>{0, 0, 0});
  CHECK(hypercoh_dims(inst_z_gm(), Rat(0), one, one) == std::vector<int>{0, 1, 0});
  CHECK(hypercoh_dims(inst_z_plus_inv(), Rat(0), one, one) == std::vector<int>{0, 2, 0});
  CHECK(hypercoh_dims(inst_z2(), Rat(0), one, one) == std::vector<int>{0, 1, 0});
  CHECK(hypercoh_dims(inst_z3_over_zm1(), Rat(0), one, one) == std::vector<int>{0, 3, 0});
}

TEST_CASE("direct de Rham oracle agrees with the Cech model") {
  std::vector<P1Instance<Rat>> insts = {inst_z_a1(), inst_z_gm(), inst_z_plus_inv(), inst_z2(),
                                        inst_z3_over_zm1()};
  std::vector<std::pair<int, int>> expected = {{0, 0}, {0, 1}, {0, 2}, {0, 1}, {0, 3}};
  for (size_t i = 0; i < insts.size(); ++i) {
    OracleDims od = direct_de_rham_oracle(insts[i]);
    CHECK(od.h0 == expected[i].first);
    CHECK(od.h1 == expected[i].second);
    std::vector<int> hc = hypercoh_dims(insts[i], Rat(0), Rat(1), Rat(1));
    CHECK(hc[0] == od.h0);
    CHECK(hc[1] == od.h1);
    CHECK(hc[2] == 0);
  }
}

TEST_CASE("twist independence of hypercohomology dimensions") {
  std::vector<P1Instance<Rat>> insts = {inst_z_a1(), inst_z_gm(), inst_z_plus_inv(), inst_z2(),
                                        inst_z3_over_zm1()};
  for (auto& in : insts) {
    UvIndependenceReport<Rat> rep =
        verify_uv_independence(in, Rat(0), {{rat(2), rat(3)}}, /*T=*/14);
    CHECK(rep.table.size() == 5);
    CHECK(rep.all_equal);
    CHECK(rep.zero_twist_matches_sum);
  }
  // fractional twist exercising the non-reduced pole of f = z^2
  UvIndependenceReport<Rat> rep = verify_uv_independence(inst_z2(), rat(1, 2), {}, 14);
  CHECK(rep.all_equal);
  CHECK(rep.zero_twist_matches_sum);
  CHECK(rep.table[0].second == std::vector<int>{0, 1, 0});
}

TEST_CASE("decomposition of de Rham cohomology") {
  DecompositionReport rep = decomposition_check(inst_z_plus_inv(), Rat(0), 1);
  CHECK(rep.pass);
  CHECK(rep.hypercoh == 2);
  CHECK(rep.pieces ==
        std::vector<std::pair<int, int>>{{0, 1}, {1, 1}});  // h^1(O(-2)) + h^0(O(0)) = 1 + 1

  std::vector<P1Instance<Rat>> insts = {inst_z_a1(), inst_z_gm(), inst_z_plus_inv(), inst_z2(),
                                        inst_z3_over_zm1()};
  for (auto& in : insts)
    for (int k = 0; k <= 2; ++k) CHECK(decomposition_check(in, Rat(0), k, 14).pass);
  DecompositionReport half = decomposition_check(inst_z2(), rat(1, 2), 1, 14);
  CHECK(half.pass);
  CHECK(half.hypercoh == 1);
}

TEST_CASE("form-degree filtration: E1 page and degeneration") {
  FilteredComplex<Rat> fc = omega_f_filtered(inst_z_plus_inv(), Rat(0), rat(1), rat(1), 14);
  E1Page<Rat> page = e1_page(fc);
  CHECK(page.dim_at(0, 0) == 0);  // h^0(O(-2))
  CHECK(page.dim_at(0, 1) == 1);  // h^1(O(-2))
  CHECK(page.dim_at(1, 1) == 1);  // h^0(O(0))
  CHECK(page.dim_at(1, 2) == 0);  // h^1(O(0))
  E1Result<Rat> deg = e1_degenerates(fc);
  CHECK(deg.degenerates);
  SpectralPage<Rat> einf = e_infinity(fc);
  CHECK(einf.dim_at(0, 1) == 1);
  CHECK(einf.dim_at(1, 0) == 1);
  CHECK(einf.total() == 2);

  // another instance, twisted differential only (u,v) = (0,1)
  FilteredComplex<Rat> fc2 = omega_f_filtered(inst_z2(), Rat(0), rat(0), rat(1), 14);
  CHECK(e1_degenerates(fc2).degenerates);
}

TEST_CASE("irregular Hodge filtration on the standing instances") {
  // f = z on G_m: one class, jump at λ = 1
  HodgeReport r1 = irregular_hodge(inst_z_gm(), 1, 12);
  CHECK(r1.h_total == 1);
  CHECK(r1.ambient_matches);
  CHECK(r1.monotone);
  CHECK(r1.full_at_zero);
  CHECK(r1.injective_all);
  CHECK(r1.sum_matches);
  CHECK(r1.integer_jumps_expected);
  CHECK(r1.integer_jumps);
  CHECK(r1.jumps == std::vector<std::pair<Rat, int>>{{Rat(1), 1}});

  // f = z + 1/z: two classes, jumps at 0 and 1
  HodgeReport r2 = irregular_hodge(inst_z_plus_inv(), 1, 12);
  CHECK(r2.h_total == 2);
  CHECK(r2.ambient_matches);
  CHECK(r2.monotone);
  CHECK(r2.injective_all);
  CHECK(r2.sum_matches);
  CHECK(r2.integer_jumps);
  CHECK(r2.jumps == std::vector<std::pair<Rat, int>>{{Rat(0), 1}, {Rat(1), 1}});

  // f = z^2: one class, jump at the half-integer 1/2
  HodgeReport r3 = irregular_hodge(inst_z2(), 1, 12);
  CHECK(r3.h_total == 1);
  CHECK(r3.ambient_matches);
  CHECK(!r3.integer_jumps_expected);
  CHECK(r3.jumps == std::vector<std::pair<Rat, int>>{{rat(1, 2), 1}});
  for (auto& [lam, g] : r3.jumps) CHECK(lam.get_den() <= 2);  // jumps in (1/2)Z
  CHECK(r3.sum_matches);
  CHECK(r3.injective_all);

  // f = z on the affine line: H^1 = 0, everything vacuous but consistent
  HodgeReport r4 = irregular_hodge(inst_z_a1(), 1, 12);
  CHECK(r4.h_total == 0);
  CHECK(r4.jumps.empty());
  CHECK(r4.sum_matches);
  CHECK(r4.full_at_zero);

  // H^0 is zero for an exponentially twisted irreducible instance
  HodgeReport r5 = irregular_hodge(inst_z_gm(), 0, 12);
  CHECK(r5.h_total == 0);
  CHECK(r5.sum_matches);

  // mixed instance: structural checks plus total dimension
  HodgeReport r6 = irregular_hodge(inst_z3_over_zm1(), 1, 10);
  CHECK(r6.h_total == 3);
  CHECK(r6.ambient_matches);
  CHECK(r6.monotone);
  CHECK(r6.full_at_zero);
  CHECK(r6.injective_all);
  CHECK(r6.sum_matches);
  int jump_sum = 0;
  for (auto& [lam, g] : r6.jumps) {
    CHECK(lam >= Rat(0));
    CHECK(lam.get_den() <= 2);
    jump_sum += g;
  }
  CHECK(jump_sum == 3);
}

TEST_CASE("stabilization failures are loud and carry both windows") {
  StabilizationError err({1, 2}, {1, 3}, 10, 15);
  std::string msg = err.what();
  CHECK(msg.find("10") != std::string::npos);
  CHECK(msg.find("15") != std::string::npos);
  CHECK(msg.find("1,2") != std::string::npos);
  CHECK(msg.find("1,3") != std::string::npos);
  CHECK(err.first == std::vector<int>{1, 2});
  CHECK(err.second == std::vector<int>{1, 3});
}
