#pragma once

#include "irrhodge/filt_fuzz.hpp"
#include "irrhodge/filtered.hpp"
#include "irrhodge/jsonutil.hpp"
#include "irrhodge/rees.hpp"
#include "irrhodge/spectral.hpp"

namespace irrhodge {

template <class K>
Json json_of_cochain(const CochainComplex<K>& c) {
  Json j;
  j["lo"] = c.lo;
  j["dims"] = c.dims;
  Json ds = Json::array();
  for (auto& m : c.d) ds.push_back(json_of_matrix(m));
  j["differentials"] = ds;
  return j;
}

template <class K>
Json json_of_filtered(const FilteredComplex<K>& fc) {
  Json j;
  j["base"] = json_of_cochain(fc.base);
  Json ls = Json::array();
  for (auto& l : fc.lambdas) ls.push_back(json_of(l));
  j["lambdas"] = ls;
  Json fil = Json::array();
  for (auto& level : fc.fil) {
    Json per = Json::array();
    for (auto& m : level) per.push_back(json_of_matrix(m));
    fil.push_back(per);
  }
  j["filtration"] = fil;
  return j;
}

inline CochainComplex<Rat> cochain_from_json(const Json& j) {
  CochainComplex<Rat> c;
  c.lo = j.at("lo").get<int>();
  c.dims = j.at("dims").get<std::vector<int>>();
  for (auto& m : j.at("differentials")) c.d.push_back(matrix_from_json(m));
  c.validate();
  return c;
}

inline FilteredComplex<Rat> filtered_from_json(const Json& j) {
  FilteredComplex<Rat> fc;
  fc.base = cochain_from_json(j.at("base"));
  for (auto& l : j.at("lambdas")) fc.lambdas.push_back(rat_from_json(l));
  for (auto& level : j.at("filtration")) {
    std::vector<Matrix<Rat>> per;
    for (auto& m : level) per.push_back(matrix_from_json(m));
    fc.fil.push_back(per);
  }
  fc.validate();
  return fc;
}

template <class K>
Json json_of_page(const SpectralPage<K>& p) {
  Json j;
  j["r"] = p.r;
  Json es = Json::array();
  for (auto& e : p.entries) {
    Json je;
    je["p"] = e.p;
    je["q"] = e.q;
    je["lambda"] = json_of(e.lambda);
    je["dim"] = e.dim;
    es.push_back(je);
  }
  j["entries"] = es;
  j["total"] = p.total();
  return j;
}

template <class K>
Json json_of_e1_witness(const E1Witness<K>& w) {
  Json j;
  j["lambda"] = json_of(w.lambda);
  j["degree"] = w.k;
  Json v = Json::array();
  for (auto& x : w.cls) v.push_back(json_of(x));
  j["class"] = v;
  return j;
}

template <class K>
Json json_of_rees_report(const ReesReport<K>& r) {
  Json j;
  j["torsion_free"] = r.torsion_free;
  j["torsion_exponent"] = r.torsion_exponent;
  Json per = Json::array();
  for (auto& h : r.per_degree) {
    Json jh;
    jh["k"] = h.k;
    jh["free_rank"] = h.free_rank;
    jh["torsion_exponents"] = h.torsion_exponents;
    per.push_back(jh);
  }
  j["per_degree"] = per;
  return j;
}

inline Json json_of_triple(const TripleVerdict& v) {
  Json j;
  j["strict"] = v.strict;
  j["e1_counts"] = v.e1_counts;
  j["rees_torsion_free"] = v.rees_free;
  j["e1_total"] = v.e1_total;
  j["h_total"] = v.h_total;
  j["torsion_exponent"] = v.torsion_exponent;
  j["agree"] = v.agree();
  return j;
}

}  // namespace irrhodge
