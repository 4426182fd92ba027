#pragma once

#include <json.hpp>

#include "irrhodge/field.hpp"
#include "irrhodge/matrix.hpp"
#include "irrhodge/poly.hpp"

namespace irrhodge {

// Canonical report JSON: key order is insertion order (ordered_json), values
// are integers and strings only — rationals as [num, den] pairs — so that
// identical runs serialize to identical bytes.
using Json = nlohmann::ordered_json;

inline Json json_of(const Rat& x) {
  Json j = Json::array();
  mpz_class num = x.get_num(), den = x.get_den();
  auto put = [&](const mpz_class& z) {
    if (z.fits_slong_p() && std::abs(z.get_si()) < (1L << 53))
      j.push_back((long long)z.get_si());
    else
      j.push_back(z.get_str());
  };
  put(num);
  put(den);
  return j;
}

inline Json json_of(const Fp& x) { return Json(x.v); }

template <class K>
Json json_of_matrix(const Matrix<K>& m) {
  Json j;
  j["nrows"] = m.nr;
  j["ncols"] = m.nc;
  Json rows = Json::array();
  auto dense = m.to_dense();
  for (auto& row : dense) {
    Json r = Json::array();
    for (auto& v : row) r.push_back(json_of(v));
    rows.push_back(r);
  }
  j["entries"] = rows;
  return j;
}

template <class K>
Json json_of_poly(const Poly<K>& p) {
  Json j = Json::array();
  for (auto& c : p.c) j.push_back(json_of(c));
  return j;
}

inline Matrix<Rat> matrix_from_json(const Json& j);

inline Rat rat_from_json(const Json& j) {
  if (j.is_number_integer()) return Rat((long)j.get<long long>());
  if (j.is_string()) return Rat(j.get<std::string>());
  if (j.is_array() && j.size() == 2) {
    auto part = [&](const Json& e) -> mpz_class {
      if (e.is_string()) return mpz_class(e.get<std::string>());
      return mpz_class((long)e.get<long long>());
    };
    Rat r(part(j[0]), part(j[1]));
    r.canonicalize();
    return r;
  }
  throw std::invalid_argument("rat_from_json: expected int, string, or [num,den]");
}

inline Matrix<Rat> matrix_from_json(const Json& j) {
  Matrix<Rat> m(j.at("nrows").get<int>(), j.at("ncols").get<int>());
  const Json& rows = j.at("entries");
  for (int i = 0; i < m.nr; ++i)
    for (int c = 0; c < m.nc; ++c) {
      Rat v = rat_from_json(rows.at(i).at(c));
      if (!is_zero(v)) m.rows[i][c] = v;
    }
  return m;
}

}  // namespace irrhodge
