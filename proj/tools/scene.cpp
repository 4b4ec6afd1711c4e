#include "scene.hpp"

#include <fstream>
#include <set>

#include "vnpair/error.hpp"

namespace vnpair::cli {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorKind::ParseError, (where.empty() ? std::string("/") : where) + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where, std::string("missing \"") + key + "\"");
  return j.at(key);
}

std::vector<CMatrix> decode_matrices(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of matrices");
  std::vector<CMatrix> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(decode_matrix(j[k], where + "/" + std::to_string(k)));
  return out;
}

std::vector<cd> decode_vector(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of complex numbers");
  std::vector<cd> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(decode_complex(j[k], where + "/" + std::to_string(k)));
  return out;
}

void check_square(const std::vector<CMatrix>& ms, std::size_t n, const std::string& where) {
  for (std::size_t k = 0; k < ms.size(); ++k)
    if (ms[k].rows() != n || ms[k].cols() != n)
      bad(where + "/" + std::to_string(k), "matrix must be " + std::to_string(n) + " x " + std::to_string(n));
}

template <class M>
void check_name(const M& table, const std::string& name, const std::string& where, const char* what) {
  if (!table.count(name)) bad(where, std::string("unknown ") + what + " \"" + name + "\"");
}

}  // namespace

json encode(cd z) { return json::array({z.real(), z.imag()}); }

json encode(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(encode(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json encode(const std::vector<CMatrix>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(encode(m));
  return out;
}

json encode(const std::vector<cd>& v) {
  json out = json::array();
  for (const cd& z : v) out.push_back(encode(z));
  return out;
}

cd decode_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  bad(where, "expected [re, im] or a real number");
}

CMatrix decode_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) bad(where + "/0", "expected a non-empty row");
  const std::size_t cols = j[0].size();
  CMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rw = where + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != cols) bad(rw, "rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = decode_complex(j[r][c], rw + "/" + std::to_string(c));
  }
  return m;
}

Scene parse_scene(const json& j) {
  if (!j.is_object()) bad("", "scene must be an object");
  static const std::set<std::string> known{"ambient_dim", "algebras", "endomorphisms", "unitaries", "multipliers",
                                           "families",    "vectors",  "roles",         "tolerance", "seed"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) bad("/" + key, "unknown field");
  Scene s;
  const json& n = field(j, "ambient_dim", "");
  if (!n.is_number_integer() || n.get<long long>() <= 0) bad("/ambient_dim", "must be a positive integer");
  s.ambient_dim = n.get<std::size_t>();
  if (j.contains("tolerance")) {
    if (!j["tolerance"].is_number() || !(j["tolerance"].get<double>() > 0)) bad("/tolerance", "must be a positive number");
    s.tolerance = j["tolerance"].get<double>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0)) bad("/seed", "must be an unsigned integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  auto section = [&](const char* key) -> const json& {
    static const json empty = json::object();
    if (!j.contains(key)) return empty;
    if (!j[key].is_object()) bad(std::string("/") + key, "must be an object of named entries");
    return j[key];
  };
  for (const auto& [name, a] : section("algebras").items()) {
    const std::string w = "/algebras/" + name;
    AlgebraSpec spec;
    if (a.contains("commutant_of")) {
      if (!a["commutant_of"].is_string()) bad(w + "/commutant_of", "must be a name");
      spec.commutant_of = a["commutant_of"].get<std::string>();
    } else {
      spec.generators = decode_matrices(field(a, "generators", w), w + "/generators");
      check_square(spec.generators, s.ambient_dim, w + "/generators");
    }
    s.algebras[name] = std::move(spec);
  }
  for (const auto& [name, a] : s.algebras)
    if (!a.commutant_of.empty()) {
      check_name(s.algebras, a.commutant_of, "/algebras/" + name + "/commutant_of", "algebra");
      if (a.commutant_of == name) bad("/algebras/" + name + "/commutant_of", "an algebra cannot be its own commutant source");
    }
  for (const auto& [name, u] : section("unitaries").items()) {
    const std::string w = "/unitaries/" + name;
    CMatrix m = decode_matrix(u, w);
    check_square({m}, s.ambient_dim, w);
    s.unitaries[name] = std::move(m);
  }
  for (const auto& [name, e] : section("endomorphisms").items()) {
    const std::string w = "/endomorphisms/" + name;
    EndoSpec spec;
    const json& d = field(e, "domain", w);
    if (!d.is_string()) bad(w + "/domain", "must be a name");
    spec.domain = d.get<std::string>();
    check_name(s.algebras, spec.domain, w + "/domain", "algebra");
    int kinds = 0;
    if (e.contains("identity")) {
      if (!e["identity"].is_boolean()) bad(w + "/identity", "must be a boolean");
      spec.identity = e["identity"].get<bool>();
      kinds += spec.identity;
    }
    if (e.contains("unitary")) {
      if (!e["unitary"].is_string()) bad(w + "/unitary", "must be a name");
      spec.unitary = e["unitary"].get<std::string>();
      check_name(s.unitaries, spec.unitary, w + "/unitary", "unitary");
      if (e.contains("conjugation")) {
        if (!e["conjugation"].is_string()) bad(w + "/conjugation", "must be \"adjoint\" or \"direct\"");
        spec.conjugation = e["conjugation"].get<std::string>();
        if (spec.conjugation != "adjoint" && spec.conjugation != "direct")
          bad(w + "/conjugation", "must be \"adjoint\" or \"direct\"");
      }
      ++kinds;
    }
    if (e.contains("basis_images")) {
      spec.basis_images = decode_matrices(e["basis_images"], w + "/basis_images");
      check_square(spec.basis_images, s.ambient_dim, w + "/basis_images");
      ++kinds;
    }
    if (e.contains("generator_images")) {
      spec.generators = decode_matrices(field(e, "generators", w), w + "/generators");
      spec.generator_images = decode_matrices(e["generator_images"], w + "/generator_images");
      check_square(spec.generators, s.ambient_dim, w + "/generators");
      check_square(spec.generator_images, s.ambient_dim, w + "/generator_images");
      if (spec.generators.size() != spec.generator_images.size()) bad(w, "one image per generator");
      ++kinds;
    }
    if (kinds != 1) bad(w, "give exactly one of identity, unitary, basis_images, generator_images");
    s.endomorphisms[name] = std::move(spec);
  }
  for (const auto& [name, m] : section("multipliers").items()) {
    const std::string w = "/multipliers/" + name;
    MultiplierSpec spec;
    if (m.contains("shape")) {
      if (!m["shape"].is_string()) bad(w + "/shape", "must be \"square\" or \"triangle\"");
      spec.shape = m["shape"].get<std::string>();
      if (spec.shape != "square" && spec.shape != "triangle") bad(w + "/shape", "must be \"square\" or \"triangle\"");
    }
    const json& v = field(m, "values", w);
    if (!v.is_array() || v.empty()) bad(w + "/values", "expected a non-empty grid");
    for (std::size_t r = 0; r < v.size(); ++r) {
      // null marks an entry off the shape
      json row = v[r];
      if (row.is_array())
        for (auto& z : row)
          if (z.is_null()) z = 0.0;
      spec.values.push_back(decode_vector(row, w + "/values/" + std::to_string(r)));
      if (spec.values.back().size() != v.size()) bad(w + "/values/" + std::to_string(r), "grid must be (N+1) x (N+1)");
    }
    s.multipliers[name] = std::move(spec);
  }
  for (const auto& [name, f] : section("families").items()) {
    const std::string w = "/families/" + name;
    auto ms = decode_matrices(f, w);
    if (ms.empty()) bad(w, "family must not be empty");
    check_square(ms, s.ambient_dim, w);
    s.families[name] = std::move(ms);
  }
  for (const auto& [name, v] : section("vectors").items()) {
    const std::string w = "/vectors/" + name;
    auto x = decode_vector(v, w);
    if (x.size() != s.ambient_dim) bad(w, "vector length must be ambient_dim");
    s.vectors[name] = std::move(x);
  }
  for (const auto& [role, v] : section("roles").items()) {
    if (!v.is_string()) bad("/roles/" + role, "must be a name");
    s.roles[role] = v.get<std::string>();
  }
  return s;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, path + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ParseError, path + ": " + e.what());
  }
  return parse_scene(j);
}

json to_json(const Scene& s) {
  json j;
  j["ambient_dim"] = s.ambient_dim;
  if (s.tolerance) j["tolerance"] = *s.tolerance;
  if (s.seed) j["seed"] = *s.seed;
  for (const auto& [name, a] : s.algebras) {
    if (!a.commutant_of.empty())
      j["algebras"][name] = {{"commutant_of", a.commutant_of}};
    else
      j["algebras"][name] = {{"generators", encode(a.generators)}};
  }
  for (const auto& [name, e] : s.endomorphisms) {
    json o{{"domain", e.domain}};
    if (e.identity) o["identity"] = true;
    if (!e.unitary.empty()) {
      o["unitary"] = e.unitary;
      o["conjugation"] = e.conjugation;
    }
    if (!e.basis_images.empty()) o["basis_images"] = encode(e.basis_images);
    if (!e.generator_images.empty()) {
      o["generators"] = encode(e.generators);
      o["generator_images"] = encode(e.generator_images);
    }
    j["endomorphisms"][name] = std::move(o);
  }
  for (const auto& [name, u] : s.unitaries) j["unitaries"][name] = encode(u);
  for (const auto& [name, m] : s.multipliers) {
    json rows = json::array();
    for (const auto& r : m.values) rows.push_back(encode(r));
    j["multipliers"][name] = {{"shape", m.shape}, {"values", std::move(rows)}};
  }
  for (const auto& [name, f] : s.families) j["families"][name] = encode(f);
  for (const auto& [name, v] : s.vectors) j["vectors"][name] = encode(v);
  for (const auto& [role, v] : s.roles) j["roles"][role] = v;
  return j;
}

}  // namespace vnpair::cli
