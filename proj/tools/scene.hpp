#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vnpair/numkernel.hpp"

namespace vnpair::cli {

using json = nlohmann::json;

// complex entries are [re, im]; matrices are row-major nested arrays
json encode(cd z);
json encode(const CMatrix& m);
json encode(const std::vector<CMatrix>& ms);
json encode(const std::vector<cd>& v);
cd decode_complex(const json& j, const std::string& where);
CMatrix decode_matrix(const json& j, const std::string& where);

struct AlgebraSpec {
  std::vector<CMatrix> generators;
  std::string commutant_of;  // when set, the algebra is the commutant of another named algebra
  bool operator==(const AlgebraSpec&) const = default;
};

// exactly one of: identity, unitary (with conjugation), basis_images, generator_images
struct EndoSpec {
  std::string domain;
  bool identity = false;
  std::string unitary;
  std::string conjugation = "adjoint";  // adjoint: u^dagger b u, direct: u b u^dagger
  std::vector<CMatrix> basis_images;
  std::vector<CMatrix> generators;
  std::vector<CMatrix> generator_images;
  bool operator==(const EndoSpec&) const = default;
};

struct MultiplierSpec {
  std::string shape = "square";
  std::vector<std::vector<cd>> values;
  bool operator==(const MultiplierSpec&) const = default;
};

struct Scene {
  std::size_t ambient_dim = 0;
  std::map<std::string, AlgebraSpec> algebras;
  std::map<std::string, EndoSpec> endomorphisms;
  std::map<std::string, CMatrix> unitaries;
  std::map<std::string, MultiplierSpec> multipliers;
  std::map<std::string, std::vector<CMatrix>> families;
  std::map<std::string, std::vector<cd>> vectors;
  // command arguments by role, e.g. "theta": "swap"
  std::map<std::string, std::string> roles;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  bool operator==(const Scene&) const = default;
};

// throws Error(ParseError) with a json-pointer location
Scene parse_scene(const json& j);
Scene load_scene(const std::string& path);
json to_json(const Scene& s);

}  // namespace vnpair::cli
