#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "vnpair/acceptance.hpp"
#include "vnpair/error.hpp"
#include "vnpair/multiplier.hpp"
#include "vnpair/pairing.hpp"

namespace vnpair::cli {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorKind::ParseError, where + ": " + what);
}

json encode_blocks(const BlockList& blocks) {
  json out = json::array();
  for (const auto& [d, m] : blocks) out.push_back({d, m});
  return out;
}

json encode_table(const MultiplicityTable& t) {
  return {{"left_blocks", encode_blocks(t.left_blocks)},
          {"right_commutant_blocks", encode_blocks(t.right_commutant_blocks)},
          {"multiplicities", t.m}};
}

json encode_multiplier(const Multiplier& m) {
  json rows = json::array();
  for (std::size_t s = 0; s <= m.grid(); ++s) {
    json row = json::array();
    for (std::size_t t = 0; t <= m.grid(); ++t) row.push_back(m.contains(s, t) ? encode(m(s, t)) : json(nullptr));
    rows.push_back(std::move(row));
  }
  return {{"shape", m.shape() == GridShape::Square ? "square" : "triangle"}, {"values", std::move(rows)}};
}

json encode_correspondence(const Correspondence& e) {
  return {{"carrier_dim", e.carrier_dim()},
          {"left_dim", e.left().dim()},
          {"right_dim", e.right().dim()},
          {"element_dim", e.element_space().size()},
          {"element_space", encode(e.element_space())}};
}

// Scene objects resolved on demand; algebras are cached so commutants are computed once.
class Context {
 public:
  Context(const Scene& s, Tolerance tol, std::optional<std::uint64_t> seed, std::size_t horizon)
      : scene(s), tol(tol), horizon(horizon), seed_(seed) {}

  const Scene& scene;
  Tolerance tol;
  std::size_t horizon;
  json payload = json::object();
  json diagnostics = json::object();

  std::uint64_t seed(std::uint64_t fallback) const { return seed_.value_or(fallback); }
  void diag(const std::string& name, double r) { diagnostics[name] = r; }

  // the object bound to a role, or the only object of its kind
  template <class M>
  std::string pick(const std::string& role, const M& table, const char* what) const {
    if (auto it = scene.roles.find(role); it != scene.roles.end()) {
      if (!table.count(it->second)) bad("/roles/" + role, std::string("unknown ") + what + " \"" + it->second + "\"");
      return it->second;
    }
    if (table.size() == 1) return table.begin()->first;
    bad("/roles/" + role, std::string("required: scene has ") + std::to_string(table.size()) + " " + what + "s");
  }

  const VnAlgebra& algebra(const std::string& name) {
    if (auto it = algebras_.find(name); it != algebras_.end()) return it->second;
    if (!pending_.insert(name).second) bad("/algebras/" + name, "commutant_of cycle");
    const AlgebraSpec& spec = scene.algebras.at(name);
    VnAlgebra a = spec.commutant_of.empty() ? from_generators(scene.ambient_dim, spec.generators, tol)
                                            : commutant(algebra(spec.commutant_of), tol);
    pending_.erase(name);
    return algebras_.emplace(name, std::move(a)).first->second;
  }
  const VnAlgebra& algebra_role(const std::string& role) { return algebra(pick(role, scene.algebras, "algebra")); }

  Endomorphism endo(const std::string& role) {
    const std::string name = pick(role, scene.endomorphisms, "endomorphism");
    const EndoSpec& e = scene.endomorphisms.at(name);
    const VnAlgebra& dom = algebra(e.domain);
    if (e.identity) return Endomorphism::identity(dom);
    if (!e.unitary.empty())
      return from_unitary(dom, scene.unitaries.at(e.unitary),
                          e.conjugation == "direct" ? Conjugation::Direct : Conjugation::ByAdjoint, tol);
    if (!e.basis_images.empty()) {
      if (e.basis_images.size() != dom.dim())
        bad("/endomorphisms/" + name + "/basis_images", "expected " + std::to_string(dom.dim()) + " images");
      return Endomorphism::make(dom, e.basis_images, tol);
    }
    return from_generator_images(dom, e.generators, e.generator_images, tol);
  }

  const CMatrix& unitary(const std::string& role) const {
    return scene.unitaries.at(pick(role, scene.unitaries, "unitary"));
  }

  Multiplier multiplier(const std::string& role) const {
    const MultiplierSpec& m = scene.multipliers.at(pick(role, scene.multipliers, "multiplier"));
    return Multiplier::validate(m.values, m.shape == "triangle" ? GridShape::Triangle : GridShape::Square, tol);
  }

  const std::vector<CMatrix>& family(const std::string& role) const {
    return scene.families.at(pick(role, scene.families, "family"));
  }

  CMatrix vector(const std::string& role) const {
    return CMatrix::column(scene.vectors.at(pick(role, scene.vectors, "vector")));
  }

  void correspondence_diagnostics(const std::string& prefix, const Correspondence& e) {
    const auto v = e.validate();
    diag(prefix + "rho", v.rho.worst());
    diag(prefix + "rho_prime", v.rho_prime.worst());
    diag(prefix + "commuting", v.commuting);
    diag(prefix + "inner_products", v.inner_products);
    diag(prefix + "nondegenerate", v.nondegenerate ? 0.0 : 1.0);
  }

  void system_diagnostics(const std::string& prefix, const DiscreteProductSystem& p) {
    const auto v = p.validate(tol);
    diag(prefix + "unitarity", v.unitarity);
    diag(prefix + "bilinearity", v.bilinearity);
    diag(prefix + "associativity", v.associativity);
    diag(prefix + "marginal", v.marginal);
    diag(prefix + "identity_unit", v.identity_unit ? 0.0 : 1.0);
  }

 private:
  std::optional<std::uint64_t> seed_;
  std::map<std::string, VnAlgebra> algebras_;
  std::set<std::string> pending_;
};

json system_payload(const DiscreteProductSystem& p) {
  json carriers = json::array(), products = json::array();
  for (std::size_t t = 0; t <= p.horizon(); ++t) carriers.push_back(p.member(t).carrier_dim());
  for (std::size_t s = 0; s <= p.horizon(); ++s)
    for (std::size_t t = 0; s + t <= p.horizon(); ++t)
      products.push_back({{"s", s}, {"t", t}, {"unitary", encode(p.product(s, t))}});
  return {{"horizon", p.horizon()}, {"carrier_dims", carriers}, {"products", products}};
}

using Handler = std::function<void(Context&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table{
      {"algebra-commutant",
       [](Context& c) {
         const VnAlgebra& a = c.algebra_role("algebra");
         const VnAlgebra ac = commutant(a, c.tol);
         c.payload = {{"dim", ac.dim()}, {"basis", encode(ac.basis())}};
         c.diag("algebra_laws", ac.validate().worst());
         c.diag("double_commutant", equals(a, commutant(ac, c.tol), c.tol).residual);
       }},
      {"algebra-blocks",
       [](Context& c) {
         const VnAlgebra& a = c.algebra_role("algebra");
         const BlockSignature sig = block_decompose(a, c.seed(0x5eed), c.tol);
         CMatrix sum(a.ambient_dim(), a.ambient_dim());
         std::size_t dim = 0;
         for (std::size_t i = 0; i < sig.blocks.size(); ++i) {
           sum += sig.central_projections[i];
           dim += sig.blocks[i].first * sig.blocks[i].first;
         }
         c.payload = {{"dim", a.dim()},
                      {"blocks", encode_blocks(sig.blocks)},
                      {"central_projections", encode(sig.central_projections)}};
         c.diag("projection_sum", scaled_residual(sum, CMatrix::identity(a.ambient_dim())));
         c.diag("dimension_law", dim == a.dim() ? 0.0 : 1.0);
       }},
      {"endo-validate",
       [](Context& c) {
         const Endomorphism th = c.endo("theta");
         const auto f = faithfulness(th, c.tol);
         const auto h = th.map().hom_residuals();
         double invariance = 0.0;
         for (const auto& x : th.images()) invariance = std::max(invariance, th.domain().span_residual(x));
         c.payload = {{"domain_dim", th.domain().dim()},
                      {"images", encode(th.images())},
                      {"rank", f.rank},
                      {"faithful", f.injective},
                      {"automorphism", f.injective && f.surjective}};
         c.diag("unital", h.unital);
         c.diag("multiplicative", h.multiplicative);
         c.diag("star", h.star);
         c.diag("invariance", invariance);
       }},
      {"corr-of-endo",
       [](Context& c) {
         const Correspondence e = of_endomorphism(c.endo("theta"), c.tol);
         c.payload = encode_correspondence(e);
         c.correspondence_diagnostics("", e);
       }},
      {"corr-intertwiners",
       [](Context& c) {
         const Correspondence e = intertwiner_space(c.endo("theta"), c.tol);
         c.payload = encode_correspondence(e);
         c.correspondence_diagnostics("", e);
       }},
      {"corr-commutant",
       [](Context& c) {
         const Correspondence e = of_endomorphism(c.endo("theta"), c.tol);
         const Correspondence ec = commutant(e);
         c.payload = encode_correspondence(ec);
         c.correspondence_diagnostics("", ec);
         c.diag("involution", commutant(ec) == e ? 0.0 : 1.0);
       }},
      {"corr-tensor",
       [](Context& c) {
         const Correspondence e = of_endomorphism(c.endo("theta"), c.tol);
         const Correspondence f = of_endomorphism(c.endo("theta2"), c.tol);
         const TensorProduct tp = tensor_product(e, f, c.tol);
         c.payload = encode_correspondence(tp.result);
         c.payload["raw_dim"] = tp.raw_dim();
         c.payload["embed"] = encode(tp.embed);
         c.correspondence_diagnostics("", tp.result);
         c.diag("lift", scaled_residual(tp.embed * tp.lift, CMatrix::identity(tp.result.carrier_dim())));
       }},
      {"corr-iso",
       [](Context& c) {
         const Correspondence e = of_endomorphism(c.endo("theta"), c.tol);
         const Correspondence f = of_endomorphism(c.endo("theta2"), c.tol);
         const IsomorphismResult r = find_isomorphism(e, f, c.seed(0x150), c.tol);
         c.payload = {{"found", r.found}, {"table_e", encode_table(r.table_e)}, {"table_f", encode_table(r.table_f)}};
         if (r.found) {
           c.payload["unitary"] = encode(r.unitary);
           c.diag("bimodule", bimodule_unitary_residual(e, f, r.unitary));
         }
       }},
      {"prodsys-build",
       [](Context& c) {
         const EndomorphismSystem p = from_endomorphism(c.endo("theta"), c.horizon, c.tol);
         c.payload = system_payload(p.system);
         json maps = json::array();
         for (const auto& v : p.left.maps) maps.push_back(encode(v));
         c.payload["left_dilation"] = std::move(maps);
         c.system_diagnostics("", p.system);
         c.diag("recovery", p.recovery);
         c.diag("dilation", validate_dilation(p.system, p.left, c.tol).worst());
       }},
      {"prodsys-commutant",
       [](Context& c) {
         const EndomorphismSystem p = from_endomorphism(c.endo("theta"), c.horizon, c.tol);
         const CommutantSystem q = commutant_system(p, c.tol);
         c.payload = system_payload(q.system);
         c.system_diagnostics("", q.system);
         c.diag("order_check", q.order_check);
       }},
      {"bhat",
       [](Context& c) {
         const BhatSystem b = bhat_system(c.endo("theta"), c.vector("gamma"), c.horizon, c.tol);
         json dims = json::array();
         for (const auto& s : b.spaces) dims.push_back(s.cols());
         c.payload = {{"dims", dims}, {"spaces", encode(b.spaces)}, {"dilation", encode(b.dilation)}};
         c.diag("unitarity", b.unitarity);
         c.diag("associativity", b.associativity);
         c.diag("recovery", b.recovery);
       }},
      {"dilation-commutant",
       [](Context& c) {
         const EndomorphismSystem p = from_endomorphism(c.endo("theta"), c.horizon, c.tol);
         const DilationFamily w = right_dilation_from_unitary(p, c.unitary("unitary"), c.tol);
         const DilationCommutant d = commutant_via_dilation(p, w, std::nullopt, c.seed(0x10), c.tol);
         c.payload = system_payload(d.f_prime);
         c.payload["xi"] = encode(d.xi);
         c.payload["projections"] = encode(d.projections);
         c.payload["nu"] = encode(d.nu);
         c.diag("unitarity", d.unitarity);
         c.diag("well_defined", d.well_defined);
         c.diag("intertwining", d.intertwining);
         c.diag("product", d.product);
         c.system_diagnostics("system_", d.f_prime);
       }},
      {"mult-check",
       [](Context& c) {
         const Multiplier m = c.multiplier("multiplier");
         c.payload = encode_multiplier(m);
         c.diag("unimodular", m.residuals().unimodular);
         c.diag("boundary", m.residuals().boundary);
         c.diag("cocycle", m.residuals().cocycle);
       }},
      {"mult-trivialize",
       [](Context& c) {
         const Trivialization t = trivialize(c.multiplier("multiplier"), c.tol);
         c.payload = {{"f", encode(t.f)}};
         c.diag("trivialization", t.residual);
       }},
      {"mult-extract",
       [](Context& c) {
         const Multiplier m = extract(c.family("family"), c.tol);
         const Trivialization t = trivialize(m, c.tol);
         c.payload = encode_multiplier(m);
         c.payload["f"] = encode(t.f);
         c.diag("unimodular", m.residuals().unimodular);
         c.diag("cocycle", m.residuals().cocycle);
         c.diag("boundary", m.residuals().boundary);
         c.diag("trivialization", t.residual);
       }},
      {"pair",
       [](Context& c) {
         const Endomorphism th = c.endo("theta");
         const Endomorphism thp = c.endo("theta_prime");
         const PairingCertificate p = can_pair(th, thp, c.seed(0x150), c.tol);
         c.payload = {{"outcome", p.paired ? "Paired" : "NotPaired"}};
         if (p.paired) {
           c.payload["unitary"] = encode(p.unitary);
           c.diag("relation_b", p.relation_b);
           c.diag("relation_b_prime", p.relation_b_prime);
         } else {
           c.payload["table_e"] = encode_table(p.table_e);
           c.payload["table_f"] = encode_table(p.table_f);
         }
       }},
      {"pair-check",
       [](Context& c) {
         const Endomorphism th = c.endo("theta");
         const Endomorphism thp = c.endo("theta_prime");
         const CMatrix& u = c.unitary("unitary");
         const PairingCertificate p = check_pairing(u, th, thp, c.horizon, c.tol);
         const PairingIsomorphism iso = isomorphism_from_pairing(u, th, thp, c.tol);
         c.payload = {{"paired", p.paired}, {"horizon", c.horizon}};
         c.diag("relation_b", p.relation_b);
         c.diag("relation_b_prime", p.relation_b_prime);
         c.diag("iso_inner_products", iso.inner_products);
         c.diag("iso_right_linearity", iso.right_linearity);
         c.diag("iso_covariance", iso.covariance);
         c.diag("iso_target_span", iso.target_span);
         c.diag("iso_bimodule", iso.bimodule);
       }},
      {"cocycle-link",
       [](Context& c) {
         const Endomorphism th1 = c.endo("theta");
         const Endomorphism th2 = c.endo("theta2");
         const Endomorphism thp = c.endo("theta_prime");
         const CocycleFamily f = cocycle_link(th1, th2, thp, c.horizon, c.tol);
         c.payload = {{"cocycle", encode(f.c)}, {"u1", encode(f.u1)}, {"u2", encode(f.u2)}};
         c.diag("cocycle", f.residual);
       }},
      {"symmetry-check",
       [](Context& c) {
         const RestrictionVerdict v = restriction_symmetry(c.unitary("unitary"), c.algebra_role("algebra"), c.tol);
         // both verdicts are answers, not checks: residuals stay in the payload
         c.payload = {{"algebra", v.algebra},
                      {"commutant", v.commutant},
                      {"algebra_residual", v.algebra_residual},
                      {"commutant_residual", v.commutant_residual}};
       }},
  };
  return table;
}

json failure_json(const FailedCase& f) {
  return {{"criterion", f.criterion}, {"index", f.index}, {"case_seed", f.case_seed}, {"residual", f.residual},
          {"note", f.note}};
}

// selftest payload and status; per-criterion seconds go to timing so reports compare equal across runs
bool selftest(const Options& opt, json& payload, json& timing) {
  if (opt.replay) {
    std::ifstream in(*opt.replay);
    if (!in) fail(ErrorKind::ParseError, *opt.replay + ": cannot open");
    json old;
    try {
      old = json::parse(in);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::ParseError, *opt.replay + ": " + e.what());
    }
    if (!old.contains("payload") || !old["payload"].contains("criteria"))
      bad(*opt.replay, "not a selftest report");
    bool ok = true;
    json replays = json::array();
    for (const auto& c : old["payload"]["criteria"]) {
      if (!c.contains("failure")) continue;
      const json& f = c["failure"];
      const int id = f.at("criterion").get<int>();
      const std::uint64_t s = f.at("case_seed").get<std::uint64_t>();
      const CaseOutcome o = replay_case(id, s);
      const double recorded = f.at("residual").is_number() ? f["residual"].get<double>() : 0.0;
      replays.push_back({{"criterion", id},
                         {"case_seed", s},
                         {"residual", o.residual},
                         {"recorded_residual", recorded},
                         {"reproduced", o.residual == recorded},
                         {"ok", o.ok},
                         {"note", o.note}});
      ok = ok && o.ok;
    }
    payload = {{"replays", replays}};
    return ok;
  }
  SelftestOptions so;
  so.seed = opt.seed.value_or(kDefaultSelftestSeed);
  so.scale = opt.scale;
  so.only = opt.only;
  bool ok = true;
  json criteria = json::array();
  timing["criteria"] = json::object();
  for (const CriterionReport& r : run_selftest(so)) {
    json j{{"id", r.id},
           {"name", r.name},
           {"cases", r.cases},
           {"worst", r.worst},
           {"tolerance", r.tolerance},
           {"time_limit", r.time_limit},
           {"pass", r.pass}};
    if (r.failure) j["failure"] = failure_json(*r.failure);
    timing["criteria"][std::to_string(r.id)] = r.seconds;
    criteria.push_back(std::move(j));
    ok = ok && r.pass;
  }
  payload = {{"seed", so.seed}, {"scale", so.scale}, {"criteria", criteria}};
  return ok;
}

Tolerance active_tolerance(const Options& opt, const Scene* scene) {
  Tolerance tol = Tolerance::from_env();
  if (scene && scene->tolerance) tol.eps = *scene->tolerance;
  if (opt.tol) {
    if (!(*opt.tol > 0)) fail(ErrorKind::ParseError, "--tol: must be positive");
    tol.eps = *opt.tol;
  }
  return tol;
}

Outcome execute(const Options& opt, const Scene* scene) {
  const auto t0 = std::chrono::steady_clock::now();
  json report{{"command", opt.command},
              {"input", opt.input ? json(*opt.input) : json(nullptr)},
              {"status", "ok"},
              {"payload", json::object()},
              {"diagnostics", json::object()}};
  json timing = json::object();
  int code = 0;
  auto set_error = [&](std::string_view kind, const std::string& msg, double residual, int c) {
    report["status"] = "fail";
    report["error"] = {{"kind", kind}, {"message", msg}, {"residual", residual}};
    code = c;
  };
  try {
    const bool known = opt.command == "selftest" || handlers().count(opt.command);
    if (!known) fail(ErrorKind::ParseError, "unknown command \"" + opt.command + "\"");
    Scene loaded;
    if (!scene && opt.command != "selftest") {
      if (!opt.input) fail(ErrorKind::ParseError, "--input is required for " + opt.command);
      loaded = load_scene(*opt.input);
      scene = &loaded;
    }
    const Tolerance tol = active_tolerance(opt, scene);
    report["tolerance"] = tol.eps;
    if (opt.command == "selftest") {
      json payload;
      if (!selftest(opt, payload, timing)) set_error("ValidationFailure", "selftest property failed", 0.0, 1);
      report["payload"] = std::move(payload);
    } else {
      std::optional<std::uint64_t> seed = opt.seed ? opt.seed : scene->seed;
      Context ctx(*scene, tol, seed, opt.horizon.value_or(3));
      handlers().at(opt.command)(ctx);
      report["payload"] = std::move(ctx.payload);
      report["diagnostics"] = ctx.diagnostics;
      for (const auto& [name, r] : ctx.diagnostics.items())
        if (!r.is_number() || !(r.get<double>() <= tol.eps)) {
          const double v = r.is_number() ? r.get<double>() : 0.0;
          set_error("ValidationFailure", "diagnostic " + name + " exceeds the tolerance", v, 1);
          break;
        }
    }
  } catch (const Error& e) {
    set_error(to_string(e.kind()), e.what(), e.residual(), e.kind() == ErrorKind::ParseError ? 2 : 1);
  } catch (const json::exception& e) {
    set_error("ParseError", e.what(), 0.0, 2);
  } catch (const std::exception& e) {
    set_error("InternalError", e.what(), 0.0, 1);
  }
  timing["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report["timing"] = std::move(timing);
  return {std::move(report), code};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, h] : handlers()) v.push_back(name);
    v.push_back("selftest");
    return v;
  }();
  return names;
}

Outcome run_command(const Options& opt) { return execute(opt, nullptr); }

Outcome run_command(const Options& opt, const Scene& scene) { return execute(opt, &scene); }

std::string summary(const json& report) {
  auto fmt = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return std::string(buf);
  };
  std::string s = report.value("command", std::string("?")) + ": " + report.value("status", std::string("?"));
  if (report.contains("error"))
    s += " [" + report["error"].value("kind", std::string()) + "] " + report["error"].value("message", std::string());
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [name, r] : report["diagnostics"].items())
    if (r.is_number() && r.get<double>() >= worst) {
      worst = r.get<double>();
      worst_name = name;
    }
  if (!worst_name.empty()) s += " (worst diagnostic " + worst_name + " = " + fmt(worst) + ")";
  if (report["payload"].contains("outcome")) s += " outcome " + report["payload"]["outcome"].get<std::string>();
  if (report["payload"].contains("criteria"))
    for (const auto& c : report["payload"]["criteria"])
      s += "\n  criterion " + std::to_string(c["id"].get<int>()) + " " + c["name"].get<std::string>() + ": " +
           (c["pass"].get<bool>() ? "PASS" : "FAIL") + " (" + std::to_string(c["cases"].get<std::size_t>()) +
           " cases, worst " + fmt(c["worst"].is_number() ? c["worst"].get<double>() : 0.0) + ")";
  return s;
}

}  // namespace vnpair::cli
