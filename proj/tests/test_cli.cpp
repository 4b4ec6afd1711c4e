#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "commands.hpp"
#include "vnpair/acceptance.hpp"
#include "vnpair/error.hpp"

using namespace vnpair;
using namespace vnpair::cli;

namespace {

const char* kD2 = R"({
  "ambient_dim": 2,
  "algebras": {"B": {"generators": [[[1, 0], [0, 0]]]}, "Bp": {"commutant_of": "B"}},
  "unitaries": {"swap": [[0, 1], [1, 0]], "hadamard": [[0.7071067811865476, 0.7071067811865476],
                                                       [0.7071067811865476, -0.7071067811865476]]},
  "endomorphisms": {"swap": {"domain": "B", "unitary": "swap"},
                    "id": {"domain": "B", "identity": true},
                    "idp": {"domain": "Bp", "identity": true},
                    "swapp": {"domain": "Bp", "unitary": "swap", "conjugation": "direct"}},
  "roles": {"algebra": "B", "theta": "swap", "theta2": "swap", "theta_prime": "swapp", "unitary": "swap"}
})";

Scene d2(std::map<std::string, std::string> roles = {}) {
  Scene s = parse_scene(json::parse(kD2));
  for (const auto& [k, v] : roles) s.roles[k] = v;
  return s;
}

Scene exp_grid(std::size_t n, double theta, double perturb = 0.0) {
  json values = json::array();
  for (std::size_t s = 0; s <= n; ++s) {
    json row = json::array();
    for (std::size_t t = 0; t <= n; ++t) {
      const double a = theta * double(s * t) + (s == 2 && t == 1 ? perturb : 0.0);
      row.push_back({std::cos(a), std::sin(a)});
    }
    values.push_back(row);
  }
  return parse_scene({{"ambient_dim", 1}, {"multipliers", {{"m", {{"shape", "square"}, {"values", values}}}}}});
}

Outcome run(const std::string& cmd, const Scene& s, std::optional<double> tol = std::nullopt) {
  Options o;
  o.command = cmd;
  o.tol = tol;
  return run_command(o, s);
}

cd complex_of(const json& j) { return {j[0].get<double>(), j[1].get<double>()}; }

ErrorKind parse_kind(const json& j, std::string* msg = nullptr) {
  try {
    parse_scene(j);
  } catch (const Error& e) {
    if (msg) *msg = e.what();
    return e.kind();
  }
  return ErrorKind::InternalError;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  auto p = std::filesystem::temp_directory_path() / ("vnpair_cli_" + name);
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Scene, RoundTripFixture) {
  const Scene s = d2();
  const Scene back = parse_scene(json::parse(to_json(s).dump()));
  EXPECT_TRUE(back == s);
  EXPECT_EQ(to_json(back), to_json(s));
}

TEST(Scene, RoundTripRandom) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const std::size_t n = 1 + rng.below(4);
    Scene s;
    s.ambient_dim = n;
    s.tolerance = 1e-6 * (1 + rng.uniform());
    s.seed = rng.next();
    s.algebras["A"].generators = {rng.gaussian(n, n), rng.hermitian(n)};
    s.algebras["C"].commutant_of = "A";
    s.unitaries["u"] = random_unitary(n, rng.next());
    s.endomorphisms["e"].domain = "A";
    s.endomorphisms["e"].unitary = "u";
    s.endomorphisms["e"].conjugation = rng.below(2) ? "direct" : "adjoint";
    s.endomorphisms["g"].domain = "C";
    s.endomorphisms["g"].generators = {rng.gaussian(n, n)};
    s.endomorphisms["g"].generator_images = {rng.gaussian(n, n)};
    s.endomorphisms["i"].domain = "A";
    s.endomorphisms["i"].identity = true;
    const std::size_t g = 1 + rng.below(3);
    s.multipliers["m"].shape = rng.below(2) ? "square" : "triangle";
    s.multipliers["m"].values.assign(g + 1, std::vector<cd>(g + 1));
    for (auto& row : s.multipliers["m"].values)
      for (auto& z : row) z = rng.cnormal();
    s.families["f"] = {rng.gaussian(n, n), rng.gaussian(n, n)};
    for (std::size_t k = 0; k < n; ++k) s.vectors["v"].push_back(rng.cnormal());
    s.roles["theta"] = "e";
    const Scene back = parse_scene(json::parse(to_json(s).dump()));
    EXPECT_TRUE(back == s) << "seed " << seed;
  }
}

TEST(Scene, ParseErrorsCarryLocation) {
  std::string msg;
  EXPECT_EQ(parse_kind(json::parse(R"({"algebras": {}})"), &msg), ErrorKind::ParseError);
  EXPECT_NE(msg.find("ambient_dim"), std::string::npos);

  EXPECT_EQ(parse_kind(json::parse(R"({"ambient_dim": 2, "algebras": {"B": {"generators": [[[1]]]}}})"), &msg),
            ErrorKind::ParseError);
  EXPECT_NE(msg.find("/algebras/B/generators/0"), std::string::npos);

  EXPECT_EQ(parse_kind(json::parse(R"({"ambient_dim": 1, "algebras": {"B": {"commutant_of": "X"}}})"), &msg),
            ErrorKind::ParseError);
  EXPECT_NE(msg.find("/algebras/B/commutant_of"), std::string::npos);

  EXPECT_EQ(parse_kind(json::parse(R"({"ambient_dim": 1, "algebras": {"B": {"generators": []}},
      "endomorphisms": {"e": {"domain": "B"}}})"), &msg), ErrorKind::ParseError);
  EXPECT_NE(msg.find("/endomorphisms/e"), std::string::npos);

  EXPECT_EQ(parse_kind(json::parse(R"({"ambient_dim": 1, "vectors": {"v": [[1, 2, 3]]}})"), &msg),
            ErrorKind::ParseError);
  EXPECT_NE(msg.find("/vectors/v/0"), std::string::npos);

  EXPECT_EQ(parse_kind(json::parse(R"({"ambient_dim": 1, "colour": 3})"), &msg), ErrorKind::ParseError);
  EXPECT_EQ(parse_kind(json::parse(R"({"ambient_dim": 0})")), ErrorKind::ParseError);
}

TEST(Scene, PlainNumbersAreReal) {
  const Scene s = parse_scene(json::parse(R"({"ambient_dim": 1, "unitaries": {"u": [[-1]]}})"));
  EXPECT_EQ(s.unitaries.at("u")(0, 0), cd(-1, 0));
}

TEST(Cli, CommutantOfDiagonalIsItself) {
  const Outcome r = run("algebra-commutant", d2());
  ASSERT_EQ(r.exit_code, 0) << r.report.dump();
  EXPECT_EQ(r.report["payload"]["dim"], 2);
  // every basis element commutes with e_11 and e_22, hence is diagonal
  for (const auto& m : r.report["payload"]["basis"]) {
    EXPECT_EQ(std::abs(complex_of(m[0][1])), 0.0);
    EXPECT_EQ(std::abs(complex_of(m[1][0])), 0.0);
  }
}

TEST(Cli, BlocksOfDiagonal) {
  const Outcome r = run("algebra-blocks", d2());
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.report["payload"]["blocks"], json::parse("[[1, 1], [1, 1]]"));
}

TEST(Cli, NotPairedIsAnAnswer) {
  const Outcome r = run("pair", d2({{"theta_prime", "idp"}}));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.report["status"], "ok");
  EXPECT_EQ(r.report["payload"]["outcome"], "NotPaired");
  EXPECT_NE(r.report["payload"]["table_e"]["multiplicities"], r.report["payload"]["table_f"]["multiplicities"]);
}

TEST(Cli, PairedUnitarySatisfiesRelations) {
  const Outcome r = run("pair", d2());
  ASSERT_EQ(r.exit_code, 0) << r.report.dump();
  ASSERT_EQ(r.report["payload"]["outcome"], "Paired");
  const CMatrix u = decode_matrix(r.report["payload"]["unitary"], "unitary");
  const CMatrix x{{0, 1}, {1, 0}};
  // theta = Ad(swap) on the diagonal, theta' the same on the (equal) commutant
  const CMatrix b = CMatrix::diag({2.0, -5.0});
  EXPECT_LT(frobenius_diff(u.adjoint() * b * u, x * b * x), 1e-9);
  EXPECT_LT(frobenius_diff(u * b * u.adjoint(), x * b * x), 1e-9);
}

TEST(Cli, TrivializeExponentialGrid) {
  const double theta = 0.37;
  const Outcome r = run("mult-trivialize", exp_grid(3, theta));
  ASSERT_EQ(r.exit_code, 0) << r.report.dump();
  std::vector<cd> f;
  for (const auto& z : r.report["payload"]["f"]) f.push_back(complex_of(z));
  ASSERT_EQ(f.size(), 7u);
  for (std::size_t s = 0; s <= 3; ++s)
    for (std::size_t t = 0; t <= 3; ++t)
      EXPECT_NEAR(std::abs(std::polar(1.0, theta * double(s * t)) * f[s + t] - f[s] * f[t]), 0.0, 1e-12);
  EXPECT_LE(r.report["diagnostics"]["trivialization"].get<double>(), 1e-12);
}

TEST(Cli, ExitCodes) {
  // validation failures
  EXPECT_EQ(run("mult-check", exp_grid(3, 0.2, 0.4)).exit_code, 1);
  EXPECT_EQ(run("pair-check", d2({{"unitary", "hadamard"}})).exit_code, 1);
  EXPECT_EQ(run("pair-check", d2({{"theta_prime", "idp"}})).exit_code, 1);
  // negative answers
  const Outcome sym = run("symmetry-check", d2({{"unitary", "hadamard"}}));
  EXPECT_EQ(sym.exit_code, 0);
  EXPECT_FALSE(sym.report["payload"]["algebra"].get<bool>());
  const Outcome iso = run("corr-iso", d2({{"theta2", "id"}}));
  EXPECT_EQ(iso.exit_code, 0);
  EXPECT_FALSE(iso.report["payload"]["found"].get<bool>());
  // parse errors
  EXPECT_EQ(run("no-such-command", d2()).exit_code, 2);
  Scene ambiguous = d2();
  ambiguous.roles.erase("theta");
  EXPECT_EQ(run("endo-validate", ambiguous).exit_code, 2);
  Options o;
  o.command = "pair";
  o.input = "/nonexistent/scene.json";
  EXPECT_EQ(run_command(o).exit_code, 2);
  EXPECT_EQ(run("pair", d2(), -1.0).exit_code, 2);
}

TEST(Cli, OkMeansDiagnosticsWithinTolerance) {
  const std::vector<std::string> cmds{"algebra-commutant", "algebra-blocks",   "endo-validate",  "corr-of-endo",
                                      "corr-intertwiners", "corr-commutant",   "corr-tensor",    "corr-iso",
                                      "prodsys-build",     "prodsys-commutant", "dilation-commutant", "pair",
                                      "pair-check",        "cocycle-link",     "symmetry-check"};
  for (const auto& c : cmds) {
    const Outcome r = run(c, d2());
    EXPECT_EQ(r.exit_code, 0) << c << ": " << r.report.dump();
    EXPECT_EQ(r.report["status"], "ok") << c;
    for (const auto& [name, v] : r.report["diagnostics"].items())
      EXPECT_LE(v.get<double>(), r.report["tolerance"].get<double>()) << c << " " << name;
  }
  // absurdly tight tolerance turns a small nonzero residual into a failure
  const Outcome tight = run("mult-trivialize", exp_grid(3, 0.37), 1e-300);
  if (tight.report["diagnostics"].value("trivialization", 0.0) > 1e-300) EXPECT_EQ(tight.exit_code, 1);
}

TEST(Cli, TolerancePrecedence) {
  Scene s = d2();
  ::setenv("VNPAIR_TOL", "1e-7", 1);
  EXPECT_EQ(run("algebra-commutant", s).report["tolerance"], 1e-7);
  s.tolerance = 1e-6;
  EXPECT_EQ(run("algebra-commutant", s).report["tolerance"], 1e-6);
  EXPECT_EQ(run("algebra-commutant", s, 1e-5).report["tolerance"], 1e-5);
  ::unsetenv("VNPAIR_TOL");
  s.tolerance.reset();
  EXPECT_EQ(run("algebra-commutant", s).report["tolerance"], Tolerance{}.eps);
}

TEST(Selftest, ZeroScaleIsEmptyButOk) {
  Options o;
  o.command = "selftest";
  o.scale = 0;
  const Outcome r = run_command(o);
  EXPECT_EQ(r.exit_code, 0);
  ASSERT_EQ(r.report["payload"]["criteria"].size(), acceptance_criteria().size());
  for (const auto& c : r.report["payload"]["criteria"]) EXPECT_EQ(c["cases"], 0);
}

TEST(Selftest, DeterministicModuloTiming) {
  Options o;
  o.command = "selftest";
  o.scale = 0.05;
  o.seed = 99;
  o.only = {1, 2, 6, 11, 12};
  json a = run_command(o).report, b = run_command(o).report;
  EXPECT_EQ(a["status"], "ok");
  a.erase("timing");
  b.erase("timing");
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Selftest, ReplayReproducesResidual) {
  const std::uint64_t s = case_seed(5, 6, 3);
  const CaseOutcome expected = replay_case(6, s);
  json report{{"payload",
               {{"criteria", json::array({{{"id", 6},
                                           {"failure",
                                            {{"criterion", 6}, {"index", 3}, {"case_seed", s},
                                             {"residual", expected.residual}}}}})}}}};
  const auto path = write_temp("replay.json", report.dump());
  Options o;
  o.command = "selftest";
  o.replay = path.string();
  const Outcome r = run_command(o);
  ASSERT_EQ(r.report["payload"]["replays"].size(), 1u);
  const json& rep = r.report["payload"]["replays"][0];
  EXPECT_TRUE(rep["reproduced"].get<bool>());
  EXPECT_EQ(rep["residual"].get<double>(), expected.residual);
  EXPECT_EQ(r.exit_code, expected.ok ? 0 : 1);
  std::filesystem::remove(path);
}

TEST(Binary, ExitCodesAndOutput) {
  const auto scene = write_temp("d2.json", kD2);
  const auto out = std::filesystem::temp_directory_path() / "vnpair_cli_out.json";
  auto status = [&](const std::string& args) {
    const int rc = std::system((std::string(VNPAIR_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  EXPECT_EQ(status("pair --input " + scene.string() + " --out " + out.string()), 0);
  std::ifstream in(out);
  const json report = json::parse(in);
  EXPECT_EQ(report["payload"]["outcome"], "Paired");
  EXPECT_EQ(status("pair --input " + scene.string() + " --tol nope"), 2);
  EXPECT_EQ(status("pair"), 2);
  EXPECT_EQ(status("selftest --scale 0"), 0);
  std::filesystem::remove(scene);
  std::filesystem::remove(out);
}
