#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace vnpair::cli;
  Options opt;
  std::string out;
  std::string commands;
  for (const auto& c : command_names()) commands += (commands.empty() ? "" : ", ") + c;

  CLI::App app{"vnpair: pairings of von Neumann algebra endomorphisms on finite-dimensional algebras"};
  app.add_option("command", opt.command, "one of: " + commands)->required();
  app.add_option("--input", opt.input, "scene file (JSON)");
  app.add_option("--out", out, "also write the report here");
  app.add_option("--tol", opt.tol, "tolerance, overrides VNPAIR_TOL and the scene");
  app.add_option("--seed", opt.seed, "seed for randomized steps and selftest");
  app.add_option("--horizon", opt.horizon, "largest power or time index (default 3)");
  app.add_option("--scale", opt.scale, "selftest: multiply case counts (0 runs nothing)")->check(CLI::NonNegativeNumber);
  app.add_option("--only", opt.only, "selftest: criterion ids to run")->delimiter(',');
  app.add_option("--replay", opt.replay, "selftest: re-run the failing cases of an earlier report");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const Outcome r = run_command(opt);
  const std::string text = r.report.dump(2);
  std::cout << text << '\n';
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) {
      std::cerr << "cannot write " << out << '\n';
      return 2;
    }
    f << text << '\n';
  }
  std::cerr << summary(r.report) << '\n';
  return r.exit_code;
}
