#include "relhydro/cli_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace relhydro;

namespace {

int report(const std::string& kind, const std::string& message, const std::string& out_dir, int code) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
  if (!out_dir.empty()) write_error_report(out_dir, kind, message);
  return code;
}

char problem_label(const std::string& s) {
  if (s.size() != 1 || s[0] < 'a' || s[0] > 'f') throw ConfigError("invalid value for '--problem': '" + s + "' (expected a-f)");
  return s[0];
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relativistic hydrodynamics: exact Riemann solutions and corrugated-interface evolution"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "evolve a configured problem and write snapshots and norms");
  std::string config_path, problem, flux, out_dir;
  int scale = 0, dim = 0, rk = 0, threads = 0;
  long long seed = -1;
  std::string t_end;
  bool unperturbed = false;
  run_cmd->add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  run_cmd->add_option("--problem", problem, "preset problem a-f");
  run_cmd->add_option("--scale", scale, "divide the 1800x600x300 grid by N");
  run_cmd->add_option("--seed", seed, "perturbation seed");
  run_cmd->add_option("--dim", dim, "1 or 3");
  run_cmd->add_option("--flux", flux, "marquina or hlle");
  run_cmd->add_option("--rk", rk, "Runge-Kutta order, 2 or 4");
  run_cmd->add_option("--out", out_dir, "output directory (overrides RELHYDRO_OUT and the config)");
  run_cmd->add_option("--threads", threads, "worker threads");
  run_cmd->add_option("--t-end", t_end, "final time");
  run_cmd->add_flag("--unperturbed", unperturbed, "flat interface, no norms");

  // exact
  auto* exact_cmd = app.add_subcommand("exact", "write the exact 1D solution as CSV");
  std::string exact_problem = "a", exact_out;
  double exact_t = -1.0;
  int points = 400;
  exact_cmd->add_option("--problem", exact_problem, "preset problem a-f");
  exact_cmd->add_option("--t", exact_t, "time (default: first snapshot time of the problem)");
  exact_cmd->add_option("--points", points, "number of samples on [-1.5, 1.5]")->check(CLI::Range(2, 10000000));
  exact_cmd->add_option("--out", exact_out, "CSV file (default stdout)");

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "print the wave pattern of a problem");
  std::string classify_problem;
  classify_cmd->add_option("--problem", classify_problem, "preset problem a-f (default: all)");

  // norms
  auto* norms_cmd = app.add_subcommand("norms", "recompute perturbation norms from two snapshot directories");
  std::string norms_perturbed, norms_reference, norms_out;
  norms_cmd->add_option("--perturbed", norms_perturbed, "directory of perturbed snapshots")->required()->check(CLI::ExistingDirectory);
  norms_cmd->add_option("--reference", norms_reference, "directory of reference snapshots")->required()->check(CLI::ExistingDirectory);
  norms_cmd->add_option("--out", norms_out, "CSV file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  std::string error_dir;
  try {
    if (*run_cmd) {
      std::map<std::string, std::string> ov;
      if (!problem.empty()) ov["problem"] = problem;
      if (scale) ov["scale"] = std::to_string(scale);
      if (dim) ov["dim"] = std::to_string(dim);
      if (seed >= 0) ov["seed"] = std::to_string(seed);
      if (!flux.empty()) ov["flux"] = flux;
      if (rk) ov["rk"] = std::to_string(rk);
      if (threads) ov["threads"] = std::to_string(threads);
      if (!t_end.empty()) ov["t_end"] = t_end;
      if (unperturbed) ov["perturbed"] = "false";
      if (!out_dir.empty())
        ov["dir"] = out_dir;
      else if (const char* env = std::getenv("RELHYDRO_OUT"); env && *env)
        ov["dir"] = env;
      error_dir = ov.count("dir") ? ov["dir"] : "relhydro_out";
      if (config_path.empty() && problem.empty()) throw ConfigError("run needs --config or --problem");
      const RunConfig cfg = config_path.empty() ? parse_config("", ov) : load_config(config_path, ov);
      error_dir = cfg.output_dir;
      const RunResult res = run(cfg, std::cout);
      std::cout << "done: " << res.evolve.steps << " steps, " << res.wall_seconds << " s, output in "
                << res.output_dir.string() << '\n';
      return res.evolve.status == EvolveStatus::Completed ? 0 : 3;
    }
    if (*exact_cmd) {
      const char label = problem_label(exact_problem);
      double t = exact_t;
      if (t < 0.0) {
        for (double s : figure_times(label))
          if (s > 0.0) {
            t = s;
            break;
          }
      }
      const std::string csv = exact_csv(table1_problem(label), t, points);
      if (exact_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream(exact_out) << csv;
      }
      return 0;
    }
    if (*classify_cmd) {
      if (!classify_problem.empty()) {
        const RiemannProblem p = table1_problem(problem_label(classify_problem));
        std::cout << to_string(classify_pattern(p.left, p.right, p.eos)) << '\n';
      } else {
        for (char c : std::string("abcdef")) {
          const RiemannProblem p = table1_problem(c);
          std::cout << c << ' ' << to_string(classify_pattern(p.left, p.right, p.eos)) << '\n';
        }
      }
      return 0;
    }
    if (*norms_cmd) {
      const auto norms = norms_from_snapshots(norms_perturbed, norms_reference);
      if (norms_out.empty()) {
        std::cout << "t,L1,L2,Linf\n";
        for (const auto& n : norms) std::cout << n.t << ',' << n.l1 << ',' << n.l2 << ',' << n.linf << '\n';
      } else {
        write_norms_csv(norms, norms_out);
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    return report("config", e.what(), error_dir, 2);
  } catch (const SnapshotError& e) {
    return report("io", e.what(), error_dir, 4);
  } catch (const PhysicsError& e) {
    return report("physics", e.what(), error_dir, 3);
  } catch (const std::exception& e) {
    return report("internal", e.what(), error_dir, 1);
  }
  return 0;
}
