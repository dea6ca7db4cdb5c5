#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "isrulog/isrulog.hpp"

namespace fs = std::filesystem;
using namespace isrulog;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

struct ScenarioArgs {
  std::string scenario;
  std::string variant;
  bool setup = false;
  std::vector<std::string> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--scenario", scenario, "Scenario file or builtin:<name>");
    cmd->add_option("--variant", variant, "concentrated or distributed")->check(CLI::IsMember({"concentrated", "distributed"}));
    cmd->add_flag("--setup-phase", setup, "One-year setup phase before demands start");
    cmd->add_option("--override", overrides, "name=multiplier, repeatable");
  }

  ScenarioConfig load() const {
    ScenarioConfig c;
    if (scenario.empty()) {
      c = builtin_cislunar_case(variant.empty() ? Variant::concentrated : parse_variant(variant), setup);
    } else {
      c = load_scenario(scenario);
      bool builtin = scenario.rfind("builtin:", 0) == 0;
      if (!variant.empty() && parse_variant(variant) != c.variant) {
        if (!builtin) throw ValidationError("--variant does not match the scenario file");
        c = builtin_cislunar_case(parse_variant(variant), c.setup_phase || setup);
      }
      if (setup && !c.setup_phase) {
        if (!builtin) throw ValidationError("--setup-phase does not match the scenario file");
        c = builtin_cislunar_case(c.variant, true);
      }
    }
    for (const auto& o : overrides) {
      auto eq = o.find('=');
      if (eq == std::string::npos) throw ValidationError("override must be name=multiplier");
      c = apply_override(c, o.substr(0, eq), std::stod(o.substr(eq + 1)));
    }
    return c;
  }
};

void print_summary(std::ostream& os, const MissionPlan& p, const CostBreakdown& b) {
  os << "scenario " << p.scenario << "\n";
  os << "status " << to_string(p.status) << "  objective $" << format_double(p.objective) << "  bound $" << format_double(p.bound)
     << "  gap " << format_double(p.gap) << "  " << format_double(std::round(p.seconds * 10) / 10) << " s\n";
  os << "ISRU mass deployed " << format_double(std::round(p.isru_mass() * 10) / 10) << " kg, spacecraft built " << p.spacecraft_built() << "\n";
  os << cost_csv(b);
}

int cmd_plan(const ScenarioArgs& sa, const std::string& out, double time_limit, bool quiet) {
  auto cfg = sa.load();
  auto lm = build_logistics_model(cfg);
  auto opt = scenario_milp_options(time_limit);
  if (!quiet)
    opt.log = [](const MilpProgress& p) {
      std::cerr << "nodes " << p.nodes << " open " << p.open << " incumbent " << p.incumbent << " bound " << p.bound << " " << p.seconds << "s\n";
    };
  auto sol = solve_logistics(lm, opt);
  if (!sol.has_incumbent()) {
    std::cout << "status " << to_string(sol.status) << "\n";
    return exit_code(sol.status);
  }
  auto plan = extract_plan(sol, lm);
  auto b = cost_breakdown(plan, cfg);
  auto audit = audit_plan(plan, cfg);
  fs::path dir(out);
  write_file(dir / "plan.csv", plan_csv(plan));
  write_file(dir / "deployments.csv", deployments_csv(plan));
  write_file(dir / "manufacturing.csv", manufacturing_csv(plan));
  write_file(dir / "costs.csv", cost_csv(b));
  write_file(dir / "solution.csv", solution_csv(lm.milp, sol.values));
  std::ostringstream sum;
  print_summary(sum, plan, b);
  sum << "audit " << (audit.ok() ? "clean" : "issues") << "\n";
  for (const auto& i : audit.issues) sum << "  " << i.what << " " << format_double(i.amount) << "\n";
  write_file(dir / "summary.txt", sum.str());
  std::cout << sum.str();
  return exit_code(sol.status);
}

int cmd_export(const ScenarioArgs& sa, const std::string& format, const std::string& out) {
  auto cfg = sa.load();
  std::string text;
  if (format == "mps") text = export_mps(build_logistics_model(cfg).milp);
  else text = serialize_scenario(cfg);
  if (out.empty() || out == "-") std::cout << text;
  else write_file(out, text);
  return 0;
}

int cmd_sweep(const ScenarioArgs& sa, const std::string& param, const std::string& grid, const std::string& out, double time_limit) {
  std::vector<ScenarioConfig> bases;
  if (sa.scenario.empty() && sa.variant.empty()) {
    bases = {builtin_cislunar_case(Variant::concentrated, sa.setup), builtin_cislunar_case(Variant::distributed, sa.setup)};
    for (auto& b : bases)
      for (const auto& o : sa.overrides) {
        auto eq = o.find('=');
        b = apply_override(b, o.substr(0, eq), std::stod(o.substr(eq + 1)));
      }
  } else {
    bases = {sa.load()};
  }
  SweepOptions so;
  so.time_limit = time_limit;
  so.progress = [](const SweepRow& r) {
    std::cerr << to_string(r.variant) << (r.setup ? " setup " : " ") << r.parameter << "=" << format_double(r.value) << " -> "
              << format_double(r.objective) << " (" << to_string(r.status) << ", " << format_double(std::round(r.seconds)) << " s)\n";
  };
  auto rows = run_sweep(bases, param, parse_grid(grid), so);
  fs::path dir(out);
  write_file(dir / "sweep.csv", sweep_csv(rows));
  write_file(dir / "sweep.svg", sweep_svg(rows));
  std::cout << sweep_csv(rows);
  int code = 0;
  for (const auto& r : rows) code = std::max(code, exit_code(r.status));
  return code;
}

int cmd_check(const ScenarioArgs& sa, const std::string& solution) {
  auto cfg = sa.load();
  auto lm = build_logistics_model(cfg);
  auto x = parse_solution_csv(lm.milp, read_file(solution));
  auto rep = check_feasibility(lm.milp, x);
  std::cout << "rows " << format_double(rep.max_row) << " bounds " << format_double(rep.max_bound) << " integrality "
            << format_double(rep.max_integrality) << "\n";
  for (const auto& v : rep.violations) std::cout << "violation " << v.label << " " << format_double(v.amount) << "\n";
  auto prod = check_products(lm, x);
  std::cout << "products z " << format_double(prod.z) << " X " << format_double(prod.X) << " P " << format_double(prod.P)
            << " capacity " << format_double(prod.capacity) << "\n";
  Solution s;
  s.status = SolveStatus::optimal;
  s.values = x;
  s.objective = lm.milp.evaluate_objective(x);
  auto plan = extract_plan(s, lm);
  auto audit = audit_plan(plan, cfg);
  std::cout << "objective $" << format_double(plan.objective) << "\n";
  for (const auto& i : audit.issues) std::cout << "audit " << i.what << " " << format_double(i.amount) << "\n";
  return rep.feasible() && prod.worst() <= 1e-6 && audit.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ISRU logistics planner: time-expanded network MILP with economies of scale"};
  app.require_subcommand(1);

  ScenarioArgs plan_args, export_args, sweep_args, check_args;
  std::string plan_out = "plan_out", export_format = "mps", export_out, sweep_param, sweep_grid, sweep_out = "sweep_out", solution;
  double plan_limit = 280.0, sweep_limit = 120.0;
  bool quiet = false;

  auto* plan = app.add_subcommand("plan", "Solve a scenario and write the mission plan");
  plan_args.attach(plan);
  plan->add_option("--out", plan_out, "Output directory");
  plan->add_option("--time-limit", plan_limit, "Seconds");
  plan->add_flag("--quiet", quiet, "No progress log");

  auto* exp = app.add_subcommand("export", "Write the assembled model (mps) or the scenario document (json)");
  export_args.attach(exp);
  exp->add_option("--format", export_format)->check(CLI::IsMember({"mps", "json"}));
  exp->add_option("--out", export_out, "Output file, - for stdout");

  auto* sweep = app.add_subcommand("sweep", "Parameter sweep over a multiplier grid");
  sweep_args.attach(sweep);
  sweep->add_option("--param", sweep_param)->required()->check(CLI::IsMember(override_names()));
  sweep->add_option("--grid", sweep_grid, "a:b:step")->required();
  sweep->add_option("--out", sweep_out, "Output directory");
  sweep->add_option("--time-limit", sweep_limit, "Seconds per point");

  auto* check = app.add_subcommand("check", "Check a solution file against a scenario model");
  check_args.attach(check);
  check->add_option("--solution", solution, "CSV written by plan")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*plan) return cmd_plan(plan_args, plan_out, plan_limit, quiet);
    if (*exp) return cmd_export(export_args, export_format, export_out);
    if (*sweep) return cmd_sweep(sweep_args, sweep_param, sweep_grid, sweep_out, sweep_limit);
    if (*check) return cmd_check(check_args, solution);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
