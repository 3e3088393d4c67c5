#include "chmr/cli/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <map>
#include <future>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "chmr/errors.hpp"
#include "chmr/jet/properties.hpp"
#include "chmr/numerics/numerics.hpp"
#include "chmr/reductions/reductions.hpp"
#include "chmr/systems/systems.hpp"
#include "chmr/transforms/transforms.hpp"

namespace chmr::cli {

namespace {

using Json = nlohmann::ordered_json;

// Every single-sign flip of a Lax coefficient must leave a nonzero coefficient.
Report lax_mutations(int n, std::size_t max_steps) {
  Report rep;
  rep.task = "lax-mutations";
  rep.n = n;
  const auto probe = [&](const systems::LaxPair& lax, const systems::EquationSystem& sys, const std::string& name) {
    for (std::size_t k = 0; k < lax.coefficient_count(); ++k) {
      const Report r = systems::check_lax_compatibility(lax.with_flipped_sign(k), sys, max_steps);
      rep.steps += r.steps;
      rep.budget_exhausted = rep.budget_exhausted || r.budget_exhausted;
      std::size_t nonzero = 0;
      for (const auto& o : r.residuals) nonzero += !o.reduced_to_zero;
      ResidualOutcome o = ResidualOutcome::of(name + " Lax pair with the sign of " + lax.coefficient_label(k) + " flipped",
                                              nonzero == 0, std::to_string(nonzero) + " nonzero coefficients");
      o.expect_zero = false;
      rep.residuals.push_back(std::move(o));
    }
  };
  probe(systems::build_ch_lax(n), systems::build_ch_system(n), "CH");
  probe(systems::build_mch_lax(n), systems::build_mch_system(n), "mCH");
  return rep;
}

std::vector<Task> command_tasks(const std::string& command, const Options& o) {
  const int n = o.n;
  const std::size_t steps = o.max_steps;
  if (command == "verify-hierarchies") return {{"hierarchies", [=] { return systems::verify_hierarchies(n); }}};
  if (command == "verify-reciprocal")
    return {{"reciprocal-ch", [=] { return transforms::verify_reciprocal_ch(n, steps); }},
            {"reciprocal-mch", [=] { return transforms::verify_reciprocal_mch(n, steps); }}};
  if (command == "verify-miura") return {{"miura", [=] { return transforms::verify_miura(n, steps); }}};
  if (command == "verify-lax")
    return {{"lax-ch",
             [=] {
               return systems::check_lax_compatibility(systems::build_ch_lax(n), systems::build_ch_system(n), steps);
             }},
            {"lax-mch",
             [=] {
               return systems::check_lax_compatibility(systems::build_mch_lax(n), systems::build_mch_system(n), steps);
             }},
            {"lax-mutations", [=] { return lax_mutations(n, steps); }}};
  if (command == "verify-composite")
    return {{"composite", [=] { return transforms::verify_composite_dictionary(n, steps); }}};
  if (command == "verify-reductions")
    return {{"reduction-case1", [=] { return reductions::reduce_case1(steps); }},
            {"reduction-case2", [=] { return reductions::reduce_case2(steps); }}};
  if (command == "numeric-check") return {{"numeric-check", [] { return numerics::numeric_check(); }}};
  throw DomainError("unknown command " + command);
}

Json residual_json(const ResidualOutcome& r) {
  Json j;
  j["label"] = r.label;
  j["reduced_to_zero"] = r.reduced_to_zero;
  j["remainder_text"] = r.remainder_text;
  j["unit_factor"] = r.unit_factor ? Json(*r.unit_factor) : Json(nullptr);
  j["expect_zero"] = r.expect_zero;
  j["informational"] = r.informational;
  j["ok"] = r.ok();
  return j;
}

Json measure_json(const NumericMeasure& m) {
  Json j;
  j["label"] = m.label;
  j["resolutions"] = m.resolutions;
  j["linf"] = m.linf;
  j["l2"] = m.l2;
  j["order"] = m.order;
  j["criterion"] = m.criterion;
  j["passed"] = m.passed;
  return j;
}

Json report_json(const Report& r, bool timings) {
  Json j;
  j["task"] = r.task;
  j["n"] = r.n;
  j["passed"] = r.passed();
  j["budget_exhausted"] = r.budget_exhausted;
  j["hypotheses_used"] = r.hypotheses_used;
  j["assumptions"] = r.assumptions;
  j["residuals"] = Json::array();
  for (const auto& x : r.residuals) j["residuals"].push_back(residual_json(x));
  j["measures"] = Json::array();
  for (const auto& m : r.measures) j["measures"].push_back(measure_json(m));
  j["steps"] = r.steps;
  if (timings) j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

std::string verdict(int code) {
  switch (code) {
    case kPass: return "PASS";
    case kFail: return "FAIL";
    case kBudgetExhausted: return "BUDGET EXHAUSTED";
    default: return "CONFIG ERROR";
  }
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"verify-hierarchies", "verify-reciprocal", "verify-miura",
                                              "verify-lax",         "verify-composite",  "verify-reductions",
                                              "numeric-check",      "all"};
  return names;
}

std::vector<Task> tasks_for(const Options& options) {
  if (options.n < 1 || options.n > 3) throw DomainError("--n must be 1, 2 or 3");
  if (options.command != "all") return command_tasks(options.command, options);
  std::vector<Task> tasks;
  for (const std::string& c : commands()) {
    if (c == "all") continue;
    for (Task& t : command_tasks(c, options)) tasks.push_back(std::move(t));
  }
  const std::uint64_t seed = options.seed;
  tasks.push_back({"engine-properties",
                   [seed] { return jet::engine_property_check(seed, jet::default_property_counts()); }});
  return tasks;
}

std::vector<Report> run_tasks(const std::vector<Task>& tasks) {
  std::vector<std::future<Report>> futures;
  futures.reserve(tasks.size());
  for (const Task& t : tasks) futures.push_back(std::async(std::launch::async, t.run));
  std::vector<Report> reports;
  reports.reserve(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    try {
      reports.push_back(futures[i].get());
    } catch (const std::exception& e) {
      Report r;
      r.task = tasks[i].name;
      r.residuals.push_back(ResidualOutcome::of("task raised an error", false, e.what()));
      reports.push_back(std::move(r));
    }
  }
  return reports;
}

int exit_code(const std::vector<Report>& reports) {
  bool exhausted = false;
  for (const Report& r : reports) {
    if (r.budget_exhausted) {
      exhausted = true;
      continue;
    }
    if (!r.passed()) return kFail;
  }
  return exhausted ? kBudgetExhausted : kPass;
}

std::string render_json(const Options& options, const std::vector<Report>& reports) {
  Json doc;
  doc["schema"] = 1;
  doc["command"] = options.command;
  doc["n"] = options.n;
  doc["seed"] = options.seed;
  doc["max_steps"] = options.max_steps;
  const int code = exit_code(reports);
  doc["exit_code"] = code;
  doc["passed"] = code == kPass;
  doc["reports"] = Json::array();
  for (const Report& r : reports) doc["reports"].push_back(report_json(r, options.timings));
  return doc.dump(2) + "\n";
}

std::string render_summary(const Options& options, const std::vector<Report>& reports) {
  std::ostringstream os;
  for (const Report& r : reports) {
    const std::size_t entries = r.residuals.size() + r.measures.size();
    os << (r.budget_exhausted ? "BUDGET" : r.passed() ? "PASS  " : "FAIL  ") << "  " << r.task << "  n=" << r.n << "  "
       << entries << " checks, " << r.steps << " steps";
    if (options.timings) os << ", " << r.wall_time_ms << " ms";
    os << "\n";
    for (const auto& x : r.residuals)
      if (!x.ok()) os << "    " << x.label << ": " << x.remainder_text << "\n";
    for (const auto& m : r.measures)
      if (!m.passed) os << "    " << m.label << ": order " << m.order << " (" << m.criterion << ")\n";
  }
  const int code = exit_code(reports);
  os << options.command << ": " << verdict(code) << " (exit " << code << "), report " << options.out << "\n";
  return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options options;
  CLI::App app{"Verification harness for the CH/mCH reciprocal and Miura links"};
  app.require_subcommand(1, 1);
  app.add_option("--n", options.n, "number of hierarchy components, 1 to 3")->check(CLI::Range(1, 3));
  app.add_option("--out", options.out, "path of the JSON report");
  app.add_option("--seed", options.seed, "seed for the randomized engine properties");
  app.add_option("--max-steps", options.max_steps, "reduction step budget per task")->check(CLI::PositiveNumber);
  app.add_flag("--timings", options.timings, "include wall times (reports stop being byte-identical)");
  const std::map<std::string, std::string> about{
      {"verify-hierarchies", "residual counts and constant solutions of both hierarchies"},
      {"verify-reciprocal", "CH and mCH pushed through their reciprocal maps"},
      {"verify-miura", "CBS from mCBS through 4M = x_0 - m"},
      {"verify-lax", "Lax pair compatibility and single-sign mutations"},
      {"verify-composite", "composite dictionary identities and derivation chains"},
      {"verify-reductions", "Y-independent and T = X reductions"},
      {"numeric-check", "finite-difference convergence studies"},
      {"all", "every suite above plus the seeded engine properties"}};
  for (const std::string& c : commands()) app.add_subcommand(c, about.at(c))->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const std::string usage = app.get_formatter()->make_help(&app, "chmr", CLI::AppFormatMode::Normal);
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << usage;
      return kPass;
    }
    err << "error: " << e.what() << "\n" << usage;
    return kConfigError;
  }
  options.command = app.get_subcommands().front()->get_name();

  // Open before running so a bad path fails fast.
  std::ofstream file(options.out, std::ios::binary);
  if (!file) {
    err << "error: cannot write report to " << options.out << "\n";
    return kConfigError;
  }
  const std::vector<Report> reports = run_tasks(tasks_for(options));
  file << render_json(options, reports);
  file.close();
  if (!file) {
    err << "error: failed while writing " << options.out << "\n";
    return kConfigError;
  }
  out << render_summary(options, reports);
  return exit_code(reports);
}

}  // namespace chmr::cli
