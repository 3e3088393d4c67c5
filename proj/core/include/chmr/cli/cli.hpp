#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "chmr/jet/rewrite.hpp"
#include "chmr/report.hpp"

namespace chmr::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kConfigError = 2, kBudgetExhausted = 3 };

struct Options {
  std::string command;
  int n = 1;
  std::string out = "chmr-report.json";
  std::uint64_t seed = 0;
  std::size_t max_steps = jet::Reducer::kDefaultBudget;
  /// Wall times make reports differ between runs, so they are opt-in.
  bool timings = false;
};

/// The commands the front end accepts, in help order.
const std::vector<std::string>& commands();

struct Task {
  std::string name;
  std::function<Report()> run;
};
/// Tasks of one command in merge order. Throws DomainError for an unknown command.
std::vector<Task> tasks_for(const Options& options);

/// Runs tasks concurrently and returns their reports in task order. A task that
/// throws becomes a failed report carrying the message.
std::vector<Report> run_tasks(const std::vector<Task>& tasks);

/// Definite failures outrank budget exhaustion: 1 if any report fails outright,
/// else 3 if any ran out of steps, else 0.
int exit_code(const std::vector<Report>& reports);

/// The versioned JSON document ("schema": 1), newline terminated.
std::string render_json(const Options& options, const std::vector<Report>& reports);
/// One line per report plus every failing entry.
std::string render_summary(const Options& options, const std::vector<Report>& reports);

/// Parses argv, runs the command, writes the report file and the summary.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chmr::cli
