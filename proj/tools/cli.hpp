#pragma once

// Batch driver: one subcommand per module, one JSON (or text) report per run.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "twinflip/coxeter.hpp"
#include "twinflip/flagmodel.hpp"

namespace twinflip::cli {

enum Exit { kPass = 0, kAssertion = 1, kUsage = 2, kGuard = 3, kHypothesis = 4 };

struct RunConfig {
  std::string command;
  std::string type, matrix_file, twist = "id";
  int n = 0, q = 0;
  std::string form = "hermitian", gram_file;
  std::string out, format = "json";
  std::uint64_t seed = 1;
  int threads = 1;
  std::size_t max_flags = flagmodel::kFlagLimit;
  std::size_t max_group = flagmodel::kGroupLimit;
  std::size_t max_weyl = coxeter::kDefaultOrderBound;
  bool override_hypotheses = false;
};

/// The report document for one run. Throws Error.
nlohmann::json execute(const RunConfig& cfg, std::ostream& log);
/// Flat text rendering of a report document.
std::string render_text(const nlohmann::json& doc);
/// Parses arguments, runs, writes the report; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace twinflip::cli
