#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace annulus::cli {

using json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCheckFailed = 2;

enum class Command {
  Classify,
  VnSearch,
  Reproduce,
  DilateVerify,
  Decompose,
  VarietyClassifyPoint,
};

struct RunConfig {
  Command command = Command::Classify;
  std::string matrix_path;
  std::string data_path;
  std::string out_path;
  double r = 0.5;
  std::string example = "all";  // eg5 | eg6 | misra | mobius | kernel | all
  std::optional<std::string> filter;
  // Example parameters; unset ones take the example's own defaults.
  std::optional<double> s;
  std::optional<double> a;
  std::optional<double> w;
  std::optional<std::string> lambda;
  std::optional<std::string> mu;
  std::string z = "1,0";
  bool quantum = false;
  int degree = 8;
  int restarts = 32;
  int samples = 512;
  int iters = 200;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double tol = 1e-9;
  bool jsonl = false;
  bool r_given = false;
};

/// Parses argv into a config; returns kExitUsage via `exit_code` on error
/// (after printing to err) or when help was requested (exit 0).
std::optional<RunConfig> parse(int argc, const char* const* argv, std::ostream& out,
                               std::ostream& err, int& exit_code);

/// Runs one command; the JSON report goes to --out (and to stdout with --jsonl).
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// parse + run.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Records {example, inputs, computed, closed_form, abs_diff, pass, source}
/// for the worked examples; `filter` keeps records whose example name
/// contains it.
std::vector<json> reproduce(const RunConfig& cfg);

}  // namespace annulus::cli
