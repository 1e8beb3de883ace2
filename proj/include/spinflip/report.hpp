#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "spinflip/model.hpp"

namespace spinflip {

// How lhs and rhs are judged:
//   equal_abs    |lhs - rhs| <= tolerance
//   equal_rel    |lhs - rhs| <= tolerance * max(1, |lhs|)
//   statistical  z_score <= tolerance
//   upper_bound  lhs <= rhs + tolerance
enum class Criterion { equal_abs, equal_rel, statistical, upper_bound };

std::string_view to_string(Criterion c);

struct ModelSummary {
  std::string kind;
  std::size_t n_sites = 0;
  double beta = 0.0;
  std::size_t flip_size = 0;
};

ModelSummary summarize(const ModelSpec& model, const FlipRegion& flip);

struct CheckReport {
  std::string name;
  ModelSummary model;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  std::optional<double> z_score;
  bool pass = false;
  double runtime = 0.0;  // seconds
  Criterion criterion = Criterion::equal_abs;
  double tolerance = 0.0;
};

// Decides pass from the stored numbers; no other state is consulted.
bool evaluate(const CheckReport& report);

// Fills the error columns and the pass flag.
CheckReport make_check(std::string name, const ModelSummary& model, double lhs, double rhs,
                       Criterion criterion, double tolerance,
                       std::optional<double> z_score = std::nullopt);

// Re-judges a report under a different tolerance.
CheckReport with_tolerance(CheckReport report, double tolerance);

// Shortest round-trip text for a double ("%.17g").
std::string format_double(double x);

inline constexpr std::string_view kCsvHeader =
    "check,model,N,beta,flip_size,lhs,rhs,abs_err,rel_err,z_score,pass";

void write_csv(std::ostream& out, const std::vector<CheckReport>& reports);

}  // namespace spinflip
