#include "spinflip/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace spinflip {

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::equal_abs: return "equal_abs";
    case Criterion::equal_rel: return "equal_rel";
    case Criterion::statistical: return "statistical";
    case Criterion::upper_bound: return "upper_bound";
  }
  return "unknown";
}

ModelSummary summarize(const ModelSpec& model, const FlipRegion& flip) {
  return {std::string(to_string(model.kind)), model.size(), model.beta, flip.volume()};
}

bool evaluate(const CheckReport& r) {
  if (!std::isfinite(r.lhs) || !std::isfinite(r.rhs)) return false;
  const double diff = std::abs(r.lhs - r.rhs);
  switch (r.criterion) {
    case Criterion::equal_abs: return diff <= r.tolerance;
    case Criterion::equal_rel: return diff <= r.tolerance * std::max(1.0, std::abs(r.lhs));
    case Criterion::statistical: return r.z_score.has_value() && *r.z_score <= r.tolerance;
    case Criterion::upper_bound: return r.lhs <= r.rhs + r.tolerance;
  }
  return false;
}

CheckReport make_check(std::string name, const ModelSummary& model, double lhs, double rhs,
                       Criterion criterion, double tolerance, std::optional<double> z_score) {
  CheckReport r;
  r.name = std::move(name);
  r.model = model;
  r.lhs = lhs;
  r.rhs = rhs;
  r.abs_err = std::abs(lhs - rhs);
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  r.rel_err = scale > 0.0 ? r.abs_err / scale : 0.0;
  r.z_score = z_score;
  r.criterion = criterion;
  r.tolerance = tolerance;
  r.pass = evaluate(r);
  return r;
}

CheckReport with_tolerance(CheckReport report, double tolerance) {
  report.tolerance = tolerance;
  report.pass = evaluate(report);
  return report;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<CheckReport>& reports) {
  out << kCsvHeader << '\n';
  for (const auto& r : reports) {
    out << r.name << ',' << r.model.kind << ',' << r.model.n_sites << ','
        << format_double(r.model.beta) << ',' << r.model.flip_size << ',' << format_double(r.lhs)
        << ',' << format_double(r.rhs) << ',' << format_double(r.abs_err) << ','
        << format_double(r.rel_err) << ',' << (r.z_score ? format_double(*r.z_score) : "") << ','
        << (r.pass ? "true" : "false") << '\n';
  }
}

}  // namespace spinflip
