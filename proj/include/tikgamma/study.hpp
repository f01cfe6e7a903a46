#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "tikgamma/config.hpp"

namespace tikgamma {

enum class Verdict { pass, fail, refused, diagnostic };

std::string to_string(Verdict verdict);

/// One long-format record. Study-wide summary rows use level 0.
struct ReportRow {
  std::string study;
  std::size_t level = 0;
  std::string metric;
  double value = 0.0;  // may be +-inf
  Verdict verdict = Verdict::diagnostic;
  double wall_time_ms = 0.0;
};

struct StudyOutcome {
  std::vector<ReportRow> rows;
  int exit_code = 0;     // 0 pass/diagnostic, 2 any fail, 3 refused
  std::string message;   // human-readable reason for a refusal or failure
};

/// Runs the configured study. Rows come back in level order, summary rows last.
StudyOutcome run_study(const StudyConfig& config);

/// Exit code implied by a set of rows: 3 if anything was refused, else 2 on any fail, else 0.
int exit_code_for(const std::vector<ReportRow>& rows);

/// Header `study,level,metric,value,verdict,wall_time_ms`, values printed with %.17g.
void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);
/// One JSON object per line with the same fields; infinities are written as strings.
void write_json_lines(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace tikgamma
