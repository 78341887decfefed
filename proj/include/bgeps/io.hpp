#pragma once

#include <iosfwd>
#include <string>

#include "bgeps/em.hpp"
#include "bgeps/model_select.hpp"
#include "bgeps/sample.hpp"

namespace bgeps {

// CSV ingestion: rows of "y1,y2", optional single header line, '#' comment
// lines skipped. Values are multiplied by scale; pairs within tie_tol
// relative distance are merged to exact ties at their mean. Parse and
// positivity errors carry the line number.
BivariateSample load_csv(const std::string& path, double scale = 1.0, double tie_tol = 0.0);
BivariateSample load_csv_stream(std::istream& in, const std::string& name,
                                double scale = 1.0, double tie_tol = 0.0);

// CSV emission: optional '#' metadata lines, header, rows with 17
// significant digits so a load -> write -> load round trip is exact.
void write_csv(const BivariateSample& sample, std::ostream& out,
               const std::string& metadata = "");

enum class ReportFormat { Json, Text };

std::string write_report(const FitReport& report, ReportFormat format);
std::string write_report(const GofReport& report, ReportFormat format);

FitReport read_fit_report(const std::string& json_text);
GofReport read_gof_report(const std::string& json_text);

}  // namespace bgeps
