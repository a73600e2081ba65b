#pragma once

#include <string>
#include <vector>

namespace geomflow::cli {

enum ExitCode { kOk = 0, kConfigError = 2, kSolverFailure = 3, kMetricMisuse = 4 };

/// Decimal or rational "p/q" number; "inf" is accepted. Throws InvalidArgument.
double parse_real(const std::string& text);

/// Entry point of the geomflow tool; returns the process exit code.
int main(const std::vector<std::string>& args);

}  // namespace geomflow::cli
