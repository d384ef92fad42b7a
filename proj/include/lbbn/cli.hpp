#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lbbn::cli {

enum ExitCode : int { kOk = 0, kDomainError = 1, kUsageError = 2 };

// Runs one command line without the program name, e.g.
// {"infer", "--net", "f.json", "--query", "G"}. Structured output goes to
// `out`; domain errors are written to `err` as a JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lbbn::cli
