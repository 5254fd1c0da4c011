#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace levydiv::cli {

enum ExitCode { kOk = 0, kCheckFailed = 1, kInputError = 2 };

/// Runs one levy-dividend command. argv[0] is the program name.
/// Results go to --out (written atomically) or to `out`; diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "a:b:step" -> (a, b, step). Throws Error(ParseError).
struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
};
GridSpec parse_grid(const std::string& text);

/// "beta=1.01,1.5,2" or "delta=0.1:3:0.1".
struct SweepSpec {
    std::string name;
    std::vector<double> values;
};
SweepSpec parse_sweep(const std::string& text);

/// Comma-separated numbers.
std::vector<double> parse_list(const std::string& text);

}  // namespace levydiv::cli
