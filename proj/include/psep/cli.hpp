#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "psep/measures.hpp"

namespace psep {

/// Help text listing the accepted distribution specs.
extern const char* const kDistGrammar;

/// "uniform:a,b" | "biuniform:a,b,c,d" | "twopoint:x1,w1,x2" | "truncexp:rate,lo,hi" | "cdf:path".
/// Malformed text throws ParseError with the offending offset; non-finite parameters throw ConfigError.
Measure parse_dist_spec(const std::string& spec);

struct RunConfig {
    std::string dist;
    std::string cdf_file;
    std::vector<std::size_t> ns{5, 20, 100, 200};
    double p = 2.0;
    std::size_t K = 0; // 0 selects default_truncation(n) per mesh size
    std::size_t grid = 1024;
    std::size_t samples = 100000;
    std::size_t paths = 1000;
    double dt = 1e-4;
    std::uint64_t seed = 1;
    bool recenter = true;
    std::string out = ".";
    bool svg = false;
    bool dump_samples = false;

    void validate() const;
};

using Settings = std::map<std::string, std::string>;

/// key=value lines; blank lines and lines starting with '#' are ignored.
Settings parse_config_text(std::istream& in);
Settings read_config_file(const std::string& path);

/// Apply one setting by its flag name (without dashes). Unknown keys and bad values throw ConfigError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Defaults, then the config file, then flags.
RunConfig build_config(const Settings& file, const Settings& flags);

/// The measure named by dist or cdf_file, recentred when cfg.recenter is set. The applied
/// shift is returned through shift.
Measure resolve_measure(const RunConfig& cfg, double& shift);

void run_boundary(const RunConfig& cfg, std::ostream& log);
void run_converge(const RunConfig& cfg, std::ostream& log);
void run_simulate(const RunConfig& cfg, std::ostream& log);

/// Dispatch by subcommand name and map exceptions to exit codes: 0 success,
/// 2 configuration or parse error, 3 runtime error.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log, std::ostream& err);

} // namespace psep
