#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hetmel/manifold.hpp"
#include "hetmel/ode.hpp"

namespace hetmel {

enum class Command { Classify, GCurve, Melnikov, Monodromy, Manifolds, Verify };
enum class OutputFormat { Csv, Json };

struct SweepRange {
    double lo = 0.0;
    double hi = 0.0;
    int n = 1;
};

// Parses "lo:hi:n".
SweepRange parse_sweep_range(const std::string& text);

struct RunConfig {
    Command command = Command::Classify;
    std::optional<double> beta1;
    std::optional<double> beta2;
    std::optional<double> omega;
    std::optional<double> energy;
    std::optional<SweepRange> beta1_range;
    std::optional<SweepRange> beta2_range;
    double beta2_min = 0.5;
    double beta2_max = 3.0;
    int points = 0;  // 0: command default
    std::string output_path;  // empty: $HETMEL_OUTPUT_DIR or stdout
    std::optional<OutputFormat> format;
    std::optional<double> rel_tol;
    std::optional<double> abs_tol;
    std::optional<double> max_step;
    std::optional<long> max_steps;
    double t_limit = 40.0;
    double eta0_angle = 0.0;
    TraceOptions trace;
    IntersectionOptions intersection;
    bool gnuplot = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Throws ParameterError on bad flags; returns nullopt after printing help.
std::optional<RunConfig> parse_command_line(const std::vector<std::string>& args, std::ostream& out);

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Parse + run with exit-code mapping; args exclude the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hetmel
