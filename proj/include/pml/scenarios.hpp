#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pml/mesh.hpp"

namespace pml {

/// Lattice requested in a config file.  When the "grid" object is present it
/// must carry all six fields; when absent the scenario's own default lattice
/// is used.
struct GridSpec {
    double a = 0.0;
    double b = 1.0;
    double t_begin = 0.0;
    double t_end = 0.5;
    int n_cells = 64;
    int n_steps = 64;
};

struct ExperimentConfig {
    std::string scenario;
    std::optional<GridSpec> grid;
    double m = 2.0;
    int n_reg = 0;       // 0: exact nonlinearity
    double c_lin = 0.0;  // 0: regularization default core slope
    double newton_tol = 1e-11;
    double sweep_tol = 1e-6;
    double verdict_tol = 0.0;  // 0: resolution-scaled default
    std::string output_dir = "pml_out";
    std::uint64_t seed = 20260814;
};

/// Malformed or contradictory configuration; the message names the offending
/// key.  The command line maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct ScenarioInfo {
    std::string name;
    std::string description;
};

/// The seven runnable scenarios, in stable order.
const std::vector<ScenarioInfo>& scenario_catalog();

/// One line per scenario: name, dash, description.
std::string list_scenarios();

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunResult {
    int exit_code = 0;  // 0 pass, 1 assertion failure, 3 solver failure
    std::vector<CheckResult> checks;
    std::vector<std::string> files;  // artifact paths relative to output_dir
};

/// Runs one scenario to completion: writes its artifacts plus verdict.json
/// and manifest.json (every artifact with size and content hash) into
/// cfg.output_dir.  Unknown scenario names throw ConfigError; solver
/// breakdowns surface as exit code 3 with the diagnostic recorded in the
/// verdict.  A fixed seed reproduces every artifact byte for byte.
RunResult run_scenario(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(std::string_view data);

/// Domain types in the config dialect (JSON); round trips are exact.
std::string cylinder_to_config(const Cylinder& c);
Cylinder cylinder_from_config(const std::string& text);
std::string union_to_config(const CylinderUnion& k);
CylinderUnion union_from_config(const std::string& text);

}  // namespace pml
