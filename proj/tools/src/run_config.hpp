#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <chernoff/operators.hpp>
#include <chernoff/propagator.hpp>

#include "json.hpp"

namespace cli {

// Config/flag problems: reported with the offending field path, exit code 1.
class usage_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct InitialStateDesc {
  std::string type = "gaussian";  // gaussian | plane | eigenstate | file
  double sigma0 = 1.0;            // gaussian
  std::vector<double> x0, k0;     //   box-centered position / momentum
  std::vector<long> modes;        // plane: integer mode numbers per axis
  std::size_t level = 0;          // eigenstate
  std::filesystem::path path;     // file
};

// Fully validated run description: the grid and operator spec are already
// constructed, everything else is plain data the commands interpret.
struct RunConfig {
  nlohmann::json echo;  // post-override config, echoed into the manifest

  chernoff::GridPtr grid;
  std::optional<chernoff::HamiltonianSpec> spec;
  std::string model_name;  // preset name, or "inline"
  double equation_a = 1.0;

  std::optional<double> t;
  std::optional<std::size_t> n;
  std::vector<std::size_t> n_list;
  std::vector<std::size_t> j_list;

  InitialStateDesc state;
  std::uint64_t seed = 0;

  std::string oracle = "auto";  // auto | analytic | dense | splitstep
  std::size_t splitstep_steps = 8192;
  chernoff::PropagatorConfig prop;

  std::vector<std::size_t> compare_steps{64, 256, 1024, 4096};
  std::size_t verify_trials = 200;
  double verify_tol = 1e-11;
};

// Read the config file, fold in CHERNOFF_SEED (beats the file) and the
// --set overrides (beat everything) in order. Override values parse as JSON
// with plain-string fallback; dotted paths descend objects and index arrays.
nlohmann::json load_config_json(const std::filesystem::path& path,
                                const std::vector<std::string>& overrides);

// Validate + construct. Unknown fields anywhere are usage errors, as are
// violated model invariants (reported with the core's message).
RunConfig parse_config(nlohmann::json j);

// Build the t=0 state on cfg.grid from cfg.state.
chernoff::WaveFunction realize_initial_state(const RunConfig& cfg);

}  // namespace cli
