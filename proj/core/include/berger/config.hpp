#ifndef BERGER_CONFIG_HPP
#define BERGER_CONFIG_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "berger/dynamics.hpp"
#include "berger/geometry.hpp"

namespace berger
{
  struct InitialSpec
  {
    std::string profile = "zero";  // zero | mode | mode1d | cantilever | bump
    double u_amplitude = 0.0;
    double v_amplitude = 0.0;
    int mode_i = 1, mode_j = 1;
  };

  struct LoadSpec
  {
    std::string profile = "zero";  // zero | constant | mode | mode1d | quadratic1d
    double amplitude = 0.0;
    int mode_i = 1, mode_j = 1;
  };

  enum class ExperimentType
  {
    Simulate,
    Audit,
    Absorb,
    Diff,
    Converge
  };

  std::string to_string(ExperimentType t);

  struct ExperimentSpec
  {
    ExperimentType type = ExperimentType::Simulate;
    double horizon = 1.0;
    int record_stride = 1;
    // audit
    std::string source = "fresh";  // fresh | stored
    std::string input_dir;
    std::optional<std::array<double, 2>> window;
    std::array<double, 2> flux_anchor{0.5, 0.5};
    bool flux_anchor_set = false;
    int pibound_states = 0;
    std::vector<double> pibound_epsilons{0.1, 0.25, 0.5};
    // absorb
    std::vector<double> family_hat_e;
    std::optional<double> window_t;  // default: 20 fundamental periods
    double fit_residual_threshold = 0.05;
    // diff
    InitialSpec initial_b;
    // converge
    std::string target = "eigenmode";  // eigenmode | balance_hd | balance_fcd
    int levels = 3;
  };

  struct RunConfig
  {
    Configuration configuration = Configuration::HD2D;
    DomainSpec domain;
    std::array<int, 2> resolution{33, 33};
    PhysicsParams physics_scalars()
      const;  // gamma/mu/mu1 only; the load field is mesh-bound
    double gamma = 0.0;
    double mu = 1.0;
    double mu1 = 0.0;
    LoadSpec load;
    std::string damping_law = "linear";
    std::map<std::string, double> damping_params;
    std::optional<double> dt;  // nullopt: eigenfrequency heuristic
    int picard_iterations = 8;
    double picard_tolerance = 1e-10;
    bool linearized = false;
    InitialSpec initial;
    ExperimentSpec experiment;
    std::string output_dir = "out";
    std::uint64_t seed = 0;

    bool operator==(const RunConfig& other) const;
  };

  /// Parses the JSON config document; unknown keys are rejected with their
  /// path, defaults are applied, configuration/domain compatibility enforced.
  /// Throws std::invalid_argument on any config defect.
  RunConfig parse_config(const std::string& text);

  /// Canonical JSON serialization; parse(serialize(c)) == c.
  std::string serialize_config(const RunConfig& cfg);

  // mesh-bound realizations
  Field make_load_field(const LoadSpec& spec, std::shared_ptr<const Mesh> mesh);
  PlateState make_initial_state(const InitialSpec& spec,
                                std::shared_ptr<const Mesh> mesh);
  PhysicsParams make_physics(const RunConfig& cfg,
                             std::shared_ptr<const Mesh> mesh);
  DampingLaw make_law(const RunConfig& cfg);

  /// dt heuristic: 1/200 of the fundamental period of the linear operator.
  double resolve_dt(const RunConfig& cfg, const Mesh& mesh);

}  // namespace berger

#endif
