#ifndef BERGER_DYNAMICS_HPP
#define BERGER_DYNAMICS_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>
#include <string>
#include <vector>

#include "berger/damping.hpp"
#include "berger/field.hpp"
#include "berger/geometry.hpp"
#include "berger/operators.hpp"

namespace berger
{
  struct PlateState
  {
    Field u;
    Field v;
    double t = 0.0;
  };

  enum class Scheme
  {
    MidpointImplicit
  };

  struct StepperConfig
  {
    double dt = 1e-3;
    int picard_iterations = 8;
    double picard_tolerance = 1e-10;
    Scheme scheme = Scheme::MidpointImplicit;
    // drops the whole Berger coefficient term and the boundary feedback,
    // leaving u_tt + lap^2 u = p for the oracle tests
    bool linearized = false;

    void validate() const;
  };

  /// Per-step scalar time series recorded along a trajectory.
  struct ScalarSeries
  {
    std::vector<double> kinetic, bending, pi, script_e, hat_e, grad_norm_sq,
      load_inner, diss_power, non_diss_power, diss_increment,
      non_diss_increment, balance_residual;

    std::size_t size() const { return kinetic.size(); }
  };

  struct TrajectoryRecord
  {
    std::shared_ptr<const Mesh> mesh;
    Configuration config = Configuration::HD1D;
    PhysicsParams params;
    DampingLaw law;
    StepperConfig stepper;
    double potential_offset_m = 0.0;

    std::vector<double> times;  // every accepted step, including t0
    ScalarSeries series;
    std::vector<double> snapshot_times;
    std::vector<PlateState> snapshots;

    bool incomplete = false;
    std::string error;

    /// Index of the recorded time closest to t; throws when t is outside
    /// the record.
    std::size_t time_index(double t) const;
    std::size_t snapshot_index(double t) const;
  };

  /// Re-derives the ghost closure of state.u from (u, v) for the mesh's
  /// configuration (hinged moment feedback / clamped mirror / free end).
  void close_state_ghosts(PlateState& state, const PhysicsParams& params,
                          const DampingLaw& law);

  /// One implicit-midpoint step: the constant operator
  /// A = I + (dt^2/4)(stiffness + gamma * laplace) is factorized once; the
  /// Berger scalar is Picard-lagged and the boundary feedback is linearized
  /// per iterate through a low-rank boundary correction, so A is never
  /// refactorized. Iterates until the successive-iterate max norm drops
  /// below picard_tolerance or the iteration cap is hit (then throws
  /// std::runtime_error with the final residual).
  class Stepper
  {
   public:
    Stepper(std::shared_ptr<const Mesh> mesh, const PhysicsParams& params,
            const DampingLaw& law, const StepperConfig& cfg);

    PlateState step(const PlateState& state) const;

    const DiscreteSystem& system() const { return sys_; }
    int last_picard_iterations() const { return last_iterations_; }

   private:
    std::shared_ptr<const Mesh> mesh_;
    PhysicsParams params_;
    DampingLaw law_;
    StepperConfig cfg_;
    DiscreteSystem sys_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
    Eigen::VectorXd p_vec_;
    Eigen::MatrixXd damp_basis_;  // A^{-1} (load columns), one per damped node
    Eigen::MatrixXd damp_gram_;   // trace rows applied to damp_basis_
    mutable int last_iterations_ = 0;

    double damping_value(double s) const;
    double damping_slope(double s) const;
  };

  /// Convenience one-shot steps matching the configurations. Building a
  /// Stepper refactorizes; reuse one for long runs.
  PlateState step_hd(const PlateState& state, const PhysicsParams& params,
                     const DampingLaw& law, const StepperConfig& cfg);
  PlateState step_fcd1d(const PlateState& state, const PhysicsParams& params,
                        const StepperConfig& cfg);

  TrajectoryRecord run_trajectory(const PlateState& initial, double horizon,
                                  const PhysicsParams& params,
                                  const DampingLaw& law,
                                  const StepperConfig& cfg, int record_stride,
                                  double potential_offset_m = 0.0);

  /// Steady state of lap^2 u + (gamma - ||grad u||^2) lap u = p with the
  /// hinged homogeneous closure, by Picard iteration on the scalar.
  Field static_solve_hd(std::shared_ptr<const Mesh> mesh,
                        const PhysicsParams& params, double tolerance = 1e-12,
                        int max_iterations = 200);

}  // namespace berger

#endif
