#ifndef BERGER_DAMPING_HPP
#define BERGER_DAMPING_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace berger
{
  /// Scalar monotone feedback law D with D(0) = 0 and declared slope bounds
  /// m <= D'(s) <= M for |s| >= 1.
  struct DampingLaw
  {
    std::string name = "linear";
    std::function<double(double)> value;  // D
    std::function<double(double)> deriv;  // D'
    double slope_min = 1.0;               // m
    double slope_max = 1.0;               // M

    /// Throws on m <= 0, M < m, or D(0) != 0.
    void validate() const;
  };

  struct DampingEval
  {
    double value = 0.0;
    double derivative = 0.0;
  };

  DampingEval evaluate_damping(const DampingLaw& law, double s);

  /// |v|^6 v, the free-edge velocity feedback.
  double septic_boundary_damping(double v);

  enum class DampingCheck
  {
    LowerSlope,      // m <= D'(s) for |s| >= 1
    UpperSlope,      // D'(s) <= M for |s| >= 1
    QuadraticLower,  // D(s) s >= (m/2) s^2 for |s| >= 2
    SquareBound,     // D(s)^2 <= D(s) s * max{sup_{|xi|<=1} D', M}
    Monotone         // D nondecreasing, D' >= 0
  };

  std::string to_string(DampingCheck c);

  struct DampingViolation
  {
    DampingCheck check;
    double s = 0.0;
    double detail = 0.0;  // the offending value (slope, bound gap, ...)
  };

  struct DampingReport
  {
    bool passed = false;
    std::vector<DampingViolation> violations;
    double sup_deriv_inner = 0.0;  // sup_{|xi| <= 1} D'(xi) on the grid

    bool check_failed(DampingCheck c) const;
  };

  /// Samples the law on a uniform grid over [-range, range] and evaluates the
  /// slope bounds, the quadratic lower bound, the squared bound, and
  /// monotonicity. Failures are report entries, never exceptions.
  DampingReport verify_damping_assumption(const DampingLaw& law,
                                          double sample_range = 20.0,
                                          int samples = 10000);

  /// Built-in laws, selectable by name from the config file:
  ///   linear      D(s) = k s                          (params: k)
  ///   saturating  D(s) = s + sin(s)/2
  ///   piecewise   slope k0 on [-1, 1], slope m outside (params: m, k0)
  ///   cubic       D(s) = s^3, declared M finite        (params: m, M)
  ///   arctan      D(s) = atan(s)                       (params: m, M)
  /// cubic and arctan are designed counterexamples for the verifier.
  DampingLaw make_damping_law(const std::string& name,
                              const std::map<std::string, double>& params = {});

}  // namespace berger

#endif
