#include "berger/damping.hpp"

#include <cmath>
#include <stdexcept>

namespace berger
{
  void DampingLaw::validate() const
  {
    if (!value || !deriv)
      throw std::invalid_argument("damping law needs value and derivative");
    if (!(slope_min > 0.0))
      throw std::invalid_argument("damping slope bound m must be positive");
    if (!(slope_max >= slope_min) || !std::isfinite(slope_max))
      throw std::invalid_argument("damping slope bounds need 0 < m <= M < inf");
    if (std::abs(value(0.0)) > 1e-14)
      throw std::invalid_argument("damping law must satisfy D(0) = 0");
  }

  DampingEval evaluate_damping(const DampingLaw& law, double s)
  {
    if (!std::isfinite(s))
      throw std::invalid_argument("damping argument must be finite");
    return {law.value(s), law.deriv(s)};
  }

  double septic_boundary_damping(double v)
  {
    const double v2 = v * v;
    return v2 * v2 * v2 * v;
  }

  std::string to_string(DampingCheck c)
  {
    switch (c)
      {
        case DampingCheck::LowerSlope:
          return "lower-slope";
        case DampingCheck::UpperSlope:
          return "upper-slope";
        case DampingCheck::QuadraticLower:
          return "quadratic-lower";
        case DampingCheck::SquareBound:
          return "square-bound";
        case DampingCheck::Monotone:
          return "monotone";
      }
    return "?";
  }

  bool DampingReport::check_failed(DampingCheck c) const
  {
    for (const auto& v : violations)
      if (v.check == c)
        return true;
    return false;
  }

  DampingReport verify_damping_assumption(const DampingLaw& law,
                                          double sample_range, int samples)
  {
    if (!(sample_range >= 4.0))
      throw std::invalid_argument("sample range must be >= 4");
    if (samples < 100)
      throw std::invalid_argument("need at least 100 samples");
    law.validate();

    DampingReport rep;
    const double h = 2.0 * sample_range / (samples - 1);
    const double slack = 1e-10;

    std::vector<double> ss(samples), dd(samples), dp(samples);
    for (int k = 0; k < samples; ++k)
      {
        const double s = -sample_range + k * h;
        ss[k] = s;
        dd[k] = law.value(s);
        dp[k] = law.deriv(s);
        if (std::abs(s) <= 1.0)
          rep.sup_deriv_inner = std::max(rep.sup_deriv_inner, dp[k]);
      }

    const double cap = std::max(rep.sup_deriv_inner, law.slope_max);
    for (int k = 0; k < samples; ++k)
      {
        const double s = ss[k], D = dd[k], Dp = dp[k];
        if (std::abs(s) >= 1.0)
          {
            if (Dp < law.slope_min - slack)
              rep.violations.push_back({DampingCheck::LowerSlope, s, Dp});
            if (Dp > law.slope_max + slack)
              rep.violations.push_back({DampingCheck::UpperSlope, s, Dp});
          }
        if (std::abs(s) >= 2.0 &&
            D * s < 0.5 * law.slope_min * s * s - slack * (1.0 + s * s))
          rep.violations.push_back({DampingCheck::QuadraticLower, s, D * s});
        if (D * D > D * s * cap + slack * (1.0 + D * D))
          rep.violations.push_back({DampingCheck::SquareBound, s, D * D - D * s * cap});
        if (Dp < -slack)
          rep.violations.push_back({DampingCheck::Monotone, s, Dp});
        if (k > 0 && dd[k] < dd[k - 1] - slack)
          rep.violations.push_back({DampingCheck::Monotone, s, dd[k] - dd[k - 1]});
      }
    rep.passed = rep.violations.empty();
    return rep;
  }

  namespace
  {
    double param(const std::map<std::string, double>& p, const std::string& key,
                 double fallback)
    {
      auto it = p.find(key);
      return it == p.end() ? fallback : it->second;
    }
  }  // namespace

  DampingLaw make_damping_law(const std::string& name,
                              const std::map<std::string, double>& params)
  {
    DampingLaw law;
    law.name = name;
    if (name == "linear")
      {
        const double k = param(params, "k", 1.0);
        if (!(k > 0.0))
          throw std::invalid_argument("linear damping needs k > 0");
        law.value = [k](double s) { return k * s; };
        law.deriv = [k](double) { return k; };
        law.slope_min = k;
        law.slope_max = k;
      }
    else if (name == "saturating")
      {
        law.value = [](double s) { return s + 0.5 * std::sin(s); };
        law.deriv = [](double s) { return 1.0 + 0.5 * std::cos(s); };
        law.slope_min = 0.5;
        law.slope_max = 1.5;
      }
    else if (name == "piecewise")
      {
        const double m = param(params, "m", 0.5);
        const double k0 = param(params, "k0", 2.0);
        if (!(k0 > m && m > 0.0))
          throw std::invalid_argument("piecewise damping needs k0 > m > 0");
        law.value = [m, k0](double s) {
          if (std::abs(s) <= 1.0)
            return k0 * s;
          const double sign = s > 0 ? 1.0 : -1.0;
          return sign * (k0 + m * (std::abs(s) - 1.0));
        };
        law.deriv = [m, k0](double s) { return std::abs(s) < 1.0 ? k0 : m; };
        law.slope_min = m;
        law.slope_max = k0;
      }
    else if (name == "cubic")
      {
        // counterexample: slope unbounded, any finite declared M fails
        law.value = [](double s) { return s * s * s; };
        law.deriv = [](double s) { return 3.0 * s * s; };
        law.slope_min = param(params, "m", 1.0);
        law.slope_max = param(params, "M", 500.0);
      }
    else if (name == "arctan")
      {
        // counterexample: slope decays below any positive m
        law.value = [](double s) { return std::atan(s); };
        law.deriv = [](double s) { return 1.0 / (1.0 + s * s); };
        law.slope_min = param(params, "m", 0.1);
        law.slope_max = param(params, "M", 1.0);
      }
    else
      throw std::invalid_argument("unknown damping law: " + name);
    law.validate();
    return law;
  }

}  // namespace berger
