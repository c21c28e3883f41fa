#include "berger/energetics.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

namespace berger
{
  namespace
  {
    double load_inner(const PlateState& state, const PhysicsParams& params)
    {
      return params.load.empty() ? 0.0 : inner(params.load, state.u);
    }

    // series for the window audits, from the per-step record when present,
    // otherwise recomputed on the stored snapshots
    struct BalanceSeries
    {
      std::vector<double> times, script_e, diss, non_diss;
    };

    BalanceSeries balance_series(const TrajectoryRecord& rec,
                                 const DampingLaw& law)
    {
      BalanceSeries out;
      if (!rec.times.empty() && rec.series.size() == rec.times.size())
        {
          out.times = rec.times;
          out.script_e = rec.series.script_e;
          out.diss = rec.series.diss_power;
          out.non_diss = rec.series.non_diss_power;
          return out;
        }
      for (const PlateState& s : rec.snapshots)
        {
          PlateState closed = s;
          if (!closed.u.ghosts_valid)
            close_state_ghosts(closed, rec.params, law);
          const EnergyReport r = compute_energies(closed, rec.params);
          out.times.push_back(closed.t);
          out.script_e.push_back(r.script_e);
          out.diss.push_back(boundary_dissipation_power(closed, rec.params, law));
          out.non_diss.push_back(non_dissipative_power(closed, rec.params));
        }
      return out;
    }

    std::size_t window_index(const std::vector<double>& times, double t)
    {
      if (times.empty())
        throw std::invalid_argument("record is empty");
      std::size_t best = 0;
      for (std::size_t k = 1; k < times.size(); ++k)
        if (std::abs(times[k] - t) < std::abs(times[best] - t))
          best = k;
      const double spacing = times.size() > 1 ? times[1] - times[0] : 1.0;
      if (std::abs(times[best] - t) > 0.51 * spacing + 1e-12)
        throw std::invalid_argument("window endpoint outside the record");
      return best;
    }

    double trapezoid(const std::vector<double>& times,
                     const std::vector<double>& f, std::size_t a, std::size_t b)
    {
      double sum = 0.0;
      for (std::size_t k = a; k + 1 <= b; ++k)
        sum += 0.5 * (times[k + 1] - times[k]) * (f[k] + f[k + 1]);
      return sum;
    }
  }  // namespace

  EnergyReport compute_energies(const PlateState& state,
                                const PhysicsParams& params,
                                double potential_offset_m)
  {
    EnergyReport r;
    r.kinetic = 0.5 * inner(state.v, state.v);
    r.bending = 0.5 * bilinear_a(state.u, state.u, params);
    const double gsq = gradient_norm_sq(state.u);
    r.pi = 0.25 * (gsq * gsq - 2.0 * params.gamma * gsq -
                   4.0 * load_inner(state, params));
    r.script_e = r.kinetic + r.bending + r.pi;
    r.hat_e = r.kinetic + r.bending + 0.25 * gsq * gsq;
    r.script_e_m = r.script_e + potential_offset_m;
    return r;
  }

  double boundary_dissipation_power(const PlateState& state,
                                    const PhysicsParams& params,
                                    const DampingLaw& law)
  {
    const Mesh& m = *state.u.mesh;
    if (m.config == Configuration::FCD1D)
      {
        const double vl = state.v.at(m.nx - 1);
        return septic_boundary_damping(vl) * vl;  // |u_t(L)|^8
      }
    (void)params;
    const std::vector<double> tr = normal_trace_all(state.v);
    double sum = 0.0;
    for (int id = 0; id < m.storage_size(); ++id)
      if (m.boundary_weight[id] != 0.0)
        sum += m.boundary_weight[id] * law.value(tr[id]) * tr[id];
    return sum;
  }

  double non_dissipative_power(const PlateState& state,
                               const PhysicsParams& params)
  {
    const Mesh& m = *state.u.mesh;
    if (m.config != Configuration::FCD1D)
      return 0.0;
    const double coeff = params.gamma - gradient_norm_sq(state.u);
    const auto tr = normal_derivative_trace(state.u, Segment::XHigh);
    return coeff * tr.front() * state.v.at(m.nx - 1);
  }

  void append_energy_sample(TrajectoryRecord& rec, const PlateState& state)
  {
    const EnergyReport r =
      compute_energies(state, rec.params, rec.potential_offset_m);
    const double q = boundary_dissipation_power(state, rec.params, rec.law);
    const double nd = non_dissipative_power(state, rec.params);

    auto& s = rec.series;
    double diss_inc = 0.0, nd_inc = 0.0, defect = 0.0;
    if (!rec.times.empty())
      {
        const double dt = state.t - rec.times.back();
        diss_inc = 0.5 * dt * (s.diss_power.back() + q);
        nd_inc = 0.5 * dt * (s.non_diss_power.back() + nd);
        defect = r.script_e - s.script_e.back() + diss_inc + nd_inc;
      }

    rec.times.push_back(state.t);
    s.kinetic.push_back(r.kinetic);
    s.bending.push_back(r.bending);
    s.pi.push_back(r.pi);
    s.script_e.push_back(r.script_e);
    s.hat_e.push_back(r.hat_e);
    s.grad_norm_sq.push_back(gradient_norm_sq(state.u));
    s.load_inner.push_back(load_inner(state, rec.params));
    s.diss_power.push_back(q);
    s.non_diss_power.push_back(nd);
    s.diss_increment.push_back(diss_inc);
    s.non_diss_increment.push_back(nd_inc);
    s.balance_residual.push_back(defect);
  }

  double energy_balance_residual_hd(const TrajectoryRecord& rec,
                                    const DampingLaw& law, double s, double t)
  {
    if (rec.config == Configuration::FCD1D)
      throw std::invalid_argument("hinged balance audit on a free-edge record");
    if (!(s < t))
      throw std::invalid_argument("window needs s < t");
    const BalanceSeries bs = balance_series(rec, law);
    const std::size_t a = window_index(bs.times, s);
    const std::size_t b = window_index(bs.times, t);
    if (a >= b)
      throw std::invalid_argument("window does not cover any step");
    return bs.script_e[b] - bs.script_e[a] + trapezoid(bs.times, bs.diss, a, b);
  }

  FcdBalance energy_balance_residual_fcd(const TrajectoryRecord& rec, double s,
                                         double t)
  {
    if (rec.config != Configuration::FCD1D)
      throw std::invalid_argument("free-edge balance audit needs an FCD1D record");
    if (!(s < t))
      throw std::invalid_argument("window needs s < t");
    const BalanceSeries bs = balance_series(rec, rec.law);
    const std::size_t a = window_index(bs.times, s);
    const std::size_t b = window_index(bs.times, t);
    if (a >= b)
      throw std::invalid_argument("window does not cover any step");
    FcdBalance out;
    out.non_dissipative_integral = trapezoid(bs.times, bs.non_diss, a, b);
    out.residual = bs.script_e[b] - bs.script_e[a] +
                   trapezoid(bs.times, bs.diss, a, b) +
                   out.non_dissipative_integral;
    return out;
  }

  double potential_bound_m(const PhysicsParams& params, double epsilon,
                           const Mesh& mesh)
  {
    if (!(epsilon > 0.0))
      throw std::invalid_argument("epsilon must be positive");
    double m = params.gamma * params.gamma / (8.0 * epsilon);
    if (!params.load.empty())
      {
        const double p_sq = inner(params.load, params.load);
        if (p_sq > 0.0)
          {
            const double lambda =
              smallest_eigenvalue(mesh.config, mesh, params.mu1);
            m += p_sq / (lambda * 4.0 * epsilon);
          }
      }
    return m;
  }

  double equivalence_offset(const PhysicsParams& params, const Mesh& mesh)
  {
    return 2.0 * potential_bound_m(params, 0.25, mesh);
  }

  bool check_energy_equivalence(const EnergyReport& r, double offset_c)
  {
    const double tol = 1e-9 * (1.0 + std::abs(r.hat_e));
    return r.script_e >= 0.5 * r.hat_e - offset_c - tol &&
           r.script_e <= 2.0 * r.hat_e + offset_c + tol;
  }

  LotAuditor::LotAuditor(std::shared_ptr<const Mesh> mesh, double eta)
    : sys_(assemble_discrete_system(std::move(mesh))), eta_(eta),
      theta_(1.0 - eta / 2.0)
  {
    if (!(eta > 0.0 && eta < 1.0))
      throw std::invalid_argument("eta must lie in (0, 1)");
    Eigen::SparseMatrix<double> neg = (-sys_.laplace).eval();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(neg);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("Laplacian factorization failed");
    Eigen::VectorXd x = Eigen::VectorXd::Ones(sys_.n_unknowns);
    x.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it)
      {
        Eigen::VectorXd y = lu.solve(x);
        y.normalize();
        const double next = y.dot(neg * y);
        x.swap(y);
        if (it > 0 && std::abs(next - lambda) < 1e-10 * next)
          {
            lambda1_laplace_ = next;
            return;
          }
        lambda = next;
      }
    lambda1_laplace_ = lambda;
  }

  LotAuditor::Result LotAuditor::audit(const Field& u, double epsilon) const
  {
    if (!(epsilon > 0.0))
      throw std::invalid_argument("epsilon must be positive");
    const Mesh& m = *sys_.mesh;
    const Eigen::VectorXd x = sys_.restrict_field(u);
    const double w = m.dim == 2 ? m.hx * m.hy : m.hx;  // uniform interior weight
    const double X = w * x.squaredNorm();              // ||u||^2
    const double Y = w * x.dot(sys_.stiffness * x);    // hinged a(u, u)
    const double grad_sq = -w * x.dot(sys_.laplace * x);

    Result r;
    r.proxy_sq = std::pow(X, 1.0 - theta_) * std::pow(Y, theta_);
    const double alpha =
      (1.0 - theta_) * std::pow(epsilon / theta_, -theta_ / (1.0 - theta_));
    const double c1 = 1.0 / lambda1_laplace_;
    const double m_lot = (alpha * c1) * (alpha * c1) / (2.0 * epsilon);
    r.bound = epsilon * (Y + 0.5 * grad_sq * grad_sq) + m_lot;
    r.slack = r.bound - r.proxy_sq;
    return r;
  }

}  // namespace berger
