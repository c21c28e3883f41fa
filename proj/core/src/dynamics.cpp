#include "berger/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "berger/energetics.hpp"

namespace berger
{
  void StepperConfig::validate() const
  {
    if (!(dt > 0.0))
      throw std::invalid_argument("dt must be positive");
    if (picard_iterations < 1)
      throw std::invalid_argument("picardIterations must be >= 1");
    if (!(picard_tolerance > 0.0))
      throw std::invalid_argument("picardTolerance must be positive");
  }

  std::size_t TrajectoryRecord::time_index(double t) const
  {
    if (times.empty())
      throw std::invalid_argument("record is empty");
    const double dt = times.size() > 1 ? times[1] - times[0] : 1.0;
    if (t < times.front() - 0.5 * dt || t > times.back() + 0.5 * dt)
      throw std::invalid_argument("time outside the recorded window");
    const auto it = std::lower_bound(times.begin(), times.end(), t - 0.5 * dt);
    return static_cast<std::size_t>(it - times.begin());
  }

  std::size_t TrajectoryRecord::snapshot_index(double t) const
  {
    if (snapshot_times.empty())
      throw std::invalid_argument("record has no snapshots");
    std::size_t best = 0;
    for (std::size_t k = 1; k < snapshot_times.size(); ++k)
      if (std::abs(snapshot_times[k] - t) < std::abs(snapshot_times[best] - t))
        best = k;
    return best;
  }

  namespace
  {
    struct EdgeFrame
    {
      Segment seg;
      int i1, j1, i2, j2;  // first and second inward neighbours
      int g1, g2;          // ghost ids
      double h;
    };

    // inward frames for one boundary node
    std::vector<EdgeFrame> frames_at(const Mesh& m, int i, int j)
    {
      std::vector<EdgeFrame> out;
      if (i == 0)
        out.push_back({Segment::XLow, 1, j, 2, j, m.index(-1, j), m.index(-2, j), m.hx});
      if (i == m.nx - 1)
        out.push_back({Segment::XHigh, m.nx - 2, j, m.nx - 3, j, m.index(m.nx, j),
                       m.index(m.nx + 1, j), m.hx});
      if (m.dim == 2 && j == 0)
        out.push_back({Segment::YLow, i, 1, i, 2, m.index(i, -1), m.index(i, -2), m.hy});
      if (m.dim == 2 && j == m.ny - 1)
        out.push_back({Segment::YHigh, i, m.ny - 2, i, m.ny - 3, m.index(i, m.ny),
                       m.index(i, m.ny + 1), m.hy});
      return out;
    }

    void close_hinged(Field& u, const Field& v, const DampingLaw& law)
    {
      const Mesh& m = *u.mesh;
      for (Segment s : m.segments())
        for (auto [i, j] : m.segment_nodes(s))
          for (const EdgeFrame& f : frames_at(m, i, j))
            {
              // outward normal trace of the velocity, one-sided second order
              const double tau = (3.0 * v.at(i, j) - 4.0 * v.at(f.i1, f.j1) +
                                  v.at(f.i2, f.j2)) /
                                 (2.0 * f.h);
              const double d = law.value(tau);
              u.values[f.g1] = -u.at(f.i1, f.j1) - f.h * f.h * d;
              u.values[f.g2] = -u.at(f.i2, f.j2) - 4.0 * f.h * f.h * d;
            }
      u.ghosts_valid = true;
    }

    void close_fcd(Field& u, const Field& v, const PhysicsParams& params)
    {
      const Mesh& m = *u.mesh;
      const int n = m.nx;
      const double h = m.hx;
      // clamped end: u(0) = u_x(0) = 0
      u.values[m.index(-1)] = u.at(1);
      u.values[m.index(-2)] = u.at(2);
      // free end: u_xx(L) = 0 and u_xxx(L) - mu1 u(L) = |u_t(L)|^6 u_t(L)
      const double G =
        params.mu1 * u.at(n - 1) + septic_boundary_damping(v.at(n - 1));
      u.values[m.index(n)] = 2.0 * u.at(n - 1) - u.at(n - 2);
      u.values[m.index(n + 1)] =
        4.0 * u.at(n - 1) - 4.0 * u.at(n - 2) + u.at(n - 3) + 2.0 * h * h * h * G;
      u.ghosts_valid = true;
    }
  }  // namespace

  void close_state_ghosts(PlateState& state, const PhysicsParams& params,
                          const DampingLaw& law)
  {
    const Mesh& m = *state.u.mesh;
    if (m.config == Configuration::FCD1D)
      close_fcd(state.u, state.v, params);
    else
      close_hinged(state.u, state.v, law);
  }

  double Stepper::damping_value(double s) const
  {
    return sys_.config == Configuration::FCD1D ? septic_boundary_damping(s)
                                               : law_.value(s);
  }

  double Stepper::damping_slope(double s) const
  {
    if (sys_.config == Configuration::FCD1D)
      {
        const double s2 = s * s;
        return 7.0 * s2 * s2 * s2;
      }
    return law_.deriv(s);
  }

  Stepper::Stepper(std::shared_ptr<const Mesh> mesh, const PhysicsParams& params,
                   const DampingLaw& law, const StepperConfig& cfg)
    : mesh_(std::move(mesh)), params_(params), law_(law), cfg_(cfg)
  {
    cfg_.validate();
    params_.validate();
    law_.validate();
    sys_ = assemble_discrete_system(mesh_, params_.mu1);

    const double c = cfg_.dt * cfg_.dt / 4.0;
    Eigen::SparseMatrix<double> A(sys_.n_unknowns, sys_.n_unknowns);
    A.setIdentity();
    if (cfg_.linearized)
      A = A + (c * sys_.stiffness).eval();
    else
      A = A + (c * sys_.stiffness).eval() + (c * params_.gamma * sys_.laplace).eval();
    lu_.compute(A);
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error("midpoint operator factorization failed");

    p_vec_ = Eigen::VectorXd::Zero(sys_.n_unknowns);
    if (!params_.load.empty())
      {
        if (params_.load.mesh != mesh_)
          throw std::invalid_argument("load field lives on a different mesh");
        p_vec_ = sys_.restrict_field(params_.load);
      }

    const int nb = static_cast<int>(sys_.damped_nodes.size());
    damp_basis_.resize(sys_.n_unknowns, nb);
    for (int d = 0; d < nb; ++d)
      {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(sys_.n_unknowns);
        e[sys_.damped_nodes[d].load_unknown] = sys_.damped_nodes[d].load_coeff;
        damp_basis_.col(d) = lu_.solve(e);
      }
    damp_gram_.resize(nb, nb);
    for (int r = 0; r < nb; ++r)
      {
        const auto& nd = sys_.damped_nodes[r];
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(sys_.n_unknowns);
        for (int k = 0; k < 2; ++k)
          if (nd.trace_unknowns[k] >= 0)
            row[nd.trace_unknowns[k]] = nd.trace_coeffs[k];
        damp_gram_.row(r) = row * damp_basis_;
      }
  }

  PlateState Stepper::step(const PlateState& state) const
  {
    const double dt = cfg_.dt;
    const double c = dt * dt / 4.0;
    const int nb = static_cast<int>(sys_.damped_nodes.size());

    const Eigen::VectorXd u0 = sys_.restrict_field(state.u);
    const Eigen::VectorXd v0 = sys_.restrict_field(state.v);
    const Eigen::VectorXd base = u0 + (dt / 2.0) * v0 + c * p_vec_;

    auto trace_of = [&](const Eigen::VectorXd& x, int d) {
      const auto& nd = sys_.damped_nodes[d];
      double t = 0.0;
      for (int k = 0; k < 2; ++k)
        if (nd.trace_unknowns[k] >= 0)
          t += nd.trace_coeffs[k] * x[nd.trace_unknowns[k]];
      return t;
    };

    Field wfield = Field::zeros(mesh_);  // midpoint displacement iterate

    Eigen::VectorXd w = u0 + (dt / 2.0) * v0;  // predictor
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;

    if (cfg_.linearized)
      {
        w = lu_.solve(base);
        residual = 0.0;
        iterations = 1;
      }
    else
      {
        Eigen::VectorXd sigma(nb), intercept(nb);
        for (int it = 0; it < cfg_.picard_iterations; ++it)
          {
            ++iterations;
            // boundary feedback linearized at the current velocity trace
            for (int d = 0; d < nb; ++d)
              {
                const double tau = (2.0 / dt) * (trace_of(w, d) - trace_of(u0, d));
                const double sd = damping_slope(tau);
                sigma[d] = sd;
                intercept[d] = damping_value(tau) - sd * tau -
                               sd * (2.0 / dt) * trace_of(u0, d);
              }
            // Berger scalar from the current midpoint iterate
            sys_.scatter(w, wfield);
            const double gsq = gradient_norm_sq(wfield);

            Eigen::VectorXd r = base + c * (gsq * (sys_.laplace * w));
            for (int d = 0; d < nb; ++d)
              r[sys_.damped_nodes[d].load_unknown] +=
                c * sys_.damped_nodes[d].load_coeff * intercept[d];

            const Eigen::VectorXd y = lu_.solve(r);
            Eigen::VectorXd w_next;
            if (nb > 0)
              {
                Eigen::VectorXd t(nb);
                for (int d = 0; d < nb; ++d)
                  t[d] = trace_of(y, d);
                Eigen::MatrixXd S = Eigen::MatrixXd::Identity(nb, nb) -
                                    (dt / 2.0) * damp_gram_ * sigma.asDiagonal();
                const Eigen::VectorXd z = S.partialPivLu().solve(t);
                w_next = y + (dt / 2.0) * damp_basis_ * (sigma.asDiagonal() * z);
              }
            else
              w_next = y;

            residual = (w_next - w).lpNorm<Eigen::Infinity>();
            w = w_next;
            if (residual < cfg_.picard_tolerance)
              break;
          }
        if (residual >= cfg_.picard_tolerance &&
            iterations >= cfg_.picard_iterations)
          throw std::runtime_error(
            "Picard iteration did not converge: final residual " +
            std::to_string(residual) + " after " + std::to_string(iterations) +
            " iterations");
      }
    last_iterations_ = iterations;

    const Eigen::VectorXd u1 = 2.0 * w - u0;
    const Eigen::VectorXd v1 = (4.0 / dt) * (w - u0) - v0;
    if (!u1.allFinite() || !v1.allFinite())
      throw std::runtime_error("step produced non-finite values");

    PlateState next;
    next.u = Field::zeros(mesh_);
    next.v = Field::zeros(mesh_);
    sys_.scatter(u1, next.u);
    sys_.scatter(v1, next.v);
    next.t = state.t + dt;
    close_state_ghosts(next, params_, law_);
    return next;
  }

  PlateState step_hd(const PlateState& state, const PhysicsParams& params,
                     const DampingLaw& law, const StepperConfig& cfg)
  {
    const auto& mesh = state.u.mesh;
    if (mesh->config == Configuration::FCD1D)
      throw std::invalid_argument("step_hd requires a hinged configuration");
    return Stepper(mesh, params, law, cfg).step(state);
  }

  PlateState step_fcd1d(const PlateState& state, const PhysicsParams& params,
                        const StepperConfig& cfg)
  {
    const auto& mesh = state.u.mesh;
    if (mesh->config != Configuration::FCD1D)
      throw std::invalid_argument("step_fcd1d requires the clamped/free interval");
    return Stepper(mesh, params, make_damping_law("linear"), cfg).step(state);
  }

  TrajectoryRecord run_trajectory(const PlateState& initial, double horizon,
                                  const PhysicsParams& params,
                                  const DampingLaw& law,
                                  const StepperConfig& cfg, int record_stride,
                                  double potential_offset_m)
  {
    if (!(horizon > 0.0))
      throw std::invalid_argument("horizon must be positive");
    if (record_stride < 1)
      throw std::invalid_argument("record stride must be >= 1");

    TrajectoryRecord rec;
    rec.mesh = initial.u.mesh;
    rec.config = rec.mesh->config;
    rec.params = params;
    rec.law = law;
    rec.stepper = cfg;
    rec.potential_offset_m = potential_offset_m;

    const long steps = std::lround(horizon / cfg.dt);
    if (steps < 1)
      throw std::invalid_argument("horizon shorter than one step");

    Stepper stepper(rec.mesh, params, law, cfg);

    PlateState state = initial;
    state.u.mesh = rec.mesh;
    close_state_ghosts(state, params, law);

    append_energy_sample(rec, state);
    rec.snapshot_times.push_back(state.t);
    rec.snapshots.push_back(state);

    for (long k = 1; k <= steps; ++k)
      {
        try
          {
            state = stepper.step(state);
          }
        catch (const std::exception& e)
          {
            rec.incomplete = true;
            rec.error = e.what();
            break;
          }
        append_energy_sample(rec, state);
        if (k % record_stride == 0 || k == steps)
          {
            rec.snapshot_times.push_back(state.t);
            rec.snapshots.push_back(state);
          }
      }
    return rec;
  }

  Field static_solve_hd(std::shared_ptr<const Mesh> mesh,
                        const PhysicsParams& params, double tolerance,
                        int max_iterations)
  {
    if (mesh->config == Configuration::FCD1D)
      throw std::invalid_argument("static solve supports hinged configurations");
    params.validate();
    const DiscreteSystem sys = assemble_discrete_system(mesh);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(sys.n_unknowns);
    if (!params.load.empty())
      p = sys.restrict_field(params.load);

    Field ufield = Field::zeros(mesh);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(sys.n_unknowns);
    for (int it = 0; it < max_iterations; ++it)
      {
        sys.scatter(u, ufield);
        const double coeff = params.gamma - gradient_norm_sq(ufield);
        Eigen::SparseMatrix<double> M =
          sys.stiffness + (coeff * sys.laplace).eval();
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(M);
        if (lu.info() != Eigen::Success)
          throw std::runtime_error("static solve: factorization failed");
        const Eigen::VectorXd next = lu.solve(p);
        const double res = (next - u).lpNorm<Eigen::Infinity>();
        u = next;
        if (res < tolerance * std::max(1.0, u.lpNorm<Eigen::Infinity>()))
          {
            sys.scatter(u, ufield);
            // hinged static state: zero velocity closure
            Field zero = Field::zeros(mesh);
            PlateState s{ufield, zero, 0.0};
            close_state_ghosts(s, params, make_damping_law("linear"));
            return s.u;
          }
      }
    throw std::runtime_error("static solve did not converge");
  }

}  // namespace berger
