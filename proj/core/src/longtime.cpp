#include "berger/longtime.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <future>
#include <stdexcept>
#include <thread>

namespace berger
{
  namespace
  {
    double trapezoid(const std::vector<double>& t, const std::vector<double>& f,
                     std::size_t a, std::size_t b)
    {
      double sum = 0.0;
      for (std::size_t k = a; k + 1 <= b; ++k)
        sum += 0.5 * (t[k + 1] - t[k]) * (f[k] + f[k + 1]);
      return sum;
    }

    std::pair<std::size_t, std::size_t> snapshot_window(
      const TrajectoryRecord& rec, double s, double t)
    {
      if (!(s < t))
        throw std::invalid_argument("window needs s < t");
      const std::size_t a = rec.snapshot_index(s);
      const std::size_t b = rec.snapshot_index(t);
      if (a >= b)
        throw std::invalid_argument("window does not cover two snapshots");
      return {a, b};
    }

    PlateState closed_snapshot(const TrajectoryRecord& rec, std::size_t k)
    {
      PlateState st = rec.snapshots[k];
      if (!st.u.ghosts_valid)
        close_state_ghosts(st, rec.params, rec.law);
      return st;
    }

    int thread_budget(int requested, std::size_t jobs)
    {
      int n = requested;
      if (n <= 0)
        {
          if (const char* env = std::getenv("BERGER_LAB_THREADS"))
            n = std::atoi(env);
          if (n <= 0)
            n = static_cast<int>(std::thread::hardware_concurrency());
          if (n <= 0)
            n = 1;
        }
      return std::max(1, std::min<int>(n, static_cast<int>(jobs)));
    }
  }  // namespace

  MultiplierAuditReport multiplier_audit(const TrajectoryRecord& rec,
                                         MultiplierIdentity identity,
                                         const FluxField& flux, double s,
                                         double t)
  {
    if (rec.config == Configuration::FCD1D)
      throw std::invalid_argument("multiplier audits run on hinged records");
    if (identity == MultiplierIdentity::Flux && rec.mesh->dim != 2)
      throw std::invalid_argument(
        "the flux identity is implemented for the rectangle only");
    if (flux.mesh != rec.mesh)
      throw std::invalid_argument("flux field lives on a different mesh");

    const Mesh& m = *rec.mesh;
    const auto [a, b] = snapshot_window(rec, s, t);
    const std::size_t n = b - a + 1;

    MultiplierAuditReport rep;
    rep.identity = identity;
    rep.window_s = rec.snapshot_times[a];
    rep.window_t = rec.snapshot_times[b];
    const auto star = check_star_shaped(m.spec, flux.anchor);
    rep.star_shaped_ok = star.satisfied;
    rep.star_min = star.min_over_boundary;

    std::vector<double> times(n);
    // per-snapshot integrands
    std::vector<double> bending_sq(n), grad4(n), kinetic_sq(n), bdamp_nu_u(n),
      pu(n), gamma_grad(n), cross(n);
    std::vector<double> bdry_moment(n), bdry_shear(n), bdry_mixed(n),
      berger_bdry(n), p_flux(n), cross_flux(n), interior_flux(n), sign_def(n),
      tr_nn(n), tr_tn(n);

    for (std::size_t k = 0; k < n; ++k)
      {
        const PlateState st = closed_snapshot(rec, a + k);
        times[k] = st.t;
        const Field lap = laplacian(st.u);
        const double gsq = gradient_norm_sq(st.u);
        const std::vector<double> dnu_u = normal_trace_all(st.u);
        const std::vector<double> dnu_v = normal_trace_all(st.v);

        if (identity == MultiplierIdentity::Equipartition)
          {
            bending_sq[k] = inner(lap, lap);
            grad4[k] = gsq * gsq;
            kinetic_sq[k] = inner(st.v, st.v);
            double bsum = 0.0;
            for (int id = 0; id < m.storage_size(); ++id)
              if (m.boundary_weight[id] != 0.0)
                bsum +=
                  m.boundary_weight[id] * rec.law.value(dnu_v[id]) * dnu_u[id];
            bdamp_nu_u[k] = bsum;
            pu[k] = rec.params.load.empty() ? 0.0 : inner(rec.params.load, st.u);
            gamma_grad[k] = rec.params.gamma * gsq;
            cross[k] = inner(st.v, st.u);
            continue;
          }

        // flux identity
        Field hgrad(rec.mesh);
        {
          const Field gx = gradient_component(st.u, 0);
          const Field gy = gradient_component(st.u, 1);
          for (int id = 0; id < m.storage_size(); ++id)
            hgrad.values[id] = flux.hx_values[id] * gx.values[id] +
                               flux.hy_values[id] * gy.values[id];
          hgrad.ghosts_valid = false;
        }
        const std::vector<double> dnu_lap = normal_trace_all(lap);
        const std::vector<double> dnu_hgrad = normal_trace_all(hgrad);
        const std::vector<double> d2nn = second_normal_trace_all(st.u);
        const std::vector<double> dtn =
          tangential_derivative_boundary(m, dnu_u);

        interior_flux[k] = inner(lap, lap) + inner(st.v, st.v);
        double b_m = 0.0, b_s = 0.0, b_x = 0.0, b_berger = 0.0, b_sign = 0.0,
               b_nn = 0.0, b_tn = 0.0;
        for (int id = 0; id < m.storage_size(); ++id)
          {
            const double w = m.boundary_weight[id];
            if (w == 0.0)
              continue;
            const double hnu = flux.hx_values[id] * m.normal[id][0] +
                               flux.hy_values[id] * m.normal[id][1];
            const double lap_b = lap.values[id];
            const double hg_b = hnu * dnu_u[id];  // h.grad u = (h.nu) dnu u on the edge
            b_m += w * 0.5 * hnu * lap_b * lap_b;
            b_s += w * dnu_lap[id] * hg_b;
            b_x += w * lap_b * dnu_hgrad[id];
            b_berger += w * hnu * dnu_u[id] * dnu_u[id];
            b_sign += w * hnu * dnu_u[id] * dnu_u[id];
            b_nn += w * d2nn[id] * d2nn[id];
            b_tn += w * dtn[id] * dtn[id];
          }
        bdry_moment[k] = b_m;
        bdry_shear[k] = b_s;
        bdry_mixed[k] = -b_x;
        berger_bdry[k] = 0.5 * (rec.params.gamma - gsq) * b_berger;
        sign_def[k] = -gsq * b_sign;
        tr_nn[k] = b_nn;
        tr_tn[k] = b_tn;
        p_flux[k] =
          rec.params.load.empty() ? 0.0 : inner(rec.params.load, hgrad);
        cross_flux[k] = inner(st.v, hgrad);
      }

    auto T = [&](const std::vector<double>& f) {
      return trapezoid(times, f, 0, n - 1);
    };

    if (identity == MultiplierIdentity::Equipartition)
      {
        rep.lhs_terms["int bending_sq"] = T(bending_sq);
        rep.lhs_terms["int grad4"] = T(grad4);
        rep.lhs_terms["int kinetic_sq (-)"] = -T(kinetic_sq);
        rep.lhs_terms["int boundary damping x dnu u"] = T(bdamp_nu_u);
        rep.rhs_terms["cross boundary-in-time (-)"] = -(cross[n - 1] - cross[0]);
        rep.rhs_terms["int (p, u)"] = T(pu);
        rep.rhs_terms["int gamma grad_sq"] = T(gamma_grad);
      }
    else
      {
        rep.lhs_terms["int bending+kinetic"] = T(interior_flux);
        rep.lhs_terms["int bdry moment"] = T(bdry_moment);
        rep.lhs_terms["int bdry shear x flux"] = T(bdry_shear);
        rep.lhs_terms["int bdry mixed (-)"] = T(bdry_mixed);
        rep.lhs_terms["int berger boundary"] = T(berger_bdry);
        rep.rhs_terms["cross boundary-in-time (-)"] =
          -(cross_flux[n - 1] - cross_flux[0]);
        rep.rhs_terms["int (p, h.grad u)"] = T(p_flux);
        rep.sign_definite_term = T(sign_def);
        rep.trace_nn_norm = std::sqrt(std::max(0.0, T(tr_nn)));
        rep.trace_tn_norm = std::sqrt(std::max(0.0, T(tr_tn)));
      }
    for (const auto& [k, v] : rep.lhs_terms)
      rep.lhs += v;
    for (const auto& [k, v] : rep.rhs_terms)
      rep.rhs += v;
    rep.residual = std::abs(rep.lhs - rep.rhs);
    return rep;
  }

  ContractionFit fit_contraction(const std::vector<double>& series)
  {
    if (series.size() < 3)
      throw std::invalid_argument("contraction fit needs at least 3 samples");
    const std::size_t n = series.size() - 1;
    double sx = 0, sy = 0;
    for (std::size_t k = 0; k < n; ++k)
      {
        sx += series[k];
        sy += series[k + 1];
      }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k)
      {
        sxx += (series[k] - mx) * (series[k] - mx);
        sxy += (series[k] - mx) * (series[k + 1] - my);
      }
    ContractionFit fit;
    fit.eta = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.kbar = my - fit.eta * mx;
    double ss = 0, scale = 0;
    for (std::size_t k = 0; k < n; ++k)
      {
        const double e = series[k + 1] - (fit.eta * series[k] + fit.kbar);
        ss += e * e;
        scale += std::abs(series[k + 1]);
      }
    const double rms = std::sqrt(ss / n);
    fit.residual = scale > 0.0 ? rms / (scale / n) : rms;
    return fit;
  }

  AbsorbingReport absorbing_ball_experiment(const std::vector<PlateState>& family,
                                            const PhysicsParams& params,
                                            const DampingLaw& law,
                                            const StepperConfig& cfg,
                                            double horizon, double window_t,
                                            AbsorbingOptions opts)
  {
    if (family.empty())
      throw std::invalid_argument("empty initial family");
    if (!(window_t > 0.0 && window_t < horizon))
      throw std::invalid_argument("window must satisfy 0 < T < horizon");
    const auto mesh = family.front().u.mesh;
    if (mesh->config == Configuration::FCD1D)
      throw std::invalid_argument("absorbing experiment needs a hinged configuration");
    if (!verify_damping_assumption(law).passed)
      throw std::invalid_argument(
        "damping law fails the slope assumption checks");

    const double M = potential_bound_m(params, 0.25, *mesh);

    std::vector<TrajectoryRecord> records(family.size());
    {
      std::atomic<std::size_t> next{0};
      auto worker = [&]() {
        for (;;)
          {
            const std::size_t k = next.fetch_add(1);
            if (k >= family.size())
              return;
            const long steps = std::lround(horizon / cfg.dt);
            const int stride = std::max<long>(1, steps / 256);
            records[k] = run_trajectory(family[k], horizon, params, law, cfg,
                                        stride, M);
            if (records[k].incomplete)
              throw std::runtime_error("family member " + std::to_string(k) +
                                       " aborted: " + records[k].error);
          }
      };
      const int nt = thread_budget(opts.max_threads, family.size());
      std::vector<std::future<void>> futs;
      for (int i = 1; i < nt; ++i)
        futs.push_back(std::async(std::launch::async, worker));
      worker();
      for (auto& f : futs)
        f.get();
    }

    AbsorbingReport rep;
    rep.potential_offset_m = M;

    // suffix maxima of hatE and the last-window plateau of each run
    std::vector<std::vector<double>> sufmax(records.size());
    double plateau = 0.0;
    for (std::size_t r = 0; r < records.size(); ++r)
      {
        const auto& he = records[r].series.hat_e;
        sufmax[r].assign(he.size(), 0.0);
        double mx = -1.0;
        for (std::size_t k = he.size(); k-- > 0;)
          {
            mx = std::max(mx, he[k]);
            sufmax[r][k] = mx;
          }
        const auto& tt = records[r].times;
        for (std::size_t k = 0; k < he.size(); ++k)
          if (tt[k] >= horizon - window_t)
            plateau = std::max(plateau, he[k]);
      }

    double radius = (1.0 + opts.radius_margin) * plateau;
    if (radius <= 0.0)
      radius = 0.0;  // zero family: the ball degenerates
    std::vector<double> entries(records.size(), -1.0);
    for (int round = 0;; ++round)
      {
        bool all_in = true;
        for (std::size_t r = 0; r < records.size(); ++r)
          {
            const auto& tt = records[r].times;
            entries[r] = -1.0;
            for (std::size_t k = 0; k < sufmax[r].size(); ++k)
              if (sufmax[r][k] <= radius)
                {
                  if (tt[k] <= horizon - window_t + 1e-12)
                    entries[r] = tt[k];
                  break;
                }
            if (entries[r] < 0.0)
              all_in = false;
          }
        if (all_in)
          break;
        if (round >= opts.max_enlargements)
          throw std::runtime_error(
            "no common absorbing radius found within the horizon");
        radius = radius > 0.0 ? radius * 1.25 : 1e-12;
        ++rep.enlargements;
      }
    rep.ball_radius = radius;

    for (std::size_t r = 0; r < records.size(); ++r)
      {
        const auto& recd = records[r];
        AbsorbingEntry e;
        e.hat_e0 = recd.series.hat_e.front();
        e.entry_time = entries[r];
        const std::size_t k0 = recd.time_index(entries[r]);
        e.post_entry_sup = sufmax[r][k0];

        // offset-energy samples at window multiples
        std::vector<double> em;
        for (double tm = 0.0; tm <= horizon + 1e-12; tm += window_t)
          em.push_back(recd.series.script_e[recd.time_index(std::min(tm, horizon))] + M);
        const ContractionFit fit = fit_contraction(em);
        e.eta = fit.eta;
        e.kbar = fit.kbar;
        e.fit_residual = fit.residual;
        e.eta_valid = fit.residual <= opts.fit_residual_threshold;
        rep.entries.push_back(e);
      }
    return rep;
  }

  namespace
  {
    void require_compatible(const TrajectoryRecord& a, const TrajectoryRecord& b)
    {
      if (a.mesh != b.mesh)
        throw std::invalid_argument("records live on different meshes");
      if (a.config != b.config)
        throw std::invalid_argument("records have different configurations");
      if (std::abs(a.stepper.dt - b.stepper.dt) > 1e-15)
        throw std::invalid_argument("records have different step sizes");
      if (a.params.gamma != b.params.gamma || a.params.mu1 != b.params.mu1)
        throw std::invalid_argument("records have different parameters");
      if (a.snapshot_times.size() != b.snapshot_times.size())
        throw std::invalid_argument("records have different snapshot grids");
    }
  }  // namespace

  DifferenceAudit difference_decomposition_audit(const TrajectoryRecord& rec_u,
                                                 const TrajectoryRecord& rec_w,
                                                 double s, double t,
                                                 double epsilon, double eta)
  {
    require_compatible(rec_u, rec_w);
    const auto [a, b] = snapshot_window(rec_u, s, t);
    const std::size_t n = b - a + 1;
    const double theta = 1.0 - eta / 2.0;

    DifferenceAudit out;
    out.times.resize(n);
    out.e_z.resize(n);
    std::vector<double> fz_zt(n), bracket(n), int2(n), int3(n), proxy(n);

    for (std::size_t k = 0; k < n; ++k)
      {
        const PlateState su = closed_snapshot(rec_u, a + k);
        const PlateState sw = closed_snapshot(rec_w, a + k);
        out.times[k] = su.t;

        const Field z = su.u - sw.u;
        const Field zt = su.v - sw.v;
        const Field lap_u = laplacian(su.u);
        const Field lap_w = laplacian(sw.u);
        const Field lap_z = lap_u - lap_w;
        const double gu = gradient_norm_sq(su.u);
        const double gw = gradient_norm_sq(sw.u);
        const double gz = gradient_norm_sq(z);
        const double cu = rec_u.params.gamma - gu;
        const double cw = rec_u.params.gamma - gw;

        Field F(rec_u.mesh);
        for (int id = 0; id < rec_u.mesh->storage_size(); ++id)
          F.values[id] = cu * lap_u.values[id] - cw * lap_w.values[id];

        fz_zt[k] = inner(F, zt);
        bracket[k] = inner(F, z) + 0.5 * rec_u.params.gamma * gz -
                     0.5 * gu * gz - (gu - gw) * inner(lap_w, z);
        int2[k] = (gu - gw) * inner(lap_w, zt);
        int3[k] = inner(lap_u, su.v) * gz;
        out.e_z[k] = 0.5 * (inner(lap_z, lap_z) + inner(zt, zt));
        const double X = inner(z, z);
        const double Y = inner(lap_z, lap_z);
        proxy[k] = (X > 0.0 && Y > 0.0)
                     ? std::pow(X, 1.0 - theta) * std::pow(Y, theta)
                     : 0.0;
      }

    auto T = [&](const std::vector<double>& f, std::size_t j) {
      return trapezoid(out.times, f, j, n - 1);
    };

    out.lhs = T(fz_zt, 0);
    out.terms["int (F(z), z_t)"] = out.lhs;
    out.terms["bracket at t"] = bracket[n - 1];
    out.terms["bracket at s"] = bracket[0];
    out.terms["int mixed (-)"] = -T(int2, 0);
    out.terms["int (lap u, u_t) grad_z_sq"] = T(int3, 0);
    out.rhs = bracket[n - 1] - bracket[0] - T(int2, 0) + T(int3, 0);
    out.residual = std::abs(out.lhs - out.rhs);

    double c_emp = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j)
      {
        const double A = std::abs(T(fz_zt, j));
        const double B = epsilon * T(out.e_z, j);
        double S = 0.0;
        for (std::size_t k = j; k < n; ++k)
          S = std::max(S, proxy[k]);
        if (S > 0.0)
          c_emp = std::max(c_emp, (A - B) / S);
      }
    out.key_inequality_constant = c_emp;
    {
      const double A = std::abs(out.lhs);
      const double B = epsilon * T(out.e_z, 0);
      double S = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        S = std::max(S, proxy[k]);
      out.key_inequality_slack = B + c_emp * S - A;
    }
    return out;
  }

  std::vector<double> difference_energy_decay(const TrajectoryRecord& rec_u,
                                              const TrajectoryRecord& rec_w)
  {
    require_compatible(rec_u, rec_w);
    std::vector<double> out;
    for (std::size_t k = 0; k < rec_u.snapshots.size(); ++k)
      {
        const PlateState su = closed_snapshot(rec_u, k);
        const PlateState sw = closed_snapshot(rec_w, k);
        const Field lap_z = laplacian(su.u) - laplacian(sw.u);
        const Field zt = su.v - sw.v;
        out.push_back(0.5 * (inner(lap_z, lap_z) + inner(zt, zt)));
      }
    return out;
  }

  double observability_constant(const TrajectoryRecord& rec, double T,
                                double alpha)
  {
    if (rec.config == Configuration::FCD1D)
      throw std::invalid_argument("observability audit runs on hinged records");
    if (!(alpha > 0.0 && alpha < T / 2.0))
      throw std::invalid_argument("need 0 < alpha < T/2");
    const auto [a, b] = snapshot_window(rec, 0.0, T);
    const std::size_t n = b - a + 1;
    const Mesh& m = *rec.mesh;

    std::vector<double> times(n), d_sq(n), tr_sq(n), hat_sq(n);
    double hat0 = 0.0, hatT = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      {
        const PlateState st = closed_snapshot(rec, a + k);
        times[k] = st.t;
        const EnergyReport r = compute_energies(st, rec.params);
        hat_sq[k] = r.hat_e * r.hat_e;
        if (k == 0)
          hat0 = r.hat_e;
        if (k == n - 1)
          hatT = r.hat_e;
        const std::vector<double> tr = normal_trace_all(st.v);
        double dsq = 0.0, tsq = 0.0;
        for (int id = 0; id < m.storage_size(); ++id)
          if (m.boundary_weight[id] != 0.0)
            {
              const double D = rec.law.value(tr[id]);
              dsq += m.boundary_weight[id] * D * D;
              tsq += m.boundary_weight[id] * tr[id] * tr[id];
            }
        d_sq[k] = dsq;
        tr_sq[k] = tsq;
      }
    const double D2 = trapezoid(times, d_sq, 0, n - 1);
    const double T2 = trapezoid(times, tr_sq, 0, n - 1);
    const double H2 = trapezoid(times, hat_sq, 0, n - 1);
    const double denom = hat0 + D2 * (1.0 + H2) + T2 + 1.0;
    return (T - 2.0 * alpha) * hatT / denom;
  }

  double hausdorff_semidistance(const TrajectoryRecord& rec_u,
                                const TrajectoryRecord& rec_w)
  {
    if (rec_u.mesh != rec_w.mesh)
      throw std::invalid_argument("records live on different meshes");
    double worst = 0.0;
    for (std::size_t i = 0; i < rec_u.snapshots.size(); ++i)
      {
        const PlateState a = closed_snapshot(rec_u, i);
        const Field lap_a = laplacian(a.u);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < rec_w.snapshots.size(); ++j)
          {
            const PlateState b = closed_snapshot(rec_w, j);
            const Field dl = lap_a - laplacian(b.u);
            const Field dv = a.v - b.v;
            best = std::min(best, 0.5 * (inner(dl, dl) + inner(dv, dv)));
          }
        worst = std::max(worst, best);
      }
    return std::sqrt(worst);
  }

}  // namespace berger
