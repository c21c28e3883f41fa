#include "berger/config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace berger
{
  using json = nlohmann::ordered_json;

  std::string to_string(ExperimentType t)
  {
    switch (t)
      {
        case ExperimentType::Simulate:
          return "simulate";
        case ExperimentType::Audit:
          return "audit";
        case ExperimentType::Absorb:
          return "absorb";
        case ExperimentType::Diff:
          return "diff";
        case ExperimentType::Converge:
          return "converge";
      }
    return "?";
  }

  namespace
  {
    [[noreturn]] void fail(const std::string& path, const std::string& what)
    {
      throw std::invalid_argument("config error at " + path + ": " + what);
    }

    void reject_unknown(const json& obj, const std::string& path,
                        const std::set<std::string>& known)
    {
      for (auto it = obj.begin(); it != obj.end(); ++it)
        if (known.find(it.key()) == known.end())
          fail(path + "/" + it.key(), "unknown key");
    }

    double num(const json& j, const std::string& path)
    {
      if (!j.is_number())
        fail(path, "expected a number");
      return j.get<double>();
    }

    int integer(const json& j, const std::string& path)
    {
      if (!j.is_number_integer())
        fail(path, "expected an integer");
      return j.get<int>();
    }

    std::string str(const json& j, const std::string& path)
    {
      if (!j.is_string())
        fail(path, "expected a string");
      return j.get<std::string>();
    }

    Configuration parse_configuration(const std::string& s,
                                      const std::string& path)
    {
      if (s == "HD1D")
        return Configuration::HD1D;
      if (s == "HD2D")
        return Configuration::HD2D;
      if (s == "FCD1D")
        return Configuration::FCD1D;
      fail(path, "unknown configuration '" + s + "'");
    }

    DomainSpec default_domain(Configuration c, std::array<double, 2> extents)
    {
      switch (c)
        {
          case Configuration::HD1D:
            return DomainSpec::hinged_interval(extents[0]);
          case Configuration::HD2D:
            return DomainSpec::hinged_rectangle(extents[0], extents[1]);
          case Configuration::FCD1D:
            return DomainSpec::clamped_free_interval(extents[0]);
        }
      return DomainSpec::hinged_interval(extents[0]);
    }

    InitialSpec parse_initial(const json& j, const std::string& path)
    {
      InitialSpec s;
      reject_unknown(j, path,
                     {"profile", "u_amplitude", "v_amplitude", "i", "j"});
      if (j.contains("profile"))
        s.profile = str(j["profile"], path + "/profile");
      if (j.contains("u_amplitude"))
        s.u_amplitude = num(j["u_amplitude"], path + "/u_amplitude");
      if (j.contains("v_amplitude"))
        s.v_amplitude = num(j["v_amplitude"], path + "/v_amplitude");
      if (j.contains("i"))
        s.mode_i = integer(j["i"], path + "/i");
      if (j.contains("j"))
        s.mode_j = integer(j["j"], path + "/j");
      const std::set<std::string> profiles{"zero", "mode", "mode1d",
                                           "cantilever", "bump"};
      if (profiles.find(s.profile) == profiles.end())
        fail(path + "/profile", "unknown initial profile '" + s.profile + "'");
      return s;
    }
  }  // namespace

  RunConfig parse_config(const std::string& text)
  {
    json doc;
    try
      {
        doc = json::parse(text);
      }
    catch (const json::parse_error& e)
      {
        throw std::invalid_argument(std::string("config parse error: ") +
                                    e.what());
      }
    if (!doc.is_object())
      throw std::invalid_argument("config error at /: expected an object");

    RunConfig cfg;
    reject_unknown(doc, "",
                   {"configuration", "domain", "resolution", "physics",
                    "damping", "stepper", "initial", "experiment", "output_dir",
                    "seed"});

    if (!doc.contains("configuration"))
      fail("/configuration", "missing");
    cfg.configuration =
      parse_configuration(str(doc["configuration"], "/configuration"),
                          "/configuration");

    std::array<double, 2> extents{1.0, 1.0};
    if (doc.contains("domain"))
      {
        const json& d = doc["domain"];
        reject_unknown(d, "/domain", {"kind", "extents"});
        std::string kind =
          d.contains("kind") ? str(d["kind"], "/domain/kind")
                             : (cfg.configuration == Configuration::HD2D
                                  ? "rectangle"
                                  : "interval");
        if (kind != "interval" && kind != "rectangle")
          fail("/domain/kind", "expected 'interval' or 'rectangle'");
        const bool want_rect = cfg.configuration == Configuration::HD2D;
        if ((kind == "rectangle") != want_rect)
          fail("/domain/kind", "configuration/domain mismatch: " +
                                 to_string(cfg.configuration) + " needs " +
                                 (want_rect ? "a rectangle" : "an interval"));
        if (d.contains("extents"))
          {
            const json& e = d["extents"];
            if (!e.is_array() || e.empty() || e.size() > 2)
              fail("/domain/extents", "expected [Lx] or [Lx, Ly]");
            extents[0] = num(e[0], "/domain/extents[0]");
            if (e.size() > 1)
              extents[1] = num(e[1], "/domain/extents[1]");
          }
      }
    cfg.domain = default_domain(cfg.configuration, extents);
    cfg.domain.validate();

    cfg.resolution = cfg.configuration == Configuration::HD2D
                       ? std::array<int, 2>{33, 33}
                       : std::array<int, 2>{65, 1};
    if (doc.contains("resolution"))
      {
        const json& r = doc["resolution"];
        if (!r.is_array() || r.empty() || r.size() > 2)
          fail("/resolution", "expected [n] or [nx, ny]");
        cfg.resolution[0] = integer(r[0], "/resolution[0]");
        cfg.resolution[1] =
          r.size() > 1 ? integer(r[1], "/resolution[1]") : cfg.resolution[0];
        if (cfg.configuration != Configuration::HD2D)
          cfg.resolution[1] = 1;
      }

    cfg.mu = cfg.configuration == Configuration::FCD1D ? 0.3 : 1.0;
    if (doc.contains("physics"))
      {
        const json& p = doc["physics"];
        reject_unknown(p, "/physics", {"gamma", "mu", "mu1", "load"});
        if (p.contains("gamma"))
          cfg.gamma = num(p["gamma"], "/physics/gamma");
        if (p.contains("mu"))
          cfg.mu = num(p["mu"], "/physics/mu");
        if (p.contains("mu1"))
          cfg.mu1 = num(p["mu1"], "/physics/mu1");
        if (p.contains("load"))
          {
            const json& l = p["load"];
            reject_unknown(l, "/physics/load", {"profile", "amplitude", "i", "j"});
            if (l.contains("profile"))
              cfg.load.profile = str(l["profile"], "/physics/load/profile");
            if (l.contains("amplitude"))
              cfg.load.amplitude = num(l["amplitude"], "/physics/load/amplitude");
            if (l.contains("i"))
              cfg.load.mode_i = integer(l["i"], "/physics/load/i");
            if (l.contains("j"))
              cfg.load.mode_j = integer(l["j"], "/physics/load/j");
            const std::set<std::string> profiles{"zero", "constant", "mode",
                                                 "mode1d", "quadratic1d"};
            if (profiles.find(cfg.load.profile) == profiles.end())
              fail("/physics/load/profile",
                   "unknown load profile '" + cfg.load.profile + "'");
          }
      }
    if (!(cfg.gamma >= 0.0))
      fail("/physics/gamma", "must be >= 0");
    if (!(cfg.mu > 0.0 && cfg.mu <= 1.0))
      fail("/physics/mu", "must lie in (0, 1]");
    if (!(cfg.mu1 >= 0.0))
      fail("/physics/mu1", "must be >= 0");

    if (doc.contains("damping"))
      {
        const json& d = doc["damping"];
        reject_unknown(d, "/damping", {"law", "params"});
        if (d.contains("law"))
          cfg.damping_law = str(d["law"], "/damping/law");
        if (d.contains("params"))
          {
            if (!d["params"].is_object())
              fail("/damping/params", "expected an object");
            for (auto it = d["params"].begin(); it != d["params"].end(); ++it)
              cfg.damping_params[it.key()] =
                num(it.value(), "/damping/params/" + it.key());
          }
      }
    try
      {
        make_damping_law(cfg.damping_law, cfg.damping_params);
      }
    catch (const std::exception& e)
      {
        fail("/damping", e.what());
      }

    if (doc.contains("stepper"))
      {
        const json& s = doc["stepper"];
        reject_unknown(s, "/stepper",
                       {"dt", "picard_iterations", "picard_tolerance",
                        "linearized"});
        if (s.contains("dt"))
          {
            if (s["dt"].is_string())
              {
                if (str(s["dt"], "/stepper/dt") != "auto")
                  fail("/stepper/dt", "expected a number or 'auto'");
              }
            else
              cfg.dt = num(s["dt"], "/stepper/dt");
          }
        if (s.contains("picard_iterations"))
          cfg.picard_iterations =
            integer(s["picard_iterations"], "/stepper/picard_iterations");
        if (s.contains("picard_tolerance"))
          cfg.picard_tolerance =
            num(s["picard_tolerance"], "/stepper/picard_tolerance");
        if (s.contains("linearized"))
          {
            if (!s["linearized"].is_boolean())
              fail("/stepper/linearized", "expected a boolean");
            cfg.linearized = s["linearized"].get<bool>();
          }
      }
    if (cfg.dt && !(*cfg.dt > 0.0))
      fail("/stepper/dt", "must be positive");
    if (cfg.picard_iterations < 1)
      fail("/stepper/picard_iterations", "must be >= 1");
    if (!(cfg.picard_tolerance > 0.0))
      fail("/stepper/picard_tolerance", "must be positive");

    if (doc.contains("initial"))
      cfg.initial = parse_initial(doc["initial"], "/initial");

    if (doc.contains("experiment"))
      {
        const json& e = doc["experiment"];
        reject_unknown(e, "/experiment",
                       {"type", "horizon", "record_stride", "source",
                        "input_dir", "window", "flux_anchor", "pibound_states",
                        "pibound_epsilons", "family_hat_e", "window_t",
                        "fit_residual_threshold", "initial_b", "target",
                        "levels"});
        auto& x = cfg.experiment;
        if (e.contains("type"))
          {
            const std::string t = str(e["type"], "/experiment/type");
            if (t == "simulate")
              x.type = ExperimentType::Simulate;
            else if (t == "audit")
              x.type = ExperimentType::Audit;
            else if (t == "absorb")
              x.type = ExperimentType::Absorb;
            else if (t == "diff")
              x.type = ExperimentType::Diff;
            else if (t == "converge")
              x.type = ExperimentType::Converge;
            else
              fail("/experiment/type", "unknown experiment '" + t + "'");
          }
        if (e.contains("horizon"))
          x.horizon = num(e["horizon"], "/experiment/horizon");
        if (e.contains("record_stride"))
          x.record_stride = integer(e["record_stride"], "/experiment/record_stride");
        if (e.contains("source"))
          x.source = str(e["source"], "/experiment/source");
        if (x.source != "fresh" && x.source != "stored")
          fail("/experiment/source", "expected 'fresh' or 'stored'");
        if (e.contains("input_dir"))
          x.input_dir = str(e["input_dir"], "/experiment/input_dir");
        if (e.contains("window"))
          {
            const json& w = e["window"];
            if (!w.is_array() || w.size() != 2)
              fail("/experiment/window", "expected [s, t]");
            x.window = {num(w[0], "/experiment/window[0]"),
                        num(w[1], "/experiment/window[1]")};
          }
        if (e.contains("flux_anchor"))
          {
            const json& w = e["flux_anchor"];
            if (!w.is_array() || w.size() != 2)
              fail("/experiment/flux_anchor", "expected [x, y]");
            x.flux_anchor = {num(w[0], "/experiment/flux_anchor[0]"),
                             num(w[1], "/experiment/flux_anchor[1]")};
            x.flux_anchor_set = true;
          }
        if (e.contains("pibound_states"))
          x.pibound_states = integer(e["pibound_states"], "/experiment/pibound_states");
        if (e.contains("pibound_epsilons"))
          {
            x.pibound_epsilons.clear();
            for (std::size_t k = 0; k < e["pibound_epsilons"].size(); ++k)
              x.pibound_epsilons.push_back(
                num(e["pibound_epsilons"][k], "/experiment/pibound_epsilons"));
          }
        if (e.contains("family_hat_e"))
          {
            for (std::size_t k = 0; k < e["family_hat_e"].size(); ++k)
              x.family_hat_e.push_back(
                num(e["family_hat_e"][k], "/experiment/family_hat_e"));
          }
        if (e.contains("window_t"))
          x.window_t = num(e["window_t"], "/experiment/window_t");
        if (e.contains("fit_residual_threshold"))
          x.fit_residual_threshold =
            num(e["fit_residual_threshold"], "/experiment/fit_residual_threshold");
        if (e.contains("initial_b"))
          x.initial_b = parse_initial(e["initial_b"], "/experiment/initial_b");
        if (e.contains("target"))
          x.target = str(e["target"], "/experiment/target");
        if (x.target != "eigenmode" && x.target != "balance_hd" &&
            x.target != "balance_fcd")
          fail("/experiment/target", "unknown convergence target");
        if (e.contains("levels"))
          x.levels = integer(e["levels"], "/experiment/levels");
        if (!(x.horizon > 0.0))
          fail("/experiment/horizon", "must be positive");
        if (x.record_stride < 1)
          fail("/experiment/record_stride", "must be >= 1");
        if (x.levels < 2 || x.levels > 6)
          fail("/experiment/levels", "expected 2..6");
      }

    if (doc.contains("output_dir"))
      cfg.output_dir = str(doc["output_dir"], "/output_dir");
    if (doc.contains("seed"))
      {
        if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
          fail("/seed", "expected an unsigned integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
      }

    // profile/configuration compatibility
    const bool two_d = cfg.configuration == Configuration::HD2D;
    auto check_profile = [&](const InitialSpec& s, const std::string& path) {
      if (s.profile == "mode" && !two_d)
        fail(path, "'mode' needs the rectangle configuration");
      if (s.profile == "mode1d" && cfg.configuration != Configuration::HD1D)
        fail(path, "'mode1d' needs the hinged interval");
      if (s.profile == "cantilever" && cfg.configuration != Configuration::FCD1D)
        fail(path, "'cantilever' needs the clamped/free interval");
    };
    check_profile(cfg.initial, "/initial/profile");
    if (cfg.experiment.type == ExperimentType::Diff)
      check_profile(cfg.experiment.initial_b, "/experiment/initial_b/profile");
    if ((cfg.load.profile == "mode" && !two_d) ||
        (cfg.load.profile == "mode1d" && two_d) ||
        (cfg.load.profile == "quadratic1d" && two_d))
      fail("/physics/load/profile", "load profile incompatible with domain");

    return cfg;
  }

  std::string serialize_config(const RunConfig& cfg)
  {
    json doc;
    doc["configuration"] = to_string(cfg.configuration);
    doc["domain"] = {{"kind", cfg.domain.kind == DomainKind::Interval
                                ? "interval"
                                : "rectangle"},
                     {"extents", cfg.domain.kind == DomainKind::Interval
                                   ? json::array({cfg.domain.extents[0]})
                                   : json::array({cfg.domain.extents[0],
                                                  cfg.domain.extents[1]})}};
    doc["resolution"] = cfg.configuration == Configuration::HD2D
                          ? json::array({cfg.resolution[0], cfg.resolution[1]})
                          : json::array({cfg.resolution[0]});
    json load = {{"profile", cfg.load.profile},
                 {"amplitude", cfg.load.amplitude},
                 {"i", cfg.load.mode_i},
                 {"j", cfg.load.mode_j}};
    doc["physics"] = {{"gamma", cfg.gamma},
                      {"mu", cfg.mu},
                      {"mu1", cfg.mu1},
                      {"load", load}};
    doc["damping"] = {{"law", cfg.damping_law},
                      {"params", json(cfg.damping_params)}};
    json stepper = {{"picard_iterations", cfg.picard_iterations},
                    {"picard_tolerance", cfg.picard_tolerance},
                    {"linearized", cfg.linearized}};
    if (cfg.dt)
      stepper["dt"] = *cfg.dt;
    else
      stepper["dt"] = "auto";
    doc["stepper"] = stepper;
    auto initial_json = [](const InitialSpec& s) {
      return json{{"profile", s.profile},
                  {"u_amplitude", s.u_amplitude},
                  {"v_amplitude", s.v_amplitude},
                  {"i", s.mode_i},
                  {"j", s.mode_j}};
    };
    doc["initial"] = initial_json(cfg.initial);
    const auto& x = cfg.experiment;
    json exp = {{"type", to_string(x.type)},
                {"horizon", x.horizon},
                {"record_stride", x.record_stride}};
    switch (x.type)
      {
        case ExperimentType::Audit:
          exp["source"] = x.source;
          if (!x.input_dir.empty())
            exp["input_dir"] = x.input_dir;
          if (x.window)
            exp["window"] = json::array({(*x.window)[0], (*x.window)[1]});
          if (x.flux_anchor_set)
            exp["flux_anchor"] = json::array({x.flux_anchor[0], x.flux_anchor[1]});
          if (x.pibound_states > 0)
            {
              exp["pibound_states"] = x.pibound_states;
              exp["pibound_epsilons"] = x.pibound_epsilons;
            }
          break;
        case ExperimentType::Absorb:
          exp["family_hat_e"] = x.family_hat_e;
          if (x.window_t)
            exp["window_t"] = *x.window_t;
          exp["fit_residual_threshold"] = x.fit_residual_threshold;
          break;
        case ExperimentType::Diff:
          exp["initial_b"] = initial_json(x.initial_b);
          if (x.window)
            exp["window"] = json::array({(*x.window)[0], (*x.window)[1]});
          break;
        case ExperimentType::Converge:
          exp["target"] = x.target;
          exp["levels"] = x.levels;
          break;
        case ExperimentType::Simulate:
          break;
      }
    doc["experiment"] = exp;
    doc["output_dir"] = cfg.output_dir;
    doc["seed"] = cfg.seed;
    return doc.dump(2) + "\n";
  }

  bool RunConfig::operator==(const RunConfig& other) const
  {
    return serialize_config(*this) == serialize_config(other);
  }

  PhysicsParams RunConfig::physics_scalars() const
  {
    PhysicsParams p;
    p.gamma = gamma;
    p.mu = mu;
    p.mu1 = mu1;
    return p;
  }

  Field make_load_field(const LoadSpec& spec, std::shared_ptr<const Mesh> mesh)
  {
    const double lx = mesh->spec.extents[0];
    const double ly = mesh->dim == 2 ? mesh->spec.extents[1] : 1.0;
    const double a = spec.amplitude;
    const double pi = 3.14159265358979323846;
    if (spec.profile == "zero" || a == 0.0)
      return Field();
    if (spec.profile == "constant")
      return Field::sample(mesh, [a](double, double) { return a; });
    if (spec.profile == "mode")
      {
        const double ki = spec.mode_i * pi / lx, kj = spec.mode_j * pi / ly;
        return Field::sample(mesh, [=](double x, double y) {
          return a * std::sin(ki * x) * std::sin(kj * y);
        });
      }
    if (spec.profile == "mode1d")
      {
        const double k = spec.mode_i * pi / lx;
        return Field::sample(mesh,
                             [=](double x, double) { return a * std::sin(k * x); });
      }
    if (spec.profile == "quadratic1d")
      return Field::sample(mesh, [a](double x, double) { return a * x * x; });
    throw std::invalid_argument("unknown load profile " + spec.profile);
  }

  PlateState make_initial_state(const InitialSpec& spec,
                                std::shared_ptr<const Mesh> mesh)
  {
    const double lx = mesh->spec.extents[0];
    const double ly = mesh->dim == 2 ? mesh->spec.extents[1] : 1.0;
    const double pi = 3.14159265358979323846;

    std::function<double(double, double)> shape;
    if (spec.profile == "zero")
      shape = [](double, double) { return 0.0; };
    else if (spec.profile == "mode")
      {
        const double ki = spec.mode_i * pi / lx, kj = spec.mode_j * pi / ly;
        shape = [=](double x, double y) {
          return std::sin(ki * x) * std::sin(kj * y);
        };
      }
    else if (spec.profile == "mode1d")
      {
        const double k = spec.mode_i * pi / lx;
        shape = [=](double x, double) { return std::sin(k * x); };
      }
    else if (spec.profile == "cantilever")
      {
        shape = [=](double x, double) {
          const double xi = x / lx;
          return xi * xi * (6.0 - 4.0 * xi + xi * xi) / 24.0;
        };
      }
    else if (spec.profile == "bump")
      {
        if (mesh->dim == 2)
          shape = [=](double x, double y) {
            const double gx = x * (lx - x) / (lx * lx);
            const double gy = y * (ly - y) / (ly * ly);
            return 256.0 * gx * gx * gy * gy;
          };
        else
          shape = [=](double x, double) {
            const double gx = x * (lx - x) / (lx * lx);
            return 16.0 * gx * gx;
          };
      }
    else
      throw std::invalid_argument("unknown initial profile " + spec.profile);

    PlateState state;
    state.u = Field::sample(mesh, [&](double x, double y) {
      return spec.u_amplitude * shape(x, y);
    });
    state.v = Field::sample(mesh, [&](double x, double y) {
      return spec.v_amplitude * shape(x, y);
    });
    state.t = 0.0;
    return state;
  }

  PhysicsParams make_physics(const RunConfig& cfg,
                             std::shared_ptr<const Mesh> mesh)
  {
    PhysicsParams p = cfg.physics_scalars();
    p.load = make_load_field(cfg.load, mesh);
    p.validate();
    return p;
  }

  DampingLaw make_law(const RunConfig& cfg)
  {
    return make_damping_law(cfg.damping_law, cfg.damping_params);
  }

  double resolve_dt(const RunConfig& cfg, const Mesh& mesh)
  {
    if (cfg.dt)
      return *cfg.dt;
    const double lambda = smallest_eigenvalue(mesh.config, mesh, cfg.mu1);
    const double omega = std::sqrt(lambda);
    const double period = 2.0 * 3.14159265358979323846 / omega;
    return period / 200.0;
  }

}  // namespace berger
