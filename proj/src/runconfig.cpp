#include "polyfk/runconfig.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "polyfk/analysis.hpp"
#include "polyfk/errors.hpp"
#include "polyfk/kernels.hpp"
#include "polyfk/manufactured.hpp"
#include "polyfk/snapshot.hpp"
#include "polyfk/version.hpp"
#include "polyfk/wavebench.hpp"

namespace polyfk {

namespace {

std::string trim(const std::string &s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos)
    return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

} // namespace

ConfigFile ConfigFile::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open config '" + path + "'");
  return parse(in, path);
}

ConfigFile ConfigFile::parse(std::istream &in, const std::string &name) {
  ConfigFile cfg;
  cfg.name_ = name;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.resize(hash);
    line = trim(line);
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError(name + ":" + std::to_string(line_no) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(name + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ParseError(name + ":" + std::to_string(line_no) + ": empty key");
    cfg.values_[section][key] = value;
    cfg.ordered_.emplace_back(section, key, value);
  }
  return cfg;
}

bool ConfigFile::has(const std::string &section, const std::string &key) const {
  const auto s = values_.find(section);
  return s != values_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get(const std::string &section, const std::string &key) const {
  if (!has(section, key))
    throw ParseError(name_ + ": missing key '" + key + "' in section [" + section + "]");
  return values_.at(section).at(key);
}

std::string ConfigFile::get_or(const std::string &section, const std::string &key,
                               const std::string &fallback) const {
  return has(section, key) ? values_.at(section).at(key) : fallback;
}

double ConfigFile::get_double(const std::string &section, const std::string &key,
                              double fallback) const {
  if (!has(section, key))
    return fallback;
  return require_double(section, key);
}

double ConfigFile::require_double(const std::string &section, const std::string &key) const {
  const std::string text = get(section, key);
  std::istringstream iss(text);
  double v = 0.0;
  char trailing = 0;
  if (!(iss >> v) || (iss >> trailing))
    throw ParseError(name_ + ": key '" + key + "' is not a number: '" + text + "'");
  return v;
}

int ConfigFile::get_int(const std::string &section, const std::string &key, int fallback) const {
  if (!has(section, key))
    return fallback;
  const double v = require_double(section, key);
  if (v != std::floor(v))
    throw ParseError(name_ + ": key '" + key + "' must be an integer");
  return static_cast<int>(v);
}

bool ConfigFile::get_bool(const std::string &section, const std::string &key,
                          bool fallback) const {
  if (!has(section, key))
    return fallback;
  const std::string v = get(section, key);
  if (v == "true" || v == "1" || v == "yes" || v == "on")
    return true;
  if (v == "false" || v == "0" || v == "no" || v == "off")
    return false;
  throw ParseError(name_ + ": key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<std::pair<std::string, std::string>> ConfigFile::section_entries(
    const std::string &section) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto &[sec, key, value] : ordered_)
    if (sec == section)
      out.emplace_back(key, value);
  return out;
}

void ConfigFile::echo(std::ostream &out) const {
  std::string last_section = "\n";
  for (const auto &[sec, key, value] : ordered_) {
    if (sec != last_section) {
      out << "[" << sec << "]\n";
      last_section = sec;
    }
    out << key << " = " << value << "\n";
  }
}

// --- builders ---------------------------------------------------------------

namespace {

std::function<FaceKind(const Point2 &)> boundary_classifier(const ConfigFile &cfg,
                                                            const Rect &domain) {
  auto parse_kind = [&](const std::string &text, const std::string &key) {
    if (text == "dirichlet")
      return FaceKind::dirichlet;
    if (text == "neumann")
      return FaceKind::neumann;
    throw ParseError(cfg.name() + ": key '" + key + "' must be dirichlet or neumann, got '" +
                     text + "'");
  };
  const FaceKind all = parse_kind(cfg.get_or("mesh", "boundary", "dirichlet"), "boundary");
  const FaceKind x0 = parse_kind(cfg.get_or("mesh", "boundary_x0",
                                            cfg.get_or("mesh", "boundary", "dirichlet")),
                                 "boundary_x0");
  const FaceKind x1 = parse_kind(cfg.get_or("mesh", "boundary_x1",
                                            cfg.get_or("mesh", "boundary", "dirichlet")),
                                 "boundary_x1");
  const FaceKind y0 = parse_kind(cfg.get_or("mesh", "boundary_y0",
                                            cfg.get_or("mesh", "boundary", "dirichlet")),
                                 "boundary_y0");
  const FaceKind y1 = parse_kind(cfg.get_or("mesh", "boundary_y1",
                                            cfg.get_or("mesh", "boundary", "dirichlet")),
                                 "boundary_y1");
  return [=](const Point2 &mid) {
    const double tol = 1e-9 * std::max(domain.width(), domain.height());
    if (std::abs(mid.x - domain.x0) < tol)
      return x0;
    if (std::abs(mid.x - domain.x1) < tol)
      return x1;
    if (std::abs(mid.y - domain.y0) < tol)
      return y0;
    if (std::abs(mid.y - domain.y1) < tol)
      return y1;
    return all;
  };
}

Rect parse_domain(const ConfigFile &cfg) {
  const std::string text = cfg.get_or("mesh", "domain", "0 0 1 1");
  std::istringstream iss(text);
  Rect r;
  if (!(iss >> r.x0 >> r.y0 >> r.x1 >> r.y1))
    throw ParseError(cfg.name() + ": key 'domain' must be 'x0 y0 x1 y1'");
  if (r.area() <= 0.0)
    throw ParseError(cfg.name() + ": key 'domain' describes a degenerate rectangle");
  return r;
}

} // namespace

PolyMesh build_mesh_from_config(const ConfigFile &cfg) {
  const std::string source = cfg.get_or("mesh", "source", "voronoi");
  PolyMesh mesh;
  if (source == "file") {
    mesh = load_mesh(cfg.get("mesh", "file"));
  } else {
    const Rect domain = parse_domain(cfg);
    const auto classify = boundary_classifier(cfg, domain);
    if (source == "voronoi") {
      const int n = cfg.get_int("mesh", "n_elements", 0);
      if (n < 1)
        throw ParseError(cfg.name() + ": key 'n_elements' must be >= 1");
      mesh = generate_voronoi_mesh(domain, n, cfg.get_int("mesh", "lloyd_iterations", 100),
                                   static_cast<std::uint64_t>(cfg.get_int("mesh", "seed", 42)),
                                   classify);
    } else if (source == "cartesian") {
      mesh = generate_cartesian_mesh(domain, cfg.get_int("mesh", "nx", 1),
                                     cfg.get_int("mesh", "ny", 1), classify);
    } else {
      throw ParseError(cfg.name() + ": key 'source' must be voronoi, cartesian or file");
    }
  }
  const int coarse = cfg.get_int("mesh", "agglomerate_to", 0);
  if (coarse > 0)
    mesh = agglomerate(mesh, coarse,
                       static_cast<std::uint64_t>(cfg.get_int("mesh", "agglomerate_seed", 1)));
  return mesh;
}

namespace {

FieldSpec field_from_config(const ConfigFile &cfg, const std::string &key, double fallback) {
  if (cfg.has("model", key + "_table"))
    return FieldSpec::per_element(load_scalar_table(cfg.get("model", key + "_table")));
  if (!cfg.has("model", key))
    return FieldSpec::constant(fallback);
  try {
    return FieldSpec::parse(cfg.get("model", key));
  } catch (const ParseError &err) {
    throw ParseError(cfg.name() + ": key '" + key + "': " + err.what());
  }
}

ScalarField scalar_from_config(const ConfigFile &cfg, const std::string &key, double fallback) {
  if (!cfg.has("model", key))
    return constant_field(fallback);
  try {
    return FieldSpec::parse(cfg.get("model", key)).bind();
  } catch (const ParseError &err) {
    throw ParseError(cfg.name() + ": key '" + key + "': " + err.what());
  }
}

FiberField fiber_from_config(const ConfigFile &cfg) {
  if (!cfg.has("model", "fiber"))
    return FiberField::none();
  std::istringstream iss(cfg.get("model", "fiber"));
  std::string kind;
  iss >> kind;
  if (kind == "none")
    return FiberField::none();
  if (kind == "constant") {
    double angle = 0.0;
    if (!(iss >> angle))
      throw ParseError(cfg.name() + ": key 'fiber': constant needs an angle");
    return FiberField::constant(angle);
  }
  if (kind == "radial" || kind == "circular") {
    Point2 c;
    if (!(iss >> c.x >> c.y))
      throw ParseError(cfg.name() + ": key 'fiber': " + kind + " needs a center 'cx cy'");
    return kind == "radial" ? FiberField::radial(c) : FiberField::circular(c);
  }
  if (kind == "table") {
    std::string path;
    if (!(iss >> path))
      throw ParseError(cfg.name() + ": key 'fiber': table needs a file path");
    return FiberField::per_element(load_vector_table(path));
  }
  throw ParseError(cfg.name() + ": key 'fiber': unknown kind '" + kind + "'");
}

} // namespace

ModelParams build_model_from_config(const ConfigFile &cfg, const PolyMesh &mesh) {
  ModelParams params;
  params.d_ext = field_from_config(cfg, "d_ext", 1.0);
  params.d_axn = field_from_config(cfg, "d_axn", 0.0);
  params.alpha = field_from_config(cfg, "alpha", 0.0);
  params.fiber = fiber_from_config(cfg);
  params.forcing = scalar_from_config(cfg, "f", 0.0);
  params.dirichlet = scalar_from_config(cfg, "dirichlet", 0.0);
  params.neumann = scalar_from_config(cfg, "neumann", 0.0);
  params.initial = scalar_from_config(cfg, "initial", 0.0);
  params.validate(mesh);
  return params;
}

StepperConfig build_stepper_from_config(const ConfigFile &cfg) {
  StepperConfig config;
  config.dt = cfg.get_double("stepper", "dt", 0.0);
  if (!(config.dt > 0.0))
    throw ParseError(cfg.name() + ": key 'dt' must be positive");
  config.t_final = cfg.get_double("stepper", "t_final", 0.0);
  if (!(config.t_final >= config.dt))
    throw ParseError(cfg.name() + ": key 't_final' must be at least dt");
  const std::string scheme = cfg.get_or("stepper", "scheme", "semi_implicit");
  if (scheme == "semi_implicit")
    config.scheme = Scheme::semi_implicit;
  else if (scheme == "implicit")
    config.scheme = Scheme::implicit;
  else
    throw ParseError(cfg.name() + ": key 'scheme' must be semi_implicit or implicit");
  config.picard_tol = cfg.get_double("stepper", "picard_tol", 1e-10);
  if (!(config.picard_tol > 0.0))
    throw ParseError(cfg.name() + ": key 'picard_tol' must be positive");
  config.picard_max_iter = cfg.get_int("stepper", "picard_max_iter", 20);
  const std::string solver = cfg.get_or("stepper", "linear_solver", "direct");
  if (solver == "direct")
    config.linear.kind = LinearSolverKind::direct;
  else if (solver == "iterative")
    config.linear.kind = LinearSolverKind::iterative;
  else
    throw ParseError(cfg.name() + ": key 'linear_solver' must be direct or iterative");
  config.linear.tol = cfg.get_double("stepper", "linear_tol", 1e-12);
  config.store_stride = cfg.get_int("run", "store_stride", 1);
  if (config.store_stride < 1)
    throw ParseError(cfg.name() + ": key 'store_stride' must be >= 1");
  return config;
}

// --- run modes --------------------------------------------------------------

namespace {

namespace fs = std::filesystem;

struct RunContext {
  const ConfigFile &cfg;
  fs::path out_dir;
  std::ofstream report;
};

RunContext open_run(const ConfigFile &cfg) {
  RunContext rc{cfg, fs::path(cfg.get_or("run", "output_dir", "out")), {}};
  std::error_code ec;
  fs::create_directories(rc.out_dir, ec);
  if (ec)
    throw ParseError("cannot create output_dir '" + rc.out_dir.string() + "': " + ec.message());
  rc.report.open(rc.out_dir / "report.txt");
  if (!rc.report)
    throw ParseError("cannot write report in '" + rc.out_dir.string() + "'");
  rc.report << "polyfk " << version_string() << "\n";
  rc.report << "kernels = " << kernels::impl_name(kernels::active()) << "\n";
  rc.report << "--- config echo (" << cfg.name() << ") ---\n";
  cfg.echo(rc.report);
  rc.report << "--- end config ---\n";
  return rc;
}

std::ofstream open_csv(const RunContext &rc, const std::string &name) {
  std::ofstream out(rc.out_dir / name);
  if (!out)
    throw ParseError("cannot write '" + (rc.out_dir / name).string() + "'");
  return out;
}

void write_step_records(const Trajectory &traj, std::ostream &out) {
  out << "steps = " << traj.records.size() << "\n";
  for (const auto &rec : traj.records) {
    out << "step t=" << rec.t << " solves=" << rec.linear_solves;
    if (rec.picard_iterations > 0)
      out << " picard=" << rec.picard_iterations << " update=" << rec.picard_update
          << (rec.picard_converged ? "" : " NONCONVERGED");
    out << "\n";
  }
  if (traj.picard_nonconverged_steps > 0)
    out << "picard_nonconverged_steps = " << traj.picard_nonconverged_steps << "\n";
  if (traj.aborted)
    out << "aborted: " << traj.abort_reason << "\n";
}

int run_convergence_mode(RunContext &rc) {
  const ConfigFile &cfg = rc.cfg;
  const std::string case_name = cfg.get_or("convergence", "case", "testcase1");
  ManufacturedCase mcase;
  if (case_name == "testcase1")
    mcase = testcase1();
  else if (case_name == "testcase1_linear")
    mcase = testcase1_with_alpha(0.0);
  else
    throw ParseError(cfg.name() + ": key 'case' must be testcase1 or testcase1_linear");

  std::vector<int> mesh_sizes;
  {
    std::istringstream iss(cfg.get_or("convergence", "meshes", "30 100 300 1000"));
    int n = 0;
    while (iss >> n)
      mesh_sizes.push_back(n);
  }
  std::vector<int> p_list;
  {
    std::istringstream iss(cfg.get_or("convergence", "p_list", "1 2 3"));
    int p = 0;
    while (iss >> p)
      p_list.push_back(p);
  }
  if (mesh_sizes.empty() || p_list.empty())
    throw ParseError(cfg.name() + ": keys 'meshes' and 'p_list' must be non-empty");

  const Rect domain = parse_domain(cfg);
  const auto classify = boundary_classifier(cfg, domain);
  const int lloyd = cfg.get_int("mesh", "lloyd_iterations", 100);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("mesh", "seed", 42));

  std::vector<PolyMesh> meshes;
  std::vector<const PolyMesh *> mesh_ptrs;
  for (int n : mesh_sizes) {
    meshes.push_back(generate_voronoi_mesh(domain, n, lloyd, seed, classify));
    rc.report << "mesh n=" << n << " h=" << meshes.back().mesh_size << "\n";
  }
  for (const auto &m : meshes)
    mesh_ptrs.push_back(&m);

  const StepperConfig stepcfg = build_stepper_from_config(cfg);
  const PenaltySpec spec{cfg.get_double("penalty", "eta0", 10.0)};

  const ConvergenceStudy study =
      run_convergence(mcase, mesh_ptrs, p_list, stepcfg.dt, stepcfg.t_final, stepcfg.scheme, spec);

  for (const auto &sweep : study.h_sweeps) {
    auto csv = open_csv(rc, "rates_p" + std::to_string(sweep.p) + ".csv");
    write_rate_csv(sweep.by_mesh, csv);
    rc.report << "p=" << sweep.p << " errors:";
    for (const auto &row : sweep.by_mesh.rows)
      rc.report << " " << row.error;
    rc.report << "\n";
  }
  {
    auto csv = open_csv(rc, "p_sweep.csv");
    write_rate_csv(study.p_sweep, csv);
  }
  return 0;
}

int run_wave_mode(RunContext &rc) {
  const ConfigFile &cfg = rc.cfg;
  WaveBenchmarkConfig wc;
  wc.n_elements = cfg.get_int("wave", "n_elements", cfg.get_int("mesh", "n_elements", 300));
  wc.lloyd_iterations = cfg.get_int("mesh", "lloyd_iterations", 100);
  wc.mesh_seed = static_cast<std::uint64_t>(cfg.get_int("mesh", "seed", 42));
  wc.degree = cfg.get_int("space", "p", 3);
  const StepperConfig stepcfg = build_stepper_from_config(cfg);
  wc.dt = stepcfg.dt;
  wc.t_final = stepcfg.t_final;
  wc.scheme = stepcfg.scheme;
  wc.eta0 = cfg.get_double("penalty", "eta0", 10.0);
  wc.d_ext = cfg.get_double("wave", "d_ext", 1e-3);
  wc.alpha = cfg.get_double("wave", "alpha", 1.0);
  wc.speed = cfg.get_double("wave", "speed", 0.1);
  wc.psi0 = cfg.get_double("wave", "psi0", 1.0);
  wc.chi0 = cfg.get_double("wave", "chi0", -1e-2);
  wc.xi_max = cfg.get_double("wave", "xi_max", 50.0);
  wc.store_stride = stepcfg.store_stride;

  const WaveBenchmarkResult result = run_wave_benchmark(wc);

  {
    auto csv = open_csv(rc, "front.csv");
    csv << "t,front_x\n";
    csv.precision(12);
    for (std::size_t i = 0; i < result.front_times.size(); ++i)
      csv << result.front_times[i] << "," << result.front_positions[i] << "\n";
  }
  {
    auto csv = open_csv(rc, "summary.csv");
    csv << "T,p,n_el,dt,scheme,l2_error\n";
    csv.precision(12);
    csv << wc.t_final << "," << wc.degree << "," << wc.n_elements << "," << wc.dt << ","
        << (wc.scheme == Scheme::semi_implicit ? "semi_implicit" : "implicit") << ","
        << result.l2_error_at_T << "\n";
  }
  const double fit_begin = cfg.get_double("wave", "t_fit_begin", 2.0);
  const double fit_end = cfg.get_double("wave", "t_fit_end", wc.t_final);
  try {
    rc.report << "front_speed = " << fit_front_speed(result, fit_begin, fit_end) << "\n";
  } catch (const ContractViolation &) {
    rc.report << "front_speed = nan (front left the tracked band)\n";
  }
  rc.report << "l2_error_at_T = " << result.l2_error_at_T << "\n";
  write_step_records(result.trajectory, rc.report);
  return 0;
}

int run_simulate_mode(RunContext &rc) {
  const ConfigFile &cfg = rc.cfg;
  const PolyMesh mesh = build_mesh_from_config(cfg);
  const ModelParams params = build_model_from_config(cfg, mesh);
  const int degree = cfg.get_int("space", "p", 2);
  const PenaltySpec spec{cfg.get_double("penalty", "eta0", 10.0)};
  StepperConfig stepcfg = build_stepper_from_config(cfg);

  DgSpace space(mesh, degree);
  const SubTriangulation sub = sub_triangulate(mesh);
  AssemblyContext ctx(space, sub);

  const RegularityReport reg = check_regularity(mesh);
  rc.report << "mesh elements=" << mesh.n_elements() << " h=" << mesh.mesh_size
            << " shape=[" << reg.shape_min << ", " << reg.shape_max << "]"
            << " contact=[" << reg.contact_min << ", " << reg.contact_max << "]\n";

  Probes probes;
  probes.track_element_means = true;

  const int snapshot_stride = cfg.get_int("run", "snapshot_stride", 0);
  if (snapshot_stride > 0) {
    probes.on_store = [&, snapshot_stride](int step, double t, const StateVector &C) {
      if (step % snapshot_stride != 0)
        return;
      std::ostringstream name;
      name << "c_" << std::setw(6) << std::setfill('0') << step << ".vtk";
      write_snapshot(space, sub, C, t, (rc.out_dir / name.str()).string());
    };
  }

  const StateVector C0 = project_l2(ctx, params.initial, 0.0);
  const Trajectory traj = integrate(C0, ctx, params, spec, stepcfg, probes);

  // Activation map.
  const double c_crit = cfg.get_double("probes", "activation_threshold", 0.95);
  {
    const ActivationField field = activation_time(traj, c_crit);
    auto csv = open_csv(rc, "activation.csv");
    write_activation_csv(field, csv);
  }

  // Region series: `region<tag> = ids i j k ...` or `region<tag> = box x0 y0 x1 y1`.
  for (const auto &[key, value] : cfg.section_entries("probes")) {
    if (key.rfind("region", 0) != 0)
      continue;
    std::istringstream iss(value);
    std::string kind;
    iss >> kind;
    std::vector<int> region;
    if (kind == "ids") {
      int id = 0;
      while (iss >> id) {
        if (id < 0 || id >= mesh.n_elements())
          throw ParseError(cfg.name() + ": key '" + key + "': element id " + std::to_string(id) +
                           " out of range");
        region.push_back(id);
      }
    } else if (kind == "box") {
      Rect box;
      if (!(iss >> box.x0 >> box.y0 >> box.x1 >> box.y1))
        throw ParseError(cfg.name() + ": key '" + key + "': box needs 'x0 y0 x1 y1'");
      for (int k = 0; k < mesh.n_elements(); ++k)
        if (box.contains(mesh.element_centroid(k)))
          region.push_back(k);
    } else {
      throw ParseError(cfg.name() + ": key '" + key + "': expected 'ids ...' or 'box ...'");
    }
    if (region.empty())
      throw ParseError(cfg.name() + ": key '" + key + "' selects no elements");
    const std::vector<double> series = region_mean(traj, mesh, region);
    auto csv = open_csv(rc, key + ".csv");
    write_series_csv(traj.times, series, "mean", csv);
  }

  rc.report << "final_time = " << traj.final_time() << "\n";
  write_step_records(traj, rc.report);
  if (traj.aborted)
    throw SolverError(traj.abort_reason);
  return 0;
}

} // namespace

int run_config(const std::string &config_path) {
  const ConfigFile cfg = ConfigFile::load(config_path);
  const std::string mode = cfg.get("run", "mode");
  RunContext rc = open_run(cfg);
  if (mode == "convergence")
    return run_convergence_mode(rc);
  if (mode == "wave")
    return run_wave_mode(rc);
  if (mode == "simulate")
    return run_simulate_mode(rc);
  throw ParseError(cfg.name() + ": key 'mode' must be convergence, wave or simulate");
}

} // namespace polyfk
