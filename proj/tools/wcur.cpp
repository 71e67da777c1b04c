// wcur: command-line front end for the wcur core library.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "wcur/catalog.hpp"
#include "wcur/currents.hpp"
#include "wcur/format.hpp"
#include "wcur/io.hpp"
#include "wcur/problems.hpp"
#include "wcur/residue.hpp"

namespace fs = std::filesystem;
using namespace wcur;

namespace {

const std::vector<std::string> kCommands = {"energy",      "geometry", "laws", "potentials", "willmore", "constrained",
                                            "helfrich",    "chen",     "flow", "residue",    "surfaces"};

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

const char* kUsage =
    "usage: wcur <energy|geometry|laws|potentials|willmore|constrained|helfrich|chen|flow|residue|surfaces>\n"
    "            [--surface NAME[:p1,p2]] [--sampled FILE] [--grid N] [--q FILE]\n"
    "            [--alpha X --beta X --gamma X] [--tau X --steps N] [--radii a,b,c]\n"
    "            [--out DIR] [--format csv|summary]\n";

struct RunConfig {
  std::string command;
  std::string surface = "sphere_stereo";
  std::string sampled;
  int grid = 65;
  std::string q_file;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double tau = 1e-4;
  int steps = 50;
  std::string radii = "0.3,0.5,0.7";
  std::string out_dir;
  std::string format = "summary";
};

// Named CSV tables; the first one is what `--format csv` prints.
struct Outputs {
  Summary summary;
  std::vector<std::pair<std::string, std::string>> tables;

  void table(const std::string& name, const Field& f) {
    std::ostringstream s;
    write_field_dump(s, f);
    tables.emplace_back(name, s.str());
  }
};

void put_norm(Summary& s, const std::string& key, const ResidualNorm& n) {
  s.set(key + "_sup", n.sup);
  s.set(key + "_l2", n.l2);
}

void put_system(Summary& s, const ProblemReport& r) {
  put_norm(s, "system_s", r.system.s);
  put_norm(s, "system_r", r.system.r);
  put_norm(s, "system_phi", r.system.phi);
  put_norm(s, "gradient_s", r.gradients.s);
  put_norm(s, "gradient_r", r.gradients.r);
  put_norm(s, "gradient_l", r.gradients.l);
  s.set("compatible", r.potentials.compatible);
  s.set("solver_residual", r.potentials.solver_residual);
}

ImmersionPatch load_surface(const RunConfig& cfg) {
  if (!cfg.sampled.empty()) return load_sampled_patch_file(cfg.sampled);
  return build_catalog_patch(cfg.surface, GridSpec(cfg.grid));
}

void run_energy(const GeometryCache& c, Outputs& o) {
  o.summary.set("energy", willmore_energy(c));
  o.table("energy_density", squared_norm(c.mean_curvature));
}

void run_geometry(const GeometryCache& c, Outputs& o) {
  double det_min = INFINITY, det_max = 0.0;
  c.det.for_each_valid([&](int i, int j) {
    det_min = std::min(det_min, c.det(i, j, 0));
    det_max = std::max(det_max, c.det(i, j, 0));
  });
  Field one(c.grid(), 1);
  one.for_each_valid([&](int i, int j) { one(i, j, 0) = 1.0; });
  o.summary.set("area", surface_integral(c, one));
  o.summary.set("det_g_min", det_min);
  o.summary.set("det_g_max", det_max);
  o.summary.set("mean_curvature_sup", residual_norm(c.mean_curvature).sup);
  o.summary.set("energy", willmore_energy(c));
  o.table("mean_curvature", c.mean_curvature);
  o.table("metric", c.metric);
  o.table("sff", c.sff);
  o.table("normal_plane", c.normal_plane);
}

void run_laws(const GeometryCache& c, Outputs& o) {
  const CurrentSet cur = compute_currents(c);
  put_norm(o.summary, "res_translation", cur.trans);
  put_norm(o.summary, "res_rotation", cur.rot);
  put_norm(o.summary, "res_dilation", cur.dil);
  o.summary.set("W_sup", residual_norm(cur.W).sup);
  o.table("res_translation", cur.res_trans);
  o.table("res_rotation", cur.res_rot);
  o.table("res_dilation", cur.res_dil);
  o.table("W", cur.W);
}

void run_potentials(const GeometryCache& c, Outputs& o) {
  ProblemReport r;
  r.W = willmore_operator(c);
  r.potentials = build_potential_set(c, r.W);
  r.system = system_residuals(c, r.potentials);
  r.gradients = gradient_identity_residuals(c, r.potentials);
  put_system(o.summary, r);
  o.summary.set("defect_L", r.potentials.defect_L);
  o.summary.set("defect_R", r.potentials.defect_R);
  o.summary.set("defect_S", r.potentials.defect_S);
  o.summary.set("gauge_i", r.potentials.gauge_i);
  o.summary.set("gauge_j", r.potentials.gauge_j);
  o.table("S", r.potentials.S);
  o.table("R", r.potentials.R);
  o.table("L", r.potentials.L);
  o.table("Y", r.potentials.Y);
}

void run_willmore(const GeometryCache& c, Outputs& o) {
  const ProblemReport r = willmore_problem(c);
  put_norm(o.summary, "W", residual_norm(r.W));
  put_system(o.summary, r);
  o.table("W", r.W);
  o.table("S", r.potentials.S);
  o.table("R", r.potentials.R);
}

void run_constrained(const GeometryCache& c, const RunConfig& cfg, Outputs& o) {
  const Field q = cfg.q_file.empty() ? Field(c.grid(), 4) : load_q_file(cfg.q_file, c.grid());
  const ConstrainedReport r = constrained_problem(c, q);
  put_norm(o.summary, "W", residual_norm(r.W));
  put_system(o.summary, r);
  o.summary.set("q_symmetry_defect", r.q.symmetry_defect);
  o.summary.set("q_trace_defect", r.q.trace_defect);
  o.summary.set("q_transversality_defect", r.q.transversality_defect);
  o.summary.set("q_transverse", r.q.transverse);
  o.summary.set("identity_dot", r.identity_dot);
  o.summary.set("identity_wedge", r.identity_wedge);
  o.summary.set("warnings", static_cast<long>(r.warnings.size()));
  for (const std::string& w : r.warnings) std::cerr << "warning: " << w << '\n';
  o.table("W", r.W);
  o.table("h0q", r.h0q);
}

void run_helfrich(const GeometryCache& c, const RunConfig& cfg, Outputs& o) {
  const HelfrichParams p{cfg.alpha, cfg.beta, cfg.gamma};
  const HelfrichReport r = helfrich_problem(c, p);
  put_norm(o.summary, "el_residual", r.el);
  put_system(o.summary, r);
  o.summary.set("xprop_cross", r.xprop_cross);
  o.summary.set("xprop_normal", r.xprop_normal);
  o.summary.set("alpha", p.alpha);
  o.summary.set("beta", p.beta);
  o.summary.set("gamma", p.gamma);
  if (c.patch->closure.kind != Closure::Kind::open) {
    const ClosedSurfaceIntegrals I = closed_surface_integrals(c, p);
    o.summary.set("area", I.A);
    o.summary.set("total_curvature", I.M);
    o.summary.set("volume", I.Vol);
    o.summary.set("balancing_residual", I.balancing_residual);
    o.summary.set("balancing_scale", I.scale);
    o.summary.set("tail_area", I.tail_area);
  } else {
    o.summary.set("balancing_residual", "n/a (open chart)");
  }
  o.table("el", r.W);
  o.table("rhs", r.rhs);
}

void run_chen(const GeometryCache& c, Outputs& o) {
  const ChenReport r = chen_problem(c);
  put_norm(o.summary, "biharmonic", r.biharmonic);
  put_norm(o.summary, "identity", r.identity_norm);
  put_norm(o.summary, "W", residual_norm(r.W));
  put_system(o.summary, r);
  o.table("lap_H", r.lap_H);
  o.table("identity", r.identity);
  o.table("W", r.W);
}

void run_flow(const ImmersionPatch& patch, const RunConfig& cfg, Outputs& o) {
  FlowOptions opt;
  opt.tau = cfg.tau;
  opt.steps = cfg.steps;
  const FlowResult f = willmore_flow(patch, opt);
  o.summary.set("tau", cfg.tau);
  o.summary.set("steps", cfg.steps);
  o.summary.set("energy_initial", f.trace.front().energy);
  o.summary.set("energy_final", f.trace.back().energy);
  o.summary.set("drift", f.drift);
  o.summary.set("strictly_decreasing", f.strictly_decreasing);
  o.summary.set("stable_tau", f.stable_tau);
  std::ostringstream s;
  write_flow_trace(s, f);
  o.tables.emplace_back("flow", s.str());
  o.table("final_positions", f.final_patch.phi);
}

void run_residue(const GeometryCache& c, const RunConfig& cfg, Outputs& o) {
  const ResidueReport r = compute_residue(c, parse_number_list(cfg.radii));
  for (int q = 0; q < r.beta_res.size(); ++q) o.summary.set("beta_res_" + std::to_string(q + 1), r.beta_res[q]);
  o.summary.set("beta_res_norm", r.beta_res.norm());
  o.summary.set("spread", r.spread);
  o.summary.set("flagged", r.flagged);
  o.summary.set("solver_residual", r.solver_residual);
  o.summary.set("green_defect", r.green_defect);
  for (size_t k = 0; k < r.green_flux_by_radius.size(); ++k) {
    o.summary.set("green_flux_" + std::to_string(k + 1), r.green_flux_by_radius[k]);
  }
  std::ostringstream s;
  write_residue_csv(s, r);
  o.tables.emplace_back("residue", s.str());
}

void list_surfaces(std::ostream& out) {
  for (const CatalogEntry& e : catalog_entries()) {
    out << e.name;
    if (!e.params.empty()) out << " [" << e.params << "]";
    if (!e.defaults.empty()) out << " defaults " << e.defaults;
    out << "  " << e.description << '\n';
  }
}

// Validates paths before any compute: the output directory is created and a
// probe file opened in it.
void validate_paths(const RunConfig& cfg) {
  if (!cfg.q_file.empty() && !std::ifstream(cfg.q_file)) throw ValidationError("cannot read q file '" + cfg.q_file + "'");
  if (!cfg.sampled.empty() && !std::ifstream(cfg.sampled)) {
    throw ValidationError("cannot read sampled surface '" + cfg.sampled + "'");
  }
  if (cfg.out_dir.empty()) return;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec || !fs::is_directory(cfg.out_dir)) throw ValidationError("cannot create output directory '" + cfg.out_dir + "'");
  const fs::path probe = fs::path(cfg.out_dir) / "summary.txt";
  if (!std::ofstream(probe, std::ios::app)) throw ValidationError("cannot write '" + probe.string() + "'");
}

int run(const RunConfig& cfg) {
  if (cfg.command == "surfaces") {
    list_surfaces(std::cout);
    return kExitOk;
  }
  if (cfg.grid < 17 || cfg.grid > 513) throw ValidationError("grid N must lie in [17, 513]");
  if (cfg.format != "csv" && cfg.format != "summary") throw ValidationError("format must be csv or summary");
  validate_paths(cfg);

  const ImmersionPatch patch = load_surface(cfg);
  Outputs o;
  o.summary.set("command", cfg.command);
  o.summary.set("surface", cfg.sampled.empty() ? cfg.surface : patch.name);
  o.summary.set("grid", std::to_string(patch.grid.u.n) + "x" + std::to_string(patch.grid.v.n));

  if (cfg.command == "flow") {
    run_flow(patch, cfg, o);
  } else {
    const GeometryCache c = compute_geometry(patch);
    if (cfg.command == "energy") run_energy(c, o);
    else if (cfg.command == "geometry") run_geometry(c, o);
    else if (cfg.command == "laws") run_laws(c, o);
    else if (cfg.command == "potentials") run_potentials(c, o);
    else if (cfg.command == "willmore") run_willmore(c, o);
    else if (cfg.command == "constrained") run_constrained(c, cfg, o);
    else if (cfg.command == "helfrich") run_helfrich(c, cfg, o);
    else if (cfg.command == "chen") run_chen(c, o);
    else if (cfg.command == "residue") run_residue(c, cfg, o);
  }

  if (!cfg.out_dir.empty()) {
    write_text_file((fs::path(cfg.out_dir) / "summary.txt").string(), o.summary.str());
    for (const auto& [name, text] : o.tables) {
      write_text_file((fs::path(cfg.out_dir) / (cfg.command + "_" + name + ".csv")).string(), text);
    }
  }
  if (cfg.format == "csv" && !o.tables.empty()) {
    std::cout << o.tables.front().second;
  } else {
    o.summary.write(std::cout);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"wcur: Willmore currents, potentials and residues on gridded surface patches"};
  app.add_option("command", cfg.command, "command")->required();
  app.add_option("--surface", cfg.surface, "catalog surface NAME[:p1,p2,...]");
  app.add_option("--sampled", cfg.sampled, "sampled surface file (overrides --surface and --grid)");
  app.add_option("--grid", cfg.grid, "nodes per axis, 17..513");
  app.add_option("--q", cfg.q_file, "q tensor file for `constrained`");
  app.add_option("--alpha", cfg.alpha);
  app.add_option("--beta", cfg.beta);
  app.add_option("--gamma", cfg.gamma);
  app.add_option("--tau", cfg.tau, "flow step");
  app.add_option("--steps", cfg.steps, "flow steps");
  app.add_option("--radii", cfg.radii, "residue radii a,b,c");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--format", cfg.format, "csv|summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << kUsage;
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n' << kUsage;
    return kExitValidation;
  }
  if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end()) {
    std::cerr << "error: unknown command '" << cfg.command << "'\n" << kUsage;
    return kExitValidation;
  }

  try {
    return run(cfg);
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << " (achieved residual " << format_number(e.achieved, 3) << ")\n";
    return kExitSolver;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n' << kUsage;
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}
