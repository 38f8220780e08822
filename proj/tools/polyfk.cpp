#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "polyfk/analysis.hpp"
#include "polyfk/errors.hpp"
#include "polyfk/runconfig.hpp"
#include "polyfk/version.hpp"

namespace {

int exit_code_for(const std::exception &err) {
  if (dynamic_cast<const polyfk::ParseError *>(&err))
    return 2;
  if (dynamic_cast<const polyfk::TopologyError *>(&err))
    return 3;
  if (dynamic_cast<const polyfk::SolverError *>(&err))
    return 4;
  return 1;
}

std::function<polyfk::FaceKind(const polyfk::Point2 &)> tag_for(const std::string &name) {
  if (name == "dirichlet")
    return polyfk::tag_all_dirichlet;
  if (name == "neumann")
    return polyfk::tag_all_neumann;
  throw polyfk::ParseError("boundary tag must be dirichlet or neumann, got '" + name + "'");
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"polyfk: polygonal DG solver for the Fisher-Kolmogorov equation"};
  app.set_version_flag("--version", polyfk::version_string());
  app.require_subcommand(1);

  std::string config_path;
  auto *run = app.add_subcommand("run", "execute a run configuration");
  run->add_option("config", config_path, "configuration file")->required();

  auto *mesh_cmd = app.add_subcommand("mesh", "mesh utilities");
  mesh_cmd->require_subcommand(1);

  std::string gen_out, gen_boundary = "dirichlet";
  std::vector<double> gen_domain = {0, 0, 1, 1};
  int gen_voronoi = 0, gen_lloyd = 100, gen_nx = 0, gen_ny = 0;
  std::uint64_t gen_seed = 42;
  auto *gen = mesh_cmd->add_subcommand("gen", "generate a mesh file");
  gen->add_option("--out", gen_out, "output mesh file")->required();
  gen->add_option("--domain", gen_domain, "x0 y0 x1 y1")->expected(4);
  gen->add_option("--voronoi", gen_voronoi, "number of Voronoi cells");
  gen->add_option("--lloyd", gen_lloyd, "Lloyd iterations");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--cartesian", [&gen_nx, &gen_ny](const std::vector<std::string> &vals) {
    gen_nx = std::stoi(vals.at(0));
    gen_ny = std::stoi(vals.at(1));
    return true;
  }, "nx ny")->expected(2);
  gen->add_option("--boundary", gen_boundary, "dirichlet | neumann");

  std::string agg_in, agg_out;
  int agg_n = 0;
  std::uint64_t agg_seed = 1;
  auto *agg = mesh_cmd->add_subcommand("agglomerate", "agglomerate a mesh file");
  agg->add_option("input", agg_in)->required();
  agg->add_option("n_coarse", agg_n)->required();
  agg->add_option("output", agg_out)->required();
  agg->add_option("--seed", agg_seed, "partition seed");

  std::string check_in;
  auto *check = mesh_cmd->add_subcommand("check", "validate a mesh file and report regularity");
  check->add_option("input", check_in)->required();

  auto *oracle = app.add_subcommand("oracle", "cross-checking helpers");
  std::string dump_config, dump_dir = ".";
  auto *dump = oracle->add_subcommand("dump-matrices",
                                      "assemble and dump operators in coordinate format");
  dump->add_option("config", dump_config)->required();
  dump->add_option("--out", dump_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run)
      return polyfk::run_config(config_path);

    if (*gen) {
      const polyfk::Rect domain{gen_domain[0], gen_domain[1], gen_domain[2], gen_domain[3]};
      polyfk::PolyMesh mesh;
      if (gen_voronoi > 0)
        mesh = polyfk::generate_voronoi_mesh(domain, gen_voronoi, gen_lloyd, gen_seed,
                                             tag_for(gen_boundary));
      else if (gen_nx > 0 && gen_ny > 0)
        mesh = polyfk::generate_cartesian_mesh(domain, gen_nx, gen_ny, tag_for(gen_boundary));
      else
        throw polyfk::ParseError("mesh gen needs --voronoi N or --cartesian NX NY");
      polyfk::save_mesh(mesh, gen_out);
      std::cout << "wrote " << gen_out << " (" << mesh.n_elements() << " elements, h = "
                << mesh.mesh_size << ")\n";
      return 0;
    }

    if (*agg) {
      const polyfk::PolyMesh fine = polyfk::load_mesh(agg_in);
      const polyfk::PolyMesh coarse = polyfk::agglomerate(fine, agg_n, agg_seed);
      polyfk::save_mesh(coarse, agg_out);
      std::cout << "wrote " << agg_out << " (" << coarse.n_elements() << " elements)\n";
      return 0;
    }

    if (*check) {
      const polyfk::PolyMesh mesh = polyfk::load_mesh(check_in);
      const polyfk::RegularityReport rep = polyfk::check_regularity(mesh);
      std::cout << "elements = " << mesh.n_elements() << "\n"
                << "faces = " << mesh.n_faces() << "\n"
                << "h = " << mesh.mesh_size << "\n"
                << "total area = " << mesh.total_area() << "\n"
                << "shape |K|/h_K^2 in [" << rep.shape_min << ", " << rep.shape_max << "]\n"
                << "contact |F|/h_K in [" << rep.contact_min << ", " << rep.contact_max << "]\n";
      return 0;
    }

    if (*dump) {
      const polyfk::ConfigFile cfg = polyfk::ConfigFile::load(dump_config);
      const polyfk::PolyMesh mesh = polyfk::build_mesh_from_config(cfg);
      const polyfk::ModelParams params = polyfk::build_model_from_config(cfg, mesh);
      const polyfk::DgSpace space(mesh, cfg.get_int("space", "p", 1));
      const polyfk::SubTriangulation sub = polyfk::sub_triangulate(mesh);
      const polyfk::AssemblyContext ctx(space, sub);
      const polyfk::PenaltySpec spec{cfg.get_double("penalty", "eta0", 10.0)};

      const auto write = [&](const char *name, const polyfk::SparseOperator &op) {
        std::ofstream out(dump_dir + "/" + name);
        if (!out)
          throw polyfk::ParseError(std::string("cannot write ") + name);
        op.dump_coordinate(out);
      };
      write("M.txt", polyfk::assemble_mass(ctx));
      write("A.txt", polyfk::assemble_stiffness(ctx, params, spec).A);
      write("M_alpha.txt", polyfk::assemble_linear_reaction(ctx, params));
      const polyfk::StateVector C0 = polyfk::project_l2(ctx, params.initial, 0.0);
      write("M_tilde.txt", polyfk::assemble_nonlinear_reaction(ctx, params, C0));
      std::cout << "wrote M.txt A.txt M_alpha.txt M_tilde.txt under " << dump_dir << "\n";
      return 0;
    }
  } catch (const std::exception &err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_code_for(err);
  }
  return 1;
}
