// Command-line driver: mesh generation and analysis, the composed projection,
// verification suites, and convergence/stability studies. All outputs are CSV
// files under --out; identical configurations produce byte-identical files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "sv/harness.hpp"

namespace fs = std::filesystem;
using namespace sv;

namespace {

struct MeshSpec {
  std::string text;
  Triangulation load() const {
    if (text.find(':') == std::string::npos && fs::exists(text))
      return load_mesh(text);
    // kind:n[:eps]
    auto first = text.find(':');
    if (first == std::string::npos)
      throw InvalidParameter("mesh spec must be a file or kind:n[:eps], got '" +
                             text + "'");
    MeshKind kind = mesh_kind_from_string(text.substr(0, first));
    std::string rest = text.substr(first + 1);
    auto second = rest.find(':');
    int n = std::stoi(rest.substr(0, second));
    double eps = 0.0;
    if (second != std::string::npos) eps = std::stod(rest.substr(second + 1));
    return generate_mesh(kind, n, eps);
  }
  bool is_file() const {
    return text.find(':') == std::string::npos && fs::exists(text);
  }
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path.string());
  for (const auto& l : lines) out << l << '\n';
}

SpaceVariant variant_from(const std::string& s) {
  if (s == "dirichlet") return SpaceVariant::Dirichlet;
  if (s == "slip") return SpaceVariant::Slip;
  throw InvalidParameter("variant must be dirichlet or slip");
}

int cmd_mesh_gen(const std::string& kind, int n, double eps,
                 const std::string& output) {
  Triangulation m = generate_mesh(mesh_kind_from_string(kind), n, eps);
  save_mesh(m, output);
  std::cout << "wrote " << output << ": " << m.n_vertices() << " vertices, "
            << m.n_triangles() << " triangles, h_max=" << m.h_max << "\n";
  return 0;
}

int cmd_analyze(const MeshSpec& spec, double tol, const std::string& out_dir) {
  Triangulation m = spec.load();
  if (tol <= 0)
    tol = spec.is_file() ? kLoadedMeshTolerance : kGeneratedMeshTolerance;
  auto cls = classify_vertices(m, tol);
  auto dec = build_decomposition(m, cls);
  fs::create_directories(out_dir);

  std::vector<std::string> vl{"vertex,x,y,boundary,fan_size,theta,class"};
  for (int z = 0; z < m.n_vertices(); ++z) {
    const char* c = cls.cls[z] == VertexClass::NonSingular ? "nonsingular"
                    : cls.cls[z] == VertexClass::InteriorSingular
                        ? "interior_singular"
                        : "boundary_singular";
    vl.push_back(std::to_string(z) + "," + fmt(m.vertices[z].x) + "," +
                 fmt(m.vertices[z].y) + "," +
                 (m.boundary_vertex[z] ? "1" : "0") + "," +
                 std::to_string(m.vertex_tris[z].size()) + "," +
                 fmt(cls.theta[z]) + "," + c);
  }
  write_lines(fs::path(out_dir) / "vertices.csv", vl);

  std::vector<std::string> cl{"chain,position,vertex"};
  for (int j = 0; j < int(dec.chains.size()); ++j)
    for (int i = 0; i < int(dec.chains[j].size()); ++i)
      cl.push_back(std::to_string(j) + "," + std::to_string(i) + "," +
                   std::to_string(dec.chains[j][i]));
  write_lines(fs::path(out_dir) / "chains.csv", cl);

  std::vector<std::string> rl{
      "region,kind,anchor,triangles,patch_triangles,theta_D,h_D,one_triangle_corners"};
  for (int r = 0; r < int(dec.regions.size()); ++r) {
    const Region& reg = dec.regions[r];
    // boundary singular vertices with a single triangle get the one-sided
    // constraint; they are worth flagging in reports
    int l1 = 0;
    for (int t : reg.triangles)
      for (int v : m.triangles[t])
        if (cls.cls[v] == VertexClass::BoundarySingular &&
            m.vertex_tris[v].size() == 1)
          ++l1;
    rl.push_back(std::to_string(r) + "," + to_string(reg.kind) + "," +
                 std::to_string(reg.anchor) + "," +
                 std::to_string(reg.triangles.size()) + "," +
                 std::to_string(reg.patch_triangles.size()) + "," +
                 fmt(reg.theta_D) + "," + fmt(reg.h_D) + "," +
                 std::to_string(l1));
  }
  write_lines(fs::path(out_dir) / "regions.csv", rl);

  std::cout << "analyze: " << m.n_vertices() << " vertices, "
            << cls.count(VertexClass::InteriorSingular) << " interior singular, "
            << cls.count(VertexClass::BoundarySingular) << " boundary singular, "
            << dec.chains.size() << " chains, " << dec.regions.size()
            << " regions\n";
  return 0;
}

int cmd_verify(const std::string& suite, const MeshSpec& spec, SuiteOptions opts,
               const std::string& out_dir) {
  Triangulation m = spec.load();
  SuiteResult r = run_suite(suite, m, opts);
  fs::create_directories(out_dir);
  if (!r.csv.empty())
    write_lines(fs::path(out_dir) / (suite + ".csv"), r.csv);
  if (r.gated) {
    std::cout << "suite " << suite << ": not run - " << r.message << "\n";
    return 1;
  }
  std::cout << "suite " << suite << (r.pass ? ": pass" : ": FAIL")
            << " (max residual " << r.max_residual << ")";
  if (!r.message.empty()) std::cout << " - " << r.message;
  std::cout << "\n";
  return r.pass ? 0 : 1;
}

int cmd_fortin_apply(const MeshSpec& spec, int k, const std::string& variant,
                     const std::string& field, const std::string& out_dir,
                     int threads) {
  Triangulation m = spec.load();
  const AnalyticField& f = field_by_name(field);
  FortinOperator F = build_fortin(m, k, variant_from(variant),
                                  spec.is_file() ? kLoadedMeshTolerance
                                                 : kGeneratedMeshTolerance,
                                  threads);
  FortinApplyOptions opts;
  opts.with_divergence_check = m.n_triangles() <= 512;
  opts.with_stability_ratios = true;
  opts.stability_field = &f;
  FortinResult r = apply_fortin(F, FieldExpr::of(f), opts);
  fs::create_directories(out_dir);
  write_field_csv(r.field, (fs::path(out_dir) / "field.csv").string());
  std::vector<std::string> rep{"metric,value"};
  rep.push_back("divergence_residual," + fmt(r.report.divergence_residual));
  rep.push_back("apply_ms," + fmt(r.report.apply_ms));
  for (int t = 0; t < int(r.report.stability_ratio.size()); ++t)
    rep.push_back("stability_ratio_T" + std::to_string(t) + "," +
                  fmt(r.report.stability_ratio[t]));
  write_lines(fs::path(out_dir) / "report.csv", rep);
  std::cout << "fortin apply: field=" << field << " variant=" << variant
            << " divergence residual=" << r.report.divergence_residual << "\n";
  return 0;
}

int cmd_study_convergence(const std::string& field, const MeshSpec& spec,
                          int levels, int k, const std::string& variant, int j,
                          double p, const std::string& out_dir, int threads) {
  const AnalyticField& f = field_by_name(field);
  Triangulation base = spec.load();
  std::vector<Triangulation> meshes{base};
  for (int l = 1; l < levels; ++l) meshes.push_back(refine_uniform(meshes.back()));
  auto rows =
      fortin_approximation_study(f, meshes, k, variant_from(variant), j, p, threads);
  fs::create_directories(out_dir);
  std::vector<std::string> csv{"level,h,dofs,error,max_local_error,order"};
  for (const auto& r : rows)
    csv.push_back(std::to_string(r.level) + "," + fmt(r.h) + "," +
                  std::to_string(r.dofs) + "," + fmt(r.error) + "," +
                  fmt(r.max_local) + "," + fmt(r.order));
  write_lines(fs::path(out_dir) / "convergence.csv", csv);
  std::cout << "study convergence: field=" << field << " levels=" << levels
            << " final order=" << (rows.empty() ? 0.0 : rows.back().order)
            << "\n";
  return 0;
}

int cmd_study_stability(const MeshSpec& spec, int k, const std::string& variant,
                        const std::string& field, const std::string& sweep,
                        const std::string& out_dir, int threads,
                        std::uint64_t seed) {
  fs::create_directories(out_dir);
  if (!sweep.empty()) {
    std::vector<double> eps;
    std::stringstream ss(sweep);
    std::string tok;
    while (std::getline(ss, tok, ',')) eps.push_back(std::stod(tok));
    auto rows = right_inverse_sweep(eps, k, 20, 2.0, seed);
    std::vector<std::string> csv{"eps,theta_D,measured_constant,ratio"};
    for (const auto& r : rows)
      csv.push_back(fmt(r.eps) + "," + fmt(r.theta_D) + "," + fmt(r.measured) +
                    "," + fmt(r.ratio));
    write_lines(fs::path(out_dir) / "sweep.csv", csv);
    std::cout << "study stability: sweep of " << rows.size() << " eps values\n";
    return 0;
  }
  Triangulation m = spec.load();
  const AnalyticField& f = field_by_name(field);
  auto rows = stability_study(m, k, variant_from(variant), f,
                              {1.0, 2.0, std::numeric_limits<double>::infinity()},
                              threads);
  std::vector<std::string> csv{"region,kind,theta_D,h_D,p,ratio"};
  for (const auto& r : rows)
    csv.push_back(std::to_string(r.region) + "," + to_string(r.kind) + "," +
                  fmt(r.theta_D) + "," + fmt(r.h_D) + "," + fmt(r.p) + "," +
                  fmt(r.ratio));
  write_lines(fs::path(out_dir) / "stability.csv", csv);
  std::cout << "study stability: " << rows.size() << " region/p rows\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local divergence-preserving projection toolkit for "
               "Scott-Vogelius elements"};
  app.set_config("--config", "", "INI config file; command-line flags override");
  app.require_subcommand(1);

  std::string mesh_spec, out_dir = ".", variant = "dirichlet", field = "sinsin";
  std::string suite, output = "mesh.txt", kind = "crisscross", sweep;
  int k = 4, n = 1, levels = 4, j = 0, threads = 1;
  double eps = 0.0, tol = 0.0, p = 2.0;
  std::uint64_t seed = 20240915;

  auto* mesh = app.add_subcommand("mesh", "mesh utilities");
  auto* gen = mesh->add_subcommand("gen", "generate a structured family mesh");
  gen->add_option("--kind", kind,
                  "diagonal|crisscross|perturbed_crisscross|boundary_chain");
  gen->add_option("--n", n, "subdivision count");
  gen->add_option("--eps", eps, "center displacement (perturbed_crisscross)");
  gen->add_option("-o,--output", output, "output mesh file");

  auto* analyze = app.add_subcommand("analyze", "vertex/region singularity report");
  analyze->add_option("mesh", mesh_spec, "mesh file or kind:n[:eps]")->required();
  analyze->add_option("--tol", tol, "singular classification tolerance");
  analyze->add_option("--out", out_dir, "output directory");

  auto* fortin = app.add_subcommand("fortin", "projection operators");
  auto* fapply = fortin->add_subcommand("apply", "apply the composed projection");
  fapply->add_option("--mesh", mesh_spec)->required();
  fapply->add_option("--degree", k);
  fapply->add_option("--variant", variant);
  fapply->add_option("--field", field);
  fapply->add_option("--out", out_dir);
  fapply->add_option("--threads", threads);

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", suite)->required();
  verify->add_option("--mesh", mesh_spec)->required();
  verify->add_option("--degree", k);
  verify->add_option("--variant", variant);
  verify->add_option("--tol", tol);
  verify->add_option("--seed", seed);
  verify->add_option("--threads", threads);
  verify->add_option("--out", out_dir);

  auto* study = app.add_subcommand("study", "refinement studies");
  auto* conv = study->add_subcommand("convergence", "error/order table");
  conv->add_option("--field", field);
  conv->add_option("--mesh", mesh_spec)->required();
  conv->add_option("--levels", levels);
  conv->add_option("--degree", k);
  conv->add_option("--variant", variant);
  conv->add_option("--j", j, "derivative order of the error (0 or 1)");
  conv->add_option("--p", p, "Lebesgue exponent");
  conv->add_option("--out", out_dir);
  conv->add_option("--threads", threads);
  auto* stab = study->add_subcommand("stability", "local stability ratios");
  stab->add_option("--mesh", mesh_spec);
  stab->add_option("--degree", k);
  stab->add_option("--variant", variant);
  stab->add_option("--field", field);
  stab->add_option("--sweep", sweep,
                   "comma-separated eps list: right-inverse constants on the "
                   "perturbed family");
  stab->add_option("--out", out_dir);
  stab->add_option("--threads", threads);
  stab->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }

  try {
    if (gen->parsed()) return cmd_mesh_gen(kind, n, eps, output);
    if (analyze->parsed()) return cmd_analyze({mesh_spec}, tol, out_dir);
    if (fapply->parsed())
      return cmd_fortin_apply({mesh_spec}, k, variant, field, out_dir, threads);
    if (verify->parsed()) {
      SuiteOptions o;
      o.k = k;
      o.tol = tol;
      o.variant = variant_from(variant);
      o.seed = seed;
      o.threads = threads;
      return cmd_verify(suite, {mesh_spec}, o, out_dir);
    }
    if (conv->parsed())
      return cmd_study_convergence(field, {mesh_spec}, levels, k, variant, j, p,
                                   out_dir, threads);
    if (stab->parsed())
      return cmd_study_stability({mesh_spec}, k, variant, field, sweep, out_dir,
                                 threads, seed);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const TopologyError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
