#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ultragen/atomic_measure.hpp"
#include "ultragen/coalsim.hpp"
#include "ultragen/errors.hpp"
#include "ultragen/gp_bounds.hpp"
#include "ultragen/io.hpp"
#include "ultragen/prohorov.hpp"
#include "ultragen/random_tree.hpp"
#include "ultragen/reconstruct.hpp"
#include "ultragen/skorohod.hpp"
#include "ultragen/tree_ops.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace ultragen;

// Parses either a profile path or a tree file into a path.
ProfilePath load_path(const std::string& file) {
  const std::string text = read_file(file);
  json j = json::parse(text);
  if (j.contains("jumps")) return path_from_json(text);
  return decomposition_path(tree_from_json(text));
}

MergeTree load_tree(const std::string& file) { return tree_from_json(read_file(file)); }

std::string with_seed(const std::string& json_text, std::uint64_t seed) {
  json j = json::parse(json_text);
  j["seed"] = seed;
  return j.dump(2);
}

int cmd_gen(const std::string& kind, int n, std::uint64_t seed, const std::string& matrix_file,
            const std::string& out) {
  MergeTree tree = [&] {
    if (kind == "random-identifiable") return random_identifiable_tree(n, seed);
    if (kind == "random-binary") return random_binary_tree(n, seed);
    if (kind == "from-matrix") {
      if (matrix_file.empty()) throw ValidationError("gen from-matrix: --matrix required");
      return to_merge_tree(matrix_from_csv(read_file(matrix_file)));
    }
    throw ValidationError("gen: unknown kind " + kind);
  }();
  const std::string text = with_seed(tree_to_json(tree), seed);
  if (out.empty())
    std::cout << text << "\n";
  else
    write_file(out, text);
  return 0;
}

int cmd_decompose(const std::string& in, const std::string& out, const std::string& csv) {
  const MergeTree tree = load_tree(in);
  const ProfilePath path = decomposition_path(tree);
  const std::string text = path_to_json(path);
  if (out.empty())
    std::cout << text << "\n";
  else
    write_file(out, text);
  if (!csv.empty()) write_file(csv, path_plateaus_csv(path));
  return 0;
}

int cmd_dist(const std::string& kind, const std::string& a, const std::string& b, double tol,
             int quad_points, double h) {
  json report;
  report["schema"] = kSchemaTag;
  report["kind"] = kind;
  if (kind == "l1-profile") {
    if (!(h > 0.0)) throw ValidationError("dist l1-profile: --h required and positive");
    const RankedProfile pa = family_sizes(load_tree(a), h);
    const RankedProfile pb = family_sizes(load_tree(b), h);
    report["h"] = h;
    report["l1"] = l1_distance(pa, pb);
    report["sup"] = sup_distance(pa, pb);
    report["value"] = l1_distance(pa, pb);
  } else if (kind == "skorohod") {
    SkorohodOptions opts;
    opts.quad_points = quad_points;
    const SkorohodResult r = skorohod_distance(load_path(a), load_path(b), opts);
    report["value"] = r.value;
    report["identity_value"] = r.identity_value;
    report["gap"] = r.gap();
    report["seq_term"] = r.seq_term;
    report["max_term"] = r.max_term;
  } else if (kind == "prohorov-nu2") {
    const ProhorovResult r = prohorov_distance(nu2(load_tree(a)), nu2(load_tree(b)), tol);
    report["value"] = r.value;
    report["bracket"] = json::array({r.lower, r.value});
  } else if (kind == "gp-bound") {
    const GpBound r = gp_upper_bound(load_tree(a), load_tree(b));
    report["value"] = r.value;
    report["strategy"] = r.strategy;
  } else if (kind == "gwa-surrogate") {
    const GwaSurrogate r = gwa_distance_surrogate(load_tree(a), load_tree(b));
    report["value"] = r.value;
    report["gp"] = r.gp;
    report["gp_strategy"] = r.gp_strategy;
    report["atom_zero_gap"] = r.atom_zero_gap;
    report["cdf_skorohod"] = r.cdf_skorohod;
    report["cdf_square_skorohod"] = r.cdf_square_skorohod;
  } else {
    throw ValidationError("dist: unknown kind " + kind);
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

json trace_to_json(const ReconstructionTrace& trace) {
  json steps = json::array();
  for (const auto& s : trace.steps) steps.push_back(json{{"height", s.height}, {"groups", s.groups}});
  return json{{"steps", steps}, {"certified", trace.certified}, {"certificate", trace.certificate}};
}

int cmd_reconstruct(const std::string& from, const std::string& in, double tol,
                    const std::string& out) {
  ReconstructOptions opts;
  opts.tol = tol;
  auto [tree, trace] = [&] {
    if (from == "path") return tree_from_path(path_from_json(read_file(in)), opts);
    if (from == "nu2") return tree_from_nu2(measure_from_json(read_file(in)), opts);
    throw ValidationError("reconstruct: unknown --from " + from);
  }();
  const std::string tree_text = tree_to_json(tree);
  if (out.empty())
    std::cout << tree_text << "\n";
  else
    write_file(out, tree_text);
  json report{{"schema", kSchemaTag}, {"trace", trace_to_json(trace)}};
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_simulate(const std::string& model, int n, double t, int reps, std::uint64_t seed,
                 const std::string& out_dir, const std::string& r0_file, int jobs) {
  fs::create_directories(out_dir);
  const UltrametricMatrixSpace r0 = r0_file.empty()
                                        ? caterpillar_metric(n, std::max(t, 1.0) * 4.0)
                                        : matrix_from_csv(read_file(r0_file));
  std::vector<std::string> tree_texts(reps), partition_texts(reps);
  std::vector<double> depth(reps), nu2_half(reps);

  auto run_rep = [&](int rep) {
    const auto stream = static_cast<std::uint64_t>(rep);
    MergeTree tree = [&] {
      if (model == "moran") return simulate_moran(n, t, r0, seed, stream).tree;
      const PartitionPath p = simulate_kingman(n, t, seed, stream);
      partition_texts[rep] = partition_to_json(p);
      return tree_from_coalescent(p, t, r0);
    }();
    tree_texts[rep] = with_seed(tree_to_json(tree), seed);
    depth[rep] = tree.root_height();
    nu2_half[rep] = nu2(tree).mass_upto(0.5 * t);
  };
  if (model != "moran" && model != "kingman")
    throw ValidationError("simulate: model must be moran or kingman");

  int workers = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, reps));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int rep = w; rep < reps; rep += workers) run_rep(rep);
    });
  for (auto& th : pool) th.join();

  std::ostringstream summary;
  summary << "rep,root_height,nu2_upto_half_t\n";
  for (int rep = 0; rep < reps; ++rep) {
    write_file(out_dir + "/tree_" + std::to_string(rep) + ".json", tree_texts[rep]);
    if (model == "kingman")
      write_file(out_dir + "/partition_" + std::to_string(rep) + ".json", partition_texts[rep]);
    summary << rep << "," << depth[rep] << "," << nu2_half[rep] << "\n";
  }
  write_file(out_dir + "/summary.csv", summary.str());
  return 0;
}

int cmd_convergence(const std::vector<int>& n_list, double t, const std::vector<double>& h_grid,
                    int reps, std::uint64_t seed, const std::string& out_dir, int jobs) {
  ConvergenceExperimentConfig cfg;
  cfg.n_list = n_list;
  cfg.t = t;
  cfg.h_grid = h_grid;
  cfg.reps = reps;
  cfg.seed = seed;
  cfg.jobs = jobs;
  const ConvergenceExperimentReport report = convergence_experiment(cfg);
  fs::create_directories(out_dir);
  write_file(out_dir + "/family_sizes.csv", experiment_rows_csv(report));
  json j{{"schema", kSchemaTag},
         {"seed", seed},
         {"n_list", n_list},
         {"h_grid", h_grid},
         {"largest_family_mean", report.largest_family_mean},
         {"nu2_upto_mean", report.nu2_upto_mean},
         {"coupled_l1_gap", report.coupled_l1_gap}};
  write_file(out_dir + "/summary.json", j.dump(2));
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ultragen: family-size decompositions of ultra-metric measure spaces"};
  app.require_subcommand(1);

  std::string kind, in, out, csv, a, b, matrix_file, from, model, r0_file;
  std::string out_dir = "ultragen-out";
  int n = 8, reps = 100, quad_points = 257, jobs = 0;
  double t = 1.0, tol = 1e-9, h = 0.0;
  std::uint64_t seed = 1;
  std::vector<int> n_list;
  std::vector<double> h_grid;

  auto* gen = app.add_subcommand("gen", "generate a tree");
  gen->add_option("--kind", kind, "random-identifiable|random-binary|from-matrix")->required();
  gen->add_option("--n", n, "number of leaves");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--matrix", matrix_file, "matrix CSV for from-matrix");
  gen->add_option("--out", out, "output tree JSON (stdout if omitted)");

  auto* dec = app.add_subcommand("decompose", "family size decomposition of a tree");
  dec->add_option("--in", in, "tree JSON")->required();
  dec->add_option("--out", out, "path JSON (stdout if omitted)");
  dec->add_option("--csv", csv, "plateau CSV for plotting");

  auto* dist = app.add_subcommand("dist", "distances between trees/paths/measures");
  dist->add_option("--kind", kind, "l1-profile|skorohod|prohorov-nu2|gp-bound|gwa-surrogate")
      ->required();
  dist->add_option("--a", a, "first input file")->required();
  dist->add_option("--b", b, "second input file")->required();
  dist->add_option("--tol", tol, "bisection tolerance");
  dist->add_option("--quad-points", quad_points, "quadrature budget");
  dist->add_option("--depth", h, "depth for l1-profile");

  auto* rec = app.add_subcommand("reconstruct", "invert a decomposition path or a nu2 measure");
  rec->add_option("--from", from, "path|nu2")->required();
  rec->add_option("--in", in, "input JSON")->required();
  rec->add_option("--tol", tol, "matching tolerance");
  rec->add_option("--out", out, "output tree JSON (stdout if omitted)");

  auto* sim = app.add_subcommand("simulate", "Moran / Kingman simulation");
  sim->add_option("model", model, "moran|kingman")->required();
  sim->add_option("--n", n, "population size");
  sim->add_option("--t", t, "time horizon");
  sim->add_option("--reps", reps, "replications");
  sim->add_option("--seed", seed, "random seed");
  sim->add_option("--r0", r0_file, "initial metric CSV (default caterpillar)");
  sim->add_option("--out", out_dir, "output directory")->envname("ULTRAGEN_OUT");
  sim->add_option("--jobs", jobs, "parallel workers (0 = all cores)");

  auto* conv = app.add_subcommand("convergence-experiment", "coupled family-size statistics");
  conv->add_option("--n-list", n_list, "population sizes")->required();
  conv->add_option("--t", t, "time horizon");
  conv->add_option("--h-grid", h_grid, "depths to record")->required();
  conv->add_option("--reps", reps, "replications");
  conv->add_option("--seed", seed, "random seed");
  conv->add_option("--out", out_dir, "output directory")->envname("ULTRAGEN_OUT");
  conv->add_option("--jobs", jobs, "parallel workers (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(kind, n, seed, matrix_file, out);
    if (dec->parsed()) return cmd_decompose(in, out, csv);
    if (dist->parsed()) return cmd_dist(kind, a, b, tol, quad_points, h);
    if (rec->parsed()) return cmd_reconstruct(from, in, tol, out);
    if (sim->parsed()) return cmd_simulate(model, n, t, reps, seed, out_dir, r0_file, jobs);
    if (conv->parsed()) return cmd_convergence(n_list, t, h_grid, reps, seed, out_dir, jobs);
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const ReconstructError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
