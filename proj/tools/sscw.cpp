#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <sscw/pipeline.hpp>

extern "C" void openblas_set_num_threads(int);

namespace fs = std::filesystem;
using namespace sscw;

namespace {

enum Exit { kOk = 0, kUsage = 1, kContract = 2, kIndeterminate = 3, kIo = 4 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary);
  if (!os || !(os << text) || !os.flush()) throw IoError("cannot write " + path.string());
}

std::string render(const std::function<void(std::ostream&)>& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

int check_family(const std::string& family, const CLI::App& cmd) {
  const auto& names = family_names();
  if (std::find(names.begin(), names.end(), family) != names.end()) return kOk;
  std::cerr << "unknown family '" << family << "'; expected one of:";
  for (const auto& n : names) std::cerr << ' ' << n;
  std::cerr << "\n\n" << cmd.help();
  return kUsage;
}

void add_common(CLI::App* c, RunConfig& cfg) {
  c->add_option("family", cfg.family, "builder family")->required();
  c->add_option("--levels", cfg.levels, "number of substitution levels N");
  c->add_option("--window", cfg.window, "window level n");
  c->add_option("--ambient", cfg.ambient, "ambient level m");
  c->add_option("--j", cfg.j, "cell dimension");
  c->add_flag("--relative", cfg.relative, "relative operators (boundary cells removed)");
  c->add_option("--t-lo", cfg.t_lo, "smallest time of the log grid");
  c->add_option("--t-hi", cfg.t_hi, "largest time of the log grid");
  c->add_option("--t-count", cfg.t_count, "number of grid points");
  c->add_option("--k-max", cfg.k_max, "largest power for transition traces");
  c->add_option("--seed", cfg.seed, "Monte Carlo seed");
  c->add_option("--budget", cfg.budget, "Monte Carlo walks sampled per return probability");
  c->add_option("--mode", cfg.mode, "return probability mode")->check(CLI::IsMember({"exact", "monte_carlo"}));
  c->add_option("--fit-lo", cfg.fit_lo, "fixed fit window start (with --fit-hi)");
  c->add_option("--fit-hi", cfg.fit_hi, "fixed fit window end (with --fit-lo)");
}

int cmd_build(const RunConfig& cfg, const std::string& out_dir) {
  const int levels = cfg.levels < 0 ? 6 : cfg.levels;
  auto ex = build_family(cfg.family, levels);
  const fs::path dir = fs::path(out_dir) / cfg.family;
  for (int n = 0; n <= ex.top(); ++n) {
    write_file(dir / ("level_" + std::to_string(n) + ".cw"), to_text(ex.level(n)));
    if (n < ex.top())
      write_file(dir / ("copymaps_" + std::to_string(n) + ".txt"), render([&](std::ostream& os) { write_copy_maps(os, ex, n); }));
  }
  auto report = verify_self_similarity(ex);
  std::string text = report.summary();
  bool valid = true;
  for (int n = 0; n <= ex.top(); ++n)
    for (const auto& v : validate(ex.level(n))) {
      valid = false;
      text += "level " + std::to_string(n) + ": " + v.kind + ": " + v.message + "\n";
    }
  write_file(dir / "report.txt", text);
  std::cout << "wrote " << ex.top() + 1 << " complex files to " << dir.string() << "\n" << text;
  return report.passed() && valid ? kOk : kContract;
}

int cmd_verify(const RunConfig& cfg, const std::string& input) {
  if (!input.empty()) {
    std::ifstream is(input);
    if (!is) throw IoError("cannot read " + input);
    auto k = read_complex(is);
    auto rep = validate(k);
    for (const auto& v : rep) std::cout << v.kind << ": " << v.message << "\n";
    std::cout << (rep.empty() ? "complex is valid\n" : "complex is invalid\n");
    return rep.empty() ? kOk : kContract;
  }
  const int levels = cfg.levels < 0 ? 4 : cfg.levels;
  auto ex = build_family(cfg.family, levels);
  auto report = verify_self_similarity(ex);
  std::cout << report.summary();
  bool ok = report.passed();
  for (int n = 0; n <= ex.top(); ++n) ok = ok && validate(ex.level(n)).empty();
  const int m = identity_ambient(ex, 0);
  for (int j = 0; j <= ex.dimension(); ++j)
    for (bool rel : {false, true})
      for (const auto& c : identity_suite(ex, j, rel, m, cfg.seed)) {
        ok = ok && c.passed;
        std::printf("%-5s j=%d %-9s %-18s value=%.3g bound=%.3g %s\n", c.passed ? "PASS" : "FAIL", j,
                    rel ? "relative" : "absolute", c.name.c_str(), c.value, c.bound, c.detail.c_str());
      }
  return ok ? kOk : kContract;
}

int cmd_dual(const RunConfig& cfg, const std::string& out_dir) {
  const int levels = cfg.levels < 0 ? 5 : cfg.levels;
  auto ex = build_family(cfg.family, levels);
  if (ex.dimension() < 2) throw std::invalid_argument("dual-graph needs a 2-complex family");
  const fs::path dir = fs::path(out_dir) / (cfg.family + "_dual");
  bool ok = true;
  std::optional<Exhaustion> gasket;
  if (cfg.family == "dodecagon2") gasket = build_gasket(levels);
  for (int n = 0; n <= ex.top(); ++n) {
    auto g = dual_graph(ex.level(n));
    write_file(dir / ("level_" + std::to_string(n) + ".cw"), to_text(g));
    std::cout << "level " << n << ": " << g.count(0) << " vertices, " << g.count(1) << " edges";
    if (gasket) {
      auto iso = find_graph_isomorphism(g, gasket->level(n));
      const bool cert = iso && is_graph_isomorphism(g, gasket->level(n), *iso);
      ok = ok && cert;
      std::cout << (cert ? ", isomorphic to gasket level " : ", NOT isomorphic to gasket level ") << n;
    }
    std::cout << "\n";
  }
  return ok ? kOk : kContract;
}

int cmd_euler(const RunConfig& cfg) {
  const int levels = cfg.levels < 0 ? 8 : cfg.levels;
  auto e = euler_characteristic(cfg.family, levels);
  OrderedJson o;
  o["family"] = cfg.family;
  o["levels"] = levels;
  o["counts"] = e.counts;
  auto body = euler_json(e);
  for (auto it = body.begin(); it != body.end(); ++it) o[it.key()] = it.value();
  std::cout << o.dump(2) << "\n";
  return kOk;
}

int cmd_curve(const RunConfig& cfg, const std::string& kind, const std::string& format, const std::string& out,
              const std::string& export_op) {
  auto c = run_curve(cfg, kind);
  const std::string text = format == "json" ? curve_json(c).dump(2) + "\n" : render([&](std::ostream& os) { write_curve_csv(os, c); });
  if (out.empty()) std::cout << text;
  else write_file(out, text);
  if (!export_op.empty()) {
    auto r = resolve_config(cfg);
    auto ex = build_family(r.family, r.levels);
    auto op = OperatorSpec{r.kind, r.j, r.relative}.assemble(ex.level(r.ambient));
    write_file(export_op, render([&](std::ostream& os) { write_matrix_market(os, op); }));
  }
  return kOk;
}

int cmd_invariants(const RunConfig& cfg, const std::string& out_dir) {
  auto rep = run_invariants(cfg);
  const std::string text = rep.json.dump(2) + "\n";
  std::cout << text;
  if (!out_dir.empty())
    write_file(fs::path(out_dir) / ("invariants_" + cfg.family + "_j" + std::to_string(cfg.j) +
                                    (cfg.relative ? "_rel" : "") + ".json"),
               text);
  if (!rep.identities_passed) return kContract;
  return rep.indeterminate ? kIndeterminate : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-similar CW-complexes: builders, traces and L2 invariants"};
  app.set_config("--config", "", "TOML/INI file with option values; command-line flags take precedence");
  app.require_subcommand(1);
  std::string out_dir;
  int threads = 1;
  app.add_option("--output-dir", out_dir, "output directory")->envname("SSCW_OUTPUT_DIR");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  RunConfig cfg;
  std::string input, kind = "heat", format = "csv", out, export_op, laplacian_kind = "full";
  auto* build = app.add_subcommand("build", "build levels 0..N and verify the self-similarity axioms");
  build->add_option("family", cfg.family)->required();
  build->add_option("--levels", cfg.levels);
  auto* verify = app.add_subcommand("verify", "verify a family or a complex file");
  verify->add_option("family", cfg.family);
  verify->add_option("--levels", cfg.levels);
  verify->add_option("--input", input, "complex file to validate");
  verify->add_option("--seed", cfg.seed);
  auto* dual = app.add_subcommand("dual-graph", "write dual graphs of a 2-complex family");
  dual->add_option("family", cfg.family)->required();
  dual->add_option("--levels", cfg.levels);
  auto* euler = app.add_subcommand("euler", "exact renormalized Euler characteristic");
  euler->add_option("family", cfg.family)->required();
  euler->add_option("--levels", cfg.levels);
  auto* curve = app.add_subcommand("curve", "heat/resolvent/density/power trace curves as CSV");
  add_common(curve, cfg);
  curve->add_option("--kind", kind)->check(CLI::IsMember({"heat", "resolvent", "density", "power", "power_paired"}));
  curve->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  curve->add_option("--out", out, "output file (default stdout)");
  curve->add_option("--export-operator", export_op, "write the ambient operator in Matrix Market format");
  curve->add_flag("--include-zero", cfg.include_zero, "prepend a t = 0 row to the time grid");
  curve->add_option("--laplacian", laplacian_kind)->check(CLI::IsMember({"full", "plus", "minus"}));
  auto* inv = app.add_subcommand("invariants", "full pipeline: beta, alpha, Euler characteristic, identities");
  add_common(inv, cfg);
  inv->add_option("--laplacian", laplacian_kind)->check(CLI::IsMember({"full", "plus", "minus"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  cfg.threads = threads;
  cfg.output_dir = out_dir;
  cfg.kind = laplacian_kind == "plus" ? LaplacianKind::plus : laplacian_kind == "minus" ? LaplacianKind::minus : LaplacianKind::full;
  openblas_set_num_threads(threads);

  CLI::App* cmd = app.get_subcommands().front();
  if (cmd != verify || input.empty()) {
    if (cfg.family.empty()) {
      std::cerr << "missing family\n\n" << cmd->help();
      return kUsage;
    }
    if (int rc = check_family(cfg.family, *cmd)) return rc;
  }
  try {
    if (cmd == build) return cmd_build(cfg, out_dir.empty() ? "sscw-out" : out_dir);
    if (cmd == verify) return cmd_verify(cfg, input);
    if (cmd == dual) return cmd_dual(cfg, out_dir.empty() ? "sscw-out" : out_dir);
    if (cmd == euler) return cmd_euler(cfg);
    if (cmd == curve) return cmd_curve(cfg, kind, format, out, export_op);
    if (cmd == inv) return cmd_invariants(cfg, out_dir);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const MarginError& e) {
    std::cerr << "margin violation: " << e.what() << "\n(hint: use --ambient " << "to place the window further inside)\n";
    return kContract;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n\n" << cmd->help();
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kContract;
  }
  return kUsage;
}
