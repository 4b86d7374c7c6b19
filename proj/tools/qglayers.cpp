// qglayers: simulate, reduce, verify-symmetry, verify-conservation, params.

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qg/config.hpp"
#include "qg/error.hpp"
#include "qg/reduction.hpp"
#include "qg/simulator.hpp"
#include "qg/snapshot_io.hpp"
#include "qg/suites.hpp"

namespace fs = std::filesystem;
using namespace qg;

namespace {

std::string sha256_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char h[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(h, sizeof h, "%02x", md[i]);
    hex += h;
  }
  return hex;
}

// Records every artifact; the MANIFEST is written on success and on failure.
class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
  fs::path path(const std::string& rel) {
    files_.push_back(rel);
    const fs::path p = dir_ / rel;
    fs::create_directories(p.parent_path());
    return p;
  }
  void manifest(const std::string& status) const {
    std::ofstream os(dir_ / "MANIFEST");
    os << "status: " << status << "\n";
    for (const auto& f : files_) {
      const fs::path p = dir_ / f;
      if (!fs::exists(p)) {
        os << "missing  " << f << "\n";
        continue;
      }
      os << sha256_file(p) << "  " << fs::file_size(p) << "  " << f << "\n";
    }
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double amplitude_of(const RunConfig& c) {
  if (c.amplitude > 0.0) return c.amplitude;
  return c.preset == "unit" ? 1.0 : 1.0e4;
}

int cmd_simulate(const RunConfig& c, Artifacts& a) {
  SimConfig s;
  s.model = c.model;
  s.grid = c.grid();
  s.nsteps = c.nsteps;
  s.output_every = c.output_every;
  if (c.init == "random") {
    s.preset.kind = InitialPreset::Kind::random_bandlimited;
    s.preset.seed = c.seed;
    s.preset.kmax = c.kmax;
    s.preset.amplitude = amplitude_of(c);
  }
  const LayeredState s0 = initial_state(s.model, s.grid, s.preset);
  s.dt = c.dt > 0.0 ? c.dt : default_dt(s.model, s0);
  if (const std::string w = cfl_warning(s0, s.dt); !w.empty()) std::cerr << "warning: " << w << "\n";
  int count = 0;
  const Trajectory tr = run(
      s,
      [&](const LayeredState& st, std::int64_t k) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshots/psi_%06lld.qgf", static_cast<long long>(k));
        write_snapshot(a.path(name).string(), st.psi.front().grid(), st.t, st.psi);
        ++count;
      },
      false);
  std::ofstream os(a.path("diagnostics.csv"));
  const int n = layer_count(c.model);
  os << "step,time";
  for (const char* q : {"energy", "enstrophy", "mean_pv"})
    for (int l = 1; l <= n; ++l) os << ',' << q << l;
  os << ",max_grad\n";
  char buf[40];
  for (const auto& r : tr.diagnostics) {
    os << r.step;
    std::snprintf(buf, sizeof buf, ",%.17g", r.time);
    os << buf;
    for (const auto* v : {&r.d.energy, &r.d.enstrophy, &r.d.mean_pv})
      for (double x : *v) {
        std::snprintf(buf, sizeof buf, ",%.17g", x);
        os << buf;
      }
    std::snprintf(buf, sizeof buf, ",%.17g\n", r.d.max_grad);
    os << buf;
  }
  std::cout << "simulate: model " << model_name(c.kind) << ", dt " << num(s.dt) << ", " << c.nsteps << " steps, "
            << count << " snapshots\n";
  return 0;
}

int cmd_reduce(const RunConfig& c, Artifacts& a) {
  const ReducedSystem sys = build_reduced(c.reduction);
  const auto roots = characteristic_roots(sys);
  const double tol = zero_root_threshold(sys);
  double s0 = c.s0, s1 = c.s1;
  if (s0 == s1) {
    double half = 0.5 * c.lx;
    if (const auto* p = std::get_if<ModelIIIParams>(&c.model)) half = p->L;
    double growth = 0.0;
    for (const auto& r : roots) growth = std::max(growth, std::abs(r.real()));
    s0 = -half;
    s1 = growth > 0.0 ? std::min(half, s0 + 30.0 / growth) : half;
  }
  if (!(s1 > s0)) throw InvalidArgument("reduce: s1 must exceed s0");
  const double h = c.h > 0.0 ? c.h : (s1 - s0) / 2000.0;
  const Profile prof = integrate_reduced(sys, default_initial_state(sys), s0, s1, h);
  {
    std::ofstream os(a.path("profile.csv"));
    write_profile_csv(os, prof);
  }
  std::ofstream os(a.path("roots.txt"));
  os << "# characteristic roots of the reduced system in " << sys.variable << "; zero threshold " << num(tol) << "\n";
  os << "index,real,imag,class\n";
  char buf[96];
  for (std::size_t k = 0; k < roots.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%s\n", k, roots[k].real(), roots[k].imag(),
                  root_class_name(classify_root(roots[k], tol)));
    os << buf;
  }
  std::cout << "reduce: model " << model_name(c.kind) << ", " << sys.n << " states over [" << num(s0) << ", "
            << num(s1) << "], " << roots.size() << " roots\n";
  return 0;
}

int cmd_verify_symmetry(const RunConfig& c, Artifacts& a) {
  SymmetrySuiteOptions o;
  o.grid = c.grid();
  o.kmax = c.kmax;
  o.seed = c.seed;
  o.t_end = c.t_end;
  o.dt = c.dt;
  o.eps = c.epsilon;
  const auto r = symmetry_suite(c.model, o);
  {
    std::ofstream os(a.path("symmetry.csv"));
    write_invariance_csv(os, r.rows);
  }
  bool ok = true;
  for (const auto& row : r.rows) {
    std::cout << (row.pass ? "PASS " : "FAIL ") << row.generator << " ratio " << num(row.ratio) << "\n";
    ok = ok && row.pass;
  }
  std::cout << (r.control.pass ? "FAIL" : "PASS") << " negative control detected, ratio " << num(r.control.ratio)
            << "\n";
  ok = ok && !r.control.pass;
  if (r.corrected_y8)
    std::cout << "info Y8* (rotating frame, fiber sign flipped) ratio " << num(r.corrected_y8->ratio) << "\n";
  return ok ? 0 : 1;
}

int cmd_verify_conservation(const RunConfig& c, Artifacts& a) {
  ConservationSuiteOptions o;
  o.n = c.cons_n;
  o.sim_seed = c.seed;
  const auto rows = conservation_suite(c.model, o);
  {
    std::ofstream os(a.path("conservation.csv"));
    write_conservation_csv(os, rows);
  }
  bool ok = true;
  for (const auto& r : rows) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.multiplier_id << " " << r.check << " " << r.grid << " "
              << num(r.value) << "\n";
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

int cmd_params(const RunConfig& c, Artifacts& a) {
  std::ostringstream os;
  os << serialize_config(c) << "# derived\n";
  if (const auto* p = std::get_if<ModelIParams>(&c.model))
    os << "# eps1=" << num(p->eps1()) << " eps2=" << num(p->eps2()) << " alpha2=" << num(p->alpha2()) << "\n";
  if (const auto* p = std::get_if<ModelIIIParams>(&c.model)) os << "# L=" << num(p->L) << "\n";
  std::ofstream(a.path("params.txt")) << os.str();
  std::cout << os.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layered quasi-geostrophic simulation and verification"};
  std::string command, config_path, out;
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;
  app.add_option("command", command, "simulate | reduce | verify-symmetry | verify-conservation | params")->required();
  app.add_option("overrides", overrides, "key=value overrides (highest precedence)");
  app.add_option("--config", config_path, "flat key=value config file");
  auto* out_opt = app.add_option("--out", out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  CLI11_PARSE(app, argc, argv);

  RunConfig cfg;
  try {
    std::vector<ConfigEntry> entries{{"command", command, "command line"}};
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw InvalidArgument("cannot read config file " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      for (auto& e : tokenize_config(ss.str())) {
        e.origin = config_path + " " + e.origin;
        entries.push_back(std::move(e));
      }
    }
    if (*out_opt) entries.push_back({"out", out, "--out"});
    if (*seed_opt) entries.push_back({"seed", std::to_string(seed), "--seed"});
    for (std::size_t k = 0; k < overrides.size(); ++k) {
      const auto& o = overrides[k];
      const auto eq = o.find('=');
      if (eq == std::string::npos || eq == 0) throw InvalidArgument("argument '" + o + "': expected key=value");
      entries.push_back({o.substr(0, eq), o.substr(eq + 1), "argument '" + o + "'"});
    }
    cfg = resolve_config(entries);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  Artifacts art(cfg.out);
  try {
    std::ofstream(art.path("config.txt")) << serialize_config(cfg);
    int rc = 0;
    if (cfg.command == "simulate") rc = cmd_simulate(cfg, art);
    if (cfg.command == "reduce") rc = cmd_reduce(cfg, art);
    if (cfg.command == "verify-symmetry") rc = cmd_verify_symmetry(cfg, art);
    if (cfg.command == "verify-conservation") rc = cmd_verify_conservation(cfg, art);
    if (cfg.command == "params") rc = cmd_params(cfg, art);
    art.manifest(rc == 0 ? "complete" : "complete, with failed checks");
    return rc;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    art.manifest(std::string("incomplete (") + e.what() + ")");
    return 2;
  }
}
