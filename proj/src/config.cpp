#include "qg/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "qg/error.hpp"

namespace qg {
namespace {

constexpr double kTwoPi = 6.283185307179586;

[[noreturn]] void fail(const ConfigEntry& e, const std::string& what) {
  throw InvalidArgument("config " + e.origin + ": key '" + e.key + "': " + what);
}

double to_double(const ConfigEntry& e) {
  const char* s = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s, &end);
  if (e.value.empty() || *end != '\0' || errno == ERANGE) fail(e, "expected a number, got '" + e.value + "'");
  return v;
}

std::int64_t to_int(const ConfigEntry& e) {
  const char* s = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s, &end, 10);
  if (e.value.empty() || *end != '\0' || errno == ERANGE) fail(e, "expected an integer, got '" + e.value + "'");
  return v;
}

std::uint64_t to_u64(const ConfigEntry& e) {
  const char* s = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  if (e.value.empty() || e.value[0] == '-') fail(e, "expected an unsigned integer, got '" + e.value + "'");
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (*end != '\0' || errno == ERANGE) fail(e, "expected an unsigned integer, got '" + e.value + "'");
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

enum Scope : unsigned { kI = 1, kII = 2, kIII = 4, kAll = 7 };

unsigned scope_of(ModelKind k) { return k == ModelKind::I ? kI : k == ModelKind::II ? kII : kIII; }

using Setter = std::function<void(RunConfig&, const ConfigEntry&)>;

struct Key {
  unsigned scope;
  Setter set;
};

template <class P>
P& params(RunConfig& c) {
  return std::get<P>(c.model);
}

template <class R>
R& red(RunConfig& c) {
  return std::get<R>(c.reduction);
}

const std::map<std::string, Key>& keys() {
  static const std::map<std::string, Key> k = [] {
    std::map<std::string, Key> m;
    auto num = [&](const char* name, unsigned scope, std::function<double&(RunConfig&)> ref) {
      m[name] = {scope, [ref](RunConfig& c, const ConfigEntry& e) { ref(c) = to_double(e); }};
    };
    m["nx"] = {kAll, [](RunConfig& c, const ConfigEntry& e) { c.nx = static_cast<int>(to_int(e)); }};
    m["ny"] = {kAll, [](RunConfig& c, const ConfigEntry& e) { c.ny = static_cast<int>(to_int(e)); }};
    num("lx", kI | kII, [](RunConfig& c) -> double& { return c.lx; });
    num("ly", kI | kII, [](RunConfig& c) -> double& { return c.ly; });
    num("dt", kAll, [](RunConfig& c) -> double& { return c.dt; });
    m["nsteps"] = {kAll, [](RunConfig& c, const ConfigEntry& e) { c.nsteps = to_int(e); }};
    m["output_every"] = {kAll, [](RunConfig& c, const ConfigEntry& e) { c.output_every = to_int(e); }};
    m["init"] = {kAll, [](RunConfig& c, const ConfigEntry& e) {
                   if (e.value != "random" && e.value != "rest") fail(e, "expected random or rest");
                   c.init = e.value;
                 }};
    m["kmax"] = {kAll, [](RunConfig& c, const ConfigEntry& e) { c.kmax = static_cast<int>(to_int(e)); }};
    num("amplitude", kAll, [](RunConfig& c) -> double& { return c.amplitude; });
    m["seed"] = {kAll, [](RunConfig& c, const ConfigEntry& e) { c.seed = to_u64(e); }};
    m["out"] = {kAll, [](RunConfig& c, const ConfigEntry& e) {
                  if (e.value.empty()) fail(e, "empty output directory");
                  c.out = e.value;
                }};
    num("s0", kAll, [](RunConfig& c) -> double& { return c.s0; });
    num("s1", kAll, [](RunConfig& c) -> double& { return c.s1; });
    num("h", kAll, [](RunConfig& c) -> double& { return c.h; });
    num("epsilon", kAll, [](RunConfig& c) -> double& { return c.epsilon; });
    num("t_end", kAll, [](RunConfig& c) -> double& { return c.t_end; });
    m["cons_n"] = {kI | kII, [](RunConfig& c, const ConfigEntry& e) { c.cons_n = static_cast<int>(to_int(e)); }};

    num("rho1", kI, [](RunConfig& c) -> double& { return params<ModelIParams>(c).rho1; });
    num("rho2", kI, [](RunConfig& c) -> double& { return params<ModelIParams>(c).rho2; });
    num("l", kI, [](RunConfig& c) -> double& { return params<ModelIParams>(c).l; });
    num("g", kI, [](RunConfig& c) -> double& { return params<ModelIParams>(c).g; });
    num("H1", kI | kIII, [](RunConfig& c) -> double& {
      return c.kind == ModelKind::I ? params<ModelIParams>(c).H1 : params<ModelIIIParams>(c).H1;
    });
    num("H2", kI | kIII, [](RunConfig& c) -> double& {
      return c.kind == ModelKind::I ? params<ModelIParams>(c).H2 : params<ModelIIIParams>(c).H2;
    });
    num("lambda", kII, [](RunConfig& c) -> double& { return params<ModelIIParams>(c).lambda; });
    num("f0", kIII, [](RunConfig& c) -> double& { return params<ModelIIIParams>(c).f0; });
    num("beta0", kIII, [](RunConfig& c) -> double& { return params<ModelIIIParams>(c).beta0; });
    num("rho0", kIII, [](RunConfig& c) -> double& { return params<ModelIIIParams>(c).rho0; });
    num("H3", kIII, [](RunConfig& c) -> double& { return params<ModelIIIParams>(c).H3; });
    num("gp1", kIII, [](RunConfig& c) -> double& { return params<ModelIIIParams>(c).gp1; });
    num("gp2", kIII, [](RunConfig& c) -> double& { return params<ModelIIIParams>(c).gp2; });
    num("A_H", kIII, [](RunConfig& c) -> double& { return params<ModelIIIParams>(c).A_H; });
    num("tau0", kIII, [](RunConfig& c) -> double& { return params<ModelIIIParams>(c).tau0; });
    num("mu0", kIII, [](RunConfig& c) -> double& { return params<ModelIIIParams>(c).mu0; });
    num("alpha", kIII, [](RunConfig& c) -> double& { return params<ModelIIIParams>(c).alpha; });

    num("mu1", kI, [](RunConfig& c) -> double& { return red<ModelIReduction>(c).mu1; });
    num("mu2", kI, [](RunConfig& c) -> double& { return red<ModelIReduction>(c).mu2; });
    num("mu3", kI, [](RunConfig& c) -> double& { return red<ModelIReduction>(c).mu3; });
    num("mu4", kI, [](RunConfig& c) -> double& { return red<ModelIReduction>(c).mu4; });
    num("sigma1", kII, [](RunConfig& c) -> double& { return red<ModelIIReduction>(c).sigma1; });
    num("sigma2", kII, [](RunConfig& c) -> double& { return red<ModelIIReduction>(c).sigma2; });
    num("kappa1", kIII, [](RunConfig& c) -> double& { return red<ModelIIIReduction>(c).kappa1; });
    num("kappa2", kIII, [](RunConfig& c) -> double& { return red<ModelIIIReduction>(c).kappa2; });
    num("kappa3", kIII, [](RunConfig& c) -> double& { return red<ModelIIIReduction>(c).kappa3; });
    return m;
  }();
  return k;
}

const char* const kCommands[] = {"simulate", "reduce", "verify-symmetry", "verify-conservation", "params"};

bool is_model_constant(const std::string& k) {
  static const char* names[] = {"rho1", "rho2", "l",   "g",   "H1",   "H2",  "lambda", "f0",   "beta0",
                                "rho0", "H3",   "gp1", "gp2", "A_H",  "tau0", "mu0",   "alpha"};
  for (const char* n : names)
    if (k == n) return true;
  return false;
}

}  // namespace

Grid RunConfig::grid() const {
  if (const auto* p = std::get_if<ModelIIIParams>(&model)) return Grid::basin(nx, ny, -p->L, p->L, -p->L, p->L);
  return Grid::periodic(nx, ny, lx, ly);
}

std::vector<ConfigEntry> tokenize_config(const std::string& text) {
  std::vector<ConfigEntry> out;
  std::istringstream is(text);
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      const auto eq = tok.find('=');
      ConfigEntry e{tok.substr(0, eq), eq == std::string::npos ? "" : tok.substr(eq + 1), "line " + std::to_string(n)};
      if (eq == std::string::npos || e.key.empty()) fail(e, "expected key=value, got '" + tok + "'");
      out.push_back(std::move(e));
    }
  }
  return out;
}

RunConfig resolve_config(const std::vector<ConfigEntry>& entries) {
  const ConfigEntry* command = nullptr;
  const ConfigEntry* model = nullptr;
  const ConfigEntry* preset = nullptr;
  for (const auto& e : entries) {
    if (e.key == "command") command = &e;
    if (e.key == "model") model = &e;
    if (e.key == "preset") preset = &e;
  }
  if (!command) throw InvalidArgument("config: missing required key 'command'");
  if (!model) throw InvalidArgument("config: missing required key 'model'");
  RunConfig c;
  bool known = false;
  for (const char* k : kCommands) known = known || command->value == k;
  if (!known) fail(*command, "unknown command '" + command->value + "'");
  c.command = command->value;
  try {
    c.kind = parse_model_kind(model->value);
  } catch (const InvalidArgument&) {
    fail(*model, "unknown model '" + model->value + "' (expected I, II or III)");
  }
  c.preset = preset ? preset->value : (c.kind == ModelKind::III ? "table1" : "default");
  const bool unit = c.preset == "unit";
  switch (c.kind) {
    case ModelKind::I:
      if (c.preset != "default" && !unit) fail(*preset, "model I presets are default and unit");
      c.model = unit ? ModelIParams::unit() : ModelIParams{};
      c.reduction = ModelIReduction{};
      break;
    case ModelKind::II:
      if (c.preset != "default" && !unit) fail(*preset, "model II presets are default and unit");
      c.model = unit ? ModelIIParams::unit() : ModelIIParams{};
      c.reduction = ModelIIReduction{};
      break;
    case ModelKind::III:
      if (c.preset != "table1" && c.preset != "default") fail(*preset, "model III presets are table1 and default");
      c.preset = "table1";
      c.model = ModelIIIParams::table1();
      c.reduction = ModelIIIReduction{};
      break;
  }
  const double side = unit ? kTwoPi : 1.0e6;
  c.lx = c.ly = side;
  c.init = c.kind == ModelKind::III ? "rest" : "random";

  std::string constant_origins;
  for (const auto& e : entries) {
    if (e.key == "command" || e.key == "model" || e.key == "preset") continue;
    auto it = keys().find(e.key);
    if (it == keys().end()) fail(e, "unknown key");
    if (!(it->second.scope & scope_of(c.kind))) fail(e, "does not apply to model " + model_name(c.kind));
    it->second.set(c, e);
    if (is_model_constant(e.key)) constant_origins += (constant_origins.empty() ? "" : ", ") + e.key + " (" + e.origin + ")";
  }

  if (auto* p = std::get_if<ModelIIIParams>(&c.model)) {
    if (p->rho0 > 0.0 && p->f0 != 0.0 && p->mu0 != 0.0) p->L = ModelIIIParams::derived_L(p->tau0, p->rho0, p->f0, p->mu0);
  }
  try {
    validate(c.model);
  } catch (const InvalidArgument& ex) {
    throw InvalidArgument(std::string("config: ") + ex.what() +
                          (constant_origins.empty() ? "" : "; constants set at " + constant_origins));
  }
  std::visit([&](auto& r) { r.params = std::get<std::decay_t<decltype(r.params)>>(c.model); }, c.reduction);

  auto bad = [](const std::string& key, const std::string& what) {
    throw InvalidArgument("config: key '" + key + "': " + what);
  };
  if (c.nx < 4 || c.ny < 4) bad("nx", "grids need at least 4 nodes per axis");
  if (c.kind != ModelKind::III && (!(c.lx > 0.0) || !(c.ly > 0.0))) bad("lx", "domain lengths must be positive");
  if (c.dt < 0.0 || !std::isfinite(c.dt)) bad("dt", "must be non-negative (0 selects the CFL estimate)");
  if (c.nsteps < 0) bad("nsteps", "must be non-negative");
  if (c.output_every < 1) bad("output_every", "must be at least 1");
  if (c.kmax < 1) bad("kmax", "must be at least 1");
  if (c.amplitude < 0.0) bad("amplitude", "must be non-negative");
  if (c.h < 0.0) bad("h", "must be non-negative (0 selects 2000 steps over the range)");
  if (!(c.epsilon > 0.0)) bad("epsilon", "must be positive");
  if (c.t_end < 0.0) bad("t_end", "must be non-negative");
  if (c.cons_n < 16 || c.cons_n % 2) bad("cons_n", "must be an even number of at least 16");
  return c;
}

RunConfig parse_config(const std::string& text) { return resolve_config(tokenize_config(text)); }

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "command=" << c.command << "\nmodel=" << model_name(c.kind) << "\npreset=" << c.preset << "\n";
  os << "# grid and time\n";
  os << "nx=" << c.nx << "\nny=" << c.ny << "\n";
  if (c.kind != ModelKind::III) os << "lx=" << fmt(c.lx) << "\nly=" << fmt(c.ly) << "\n";
  os << "dt=" << fmt(c.dt) << "\nnsteps=" << c.nsteps << "\noutput_every=" << c.output_every << "\n";
  os << "# initial state\n";
  os << "init=" << c.init << "\nkmax=" << c.kmax << "\namplitude=" << fmt(c.amplitude) << "\nseed=" << c.seed << "\n";
  os << "out=" << c.out << "\n";
  os << "# constants\n";
  if (const auto* p = std::get_if<ModelIParams>(&c.model))
    os << "rho1=" << fmt(p->rho1) << "\nrho2=" << fmt(p->rho2) << "\nH1=" << fmt(p->H1) << "\nH2=" << fmt(p->H2)
       << "\nl=" << fmt(p->l) << "\ng=" << fmt(p->g) << "\n";
  if (const auto* p = std::get_if<ModelIIParams>(&c.model)) os << "lambda=" << fmt(p->lambda) << "\n";
  if (const auto* p = std::get_if<ModelIIIParams>(&c.model))
    os << "f0=" << fmt(p->f0) << "\nbeta0=" << fmt(p->beta0) << "\nrho0=" << fmt(p->rho0) << "\nH1=" << fmt(p->H1)
       << "\nH2=" << fmt(p->H2) << "\nH3=" << fmt(p->H3) << "\ngp1=" << fmt(p->gp1) << "\ngp2=" << fmt(p->gp2)
       << "\nA_H=" << fmt(p->A_H) << "\ntau0=" << fmt(p->tau0) << "\nmu0=" << fmt(p->mu0) << "\nalpha=" << fmt(p->alpha)
       << "\n";
  os << "# reduction\n";
  if (const auto* r = std::get_if<ModelIReduction>(&c.reduction))
    os << "mu1=" << fmt(r->mu1) << "\nmu2=" << fmt(r->mu2) << "\nmu3=" << fmt(r->mu3) << "\nmu4=" << fmt(r->mu4) << "\n";
  if (const auto* r = std::get_if<ModelIIReduction>(&c.reduction))
    os << "sigma1=" << fmt(r->sigma1) << "\nsigma2=" << fmt(r->sigma2) << "\n";
  if (const auto* r = std::get_if<ModelIIIReduction>(&c.reduction))
    os << "kappa1=" << fmt(r->kappa1) << "\nkappa2=" << fmt(r->kappa2) << "\nkappa3=" << fmt(r->kappa3) << "\n";
  os << "s0=" << fmt(c.s0) << "\ns1=" << fmt(c.s1) << "\nh=" << fmt(c.h) << "\n";
  os << "# verification\n";
  os << "epsilon=" << fmt(c.epsilon) << "\nt_end=" << fmt(c.t_end) << "\n";
  if (c.kind != ModelKind::III) os << "cons_n=" << c.cons_n << "\n";
  return os.str();
}

}  // namespace qg
