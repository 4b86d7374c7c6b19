#include <string>

#include "doctest.h"
#include "qg/config.hpp"
#include "qg/error.hpp"

using namespace qg;

namespace {
std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return {};
}
}  // namespace

TEST_CASE("config defaults") {
  const RunConfig c = parse_config("command=simulate model=II");
  CHECK(c.command == "simulate");
  CHECK(c.kind == ModelKind::II);
  CHECK(std::get<ModelIIParams>(c.model).lambda == 1.0e5);
  const Grid g = c.grid();
  CHECK(g.nx == 64);
  CHECK(g.ny == 64);
  CHECK(g.topology == Topology::periodic);
  CHECK(c.dt == 0.0);  // CFL estimate

  const RunConfig t = parse_config("command=params\nmodel=III preset=table1\n");
  CHECK(std::get<ModelIIIParams>(t.model).L == doctest::Approx(1.2566e6).epsilon(1e-4));
  CHECK(t.grid().topology == Topology::basin);
}

TEST_CASE("config rejections name key and line") {
  const std::string e1 = error_of("command=simulate\nmodel=I\nbogus=3\n");
  CHECK(e1.find("bogus") != std::string::npos);
  CHECK(e1.find("line 3") != std::string::npos);

  const std::string e2 = error_of("command=simulate model=II\n\nnx=abc");
  CHECK(e2.find("nx") != std::string::npos);
  CHECK(e2.find("line 3") != std::string::npos);

  const std::string e3 = error_of("command=simulate model=I rho1=2 rho2=1");
  CHECK(e3.find("rho1") != std::string::npos);
  CHECK(e3.find("line 1") != std::string::npos);

  CHECK(error_of("command=simulate model=II rho1=2").find("does not apply") != std::string::npos);
  CHECK(error_of("model=II").find("command") != std::string::npos);
  CHECK(error_of("command=simulate").find("model") != std::string::npos);
  CHECK(error_of("command=fly model=II").find("unknown command") != std::string::npos);
  CHECK(error_of("command=simulate model=III preset=unit").find("preset") != std::string::npos);
  CHECK(error_of("command=simulate model=II seed=-1").find("seed") != std::string::npos);
  CHECK(error_of("command=simulate model=II output_every=0").find("output_every") != std::string::npos);
}

TEST_CASE("config comments, overrides and round trip") {
  const RunConfig c = parse_config("# run\ncommand=reduce model=I preset=unit  # inline\nmu2=0.25 nx=32\nnx=48\n");
  CHECK(c.nx == 48);
  CHECK(std::get<ModelIReduction>(c.reduction).mu2 == 0.25);
  CHECK(std::get<ModelIReduction>(c.reduction).params.rho2 == 2.0);

  for (const char* text : {"command=reduce model=I preset=unit mu2=0.25 dt=0.1",
                           "command=verify-symmetry model=II lambda=0.7 seed=18446744073709551615 epsilon=0.05",
                           "command=simulate model=III tau0=0.2 alpha=0.5 nsteps=3 init=rest",
                           "command=verify-conservation model=I rho1=1000.5 cons_n=64 out=/tmp/x"}) {
    const RunConfig a = parse_config(text);
    const std::string s = serialize_config(a);
    const RunConfig b = parse_config(s);
    CHECK(serialize_config(b) == s);
    CHECK(b.seed == a.seed);
    CHECK(b.out == a.out);
    CHECK(b.grid().same_as(a.grid()));
  }
  const RunConfig big = parse_config("command=params model=II seed=18446744073709551615");
  CHECK(big.seed == 18446744073709551615ull);
  // Model III L follows tau0 and mu0
  const RunConfig m3 = parse_config("command=params model=III tau0=0.2");
  CHECK(std::get<ModelIIIParams>(m3.model).L == doctest::Approx(2 * 1.2566e6).epsilon(1e-4));
}
