#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qg/models.hpp"
#include "qg/reduction.hpp"

namespace qg {

/// One key=value pair and where it came from ("line 3", "--seed").
struct ConfigEntry {
  std::string key;
  std::string value;
  std::string origin;
};

struct RunConfig {
  std::string command;  // simulate | reduce | verify-symmetry | verify-conservation | params
  ModelKind kind = ModelKind::II;
  std::string preset;   // default | unit (I, II); table1 (III)
  ModelSpec model;      // resolved constants
  int nx = 64, ny = 64;
  double lx = 0.0, ly = 0.0;  // periodic domain (I, II); resolved from the preset when zero
  double dt = 0.0;            // zero: CFL estimate
  std::int64_t nsteps = 100;
  std::int64_t output_every = 10;
  std::string init;           // random | rest; default random (I, II), rest (III)
  int kmax = 2;
  double amplitude = 0.0;     // zero: 1 (unit preset) or 1e4 m^2/s
  std::uint64_t seed = 1;
  std::string out = "out";
  ReductionSpec reduction;
  double s0 = 0.0, s1 = 0.0, h = 0.0;  // s0 = s1: model default range; h = 0: 2000 steps
  double epsilon = 0.1;
  double t_end = 0.0;  // symmetry run length; zero: suite default
  int cons_n = 128;

  Grid grid() const;
};

/// Splits text into entries; "#" starts a comment, several pairs may share a line.
std::vector<ConfigEntry> tokenize_config(const std::string& text);

/// Applies entries in order over the defaults (later entries win). Unknown keys, values that do not
/// parse, keys of another model and violated model invariants are rejected naming key and origin.
RunConfig resolve_config(const std::vector<ConfigEntry>& entries);

RunConfig parse_config(const std::string& text);

/// Every resolved field; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& c);

}  // namespace qg
