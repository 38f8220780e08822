#pragma once

#include <map>
#include <string>
#include <vector>

#include "polyfk/timestepper.hpp"

namespace polyfk {

// Flat `key = value` configuration with [section] headers and # comments.
class ConfigFile {
public:
  static ConfigFile load(const std::string &path);
  static ConfigFile parse(std::istream &in, const std::string &name);

  bool has(const std::string &section, const std::string &key) const;
  std::string get(const std::string &section, const std::string &key) const;
  std::string get_or(const std::string &section, const std::string &key,
                     const std::string &fallback) const;
  double get_double(const std::string &section, const std::string &key, double fallback) const;
  double require_double(const std::string &section, const std::string &key) const;
  int get_int(const std::string &section, const std::string &key, int fallback) const;
  bool get_bool(const std::string &section, const std::string &key, bool fallback) const;

  // Keys of one section in file order (for repeated-prefix keys like region*).
  std::vector<std::pair<std::string, std::string>> section_entries(
      const std::string &section) const;

  const std::string &name() const { return name_; }
  void echo(std::ostream &out) const;

private:
  std::string name_;
  std::map<std::string, std::map<std::string, std::string>> values_;
  std::vector<std::tuple<std::string, std::string, std::string>> ordered_;
};

enum class RunMode { convergence, wave, simulate };

// Executes the run described by a config file, writing all artifacts into
// the configured output directory. Returns the process exit status
// (0 success; errors raise: ParseError=2, TopologyError=3, SolverError=4
// mapped by the CLI).
int run_config(const std::string &config_path);

// Pieces reused by the CLI `mesh`/`oracle` subcommands.
PolyMesh build_mesh_from_config(const ConfigFile &cfg);
ModelParams build_model_from_config(const ConfigFile &cfg, const PolyMesh &mesh);
StepperConfig build_stepper_from_config(const ConfigFile &cfg);

} // namespace polyfk
