#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "deforma/regions.hpp"

namespace deforma::cli {

/// Defaults shared by every subcommand; a --config JSON file overrides
/// these, explicit flags override the file.
struct Config {
  double sigma = 6.0;
  int n = 3;
  double lambda = 0.01;
  std::string merge = "max";
  bool symmetry = true;
  std::vector<int> head_joints = {0, 1, 14, 15, 16, 17};
  std::vector<int> torso_anchor_joints = {2, 5, 8, 11};
  double min_confidence = 0.05;

  RegionConfig region_config() const;
  /// Throws DomainError on out-of-range values.
  void validate() const;
};

Config load_config(const std::string& path);

/// Runs one subcommand. Returns 0 on success, 1 on a library error and 2 on
/// a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace deforma::cli
