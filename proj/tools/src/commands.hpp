#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_numerical = 2;
inline constexpr int exit_property = 3;

struct CommonArgs {
  std::filesystem::path config_path;
  std::vector<std::string> overrides;
  std::filesystem::path out_dir = ".";
  std::size_t jobs = 1;
  bool inject_broken_shift = false;  // verify only
};

int cmd_evolve(const CommonArgs& args);
int cmd_verify(const CommonArgs& args);
int cmd_converge(const CommonArgs& args);
int cmd_compare(const CommonArgs& args);

}  // namespace cli
