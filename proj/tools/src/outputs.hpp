#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <chernoff/grid.hpp>

#include "json.hpp"

namespace cli {

// Full-precision scientific notation (17 significant digits), locale-free.
std::string format_sci(double v);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

// Minimal CSV assembler. Cells are preformatted strings; numeric columns go
// through format_sci so two runs with equal values are byte-identical.
class Csv {
public:
  explicit Csv(std::vector<std::string> header);
  void row(std::vector<std::string> cells);
  const std::string& bytes() const { return body_; }

private:
  std::string body_;
  std::size_t columns_;
};

// Accumulates emitted files and their checksums, then writes manifest.json.
// One writer per run directory; all writes happen on the calling thread.
class Manifest {
public:
  Manifest(std::filesystem::path out_dir, std::string command,
           nlohmann::json config_echo, std::uint64_t seed);

  // Serialize + write one artifact, record {file, bytes, fnv1a64}; returns
  // the checksum hex string.
  std::string write_text(const std::string& name, std::string_view bytes);
  std::string write_wavefunction(const std::string& name, const chernoff::WaveFunction& f);

  nlohmann::json& results() { return doc_["results"]; }
  void fail(const std::string& message);
  // Stamps the finish time and writes manifest.json.
  void finish();

  const std::filesystem::path& dir() const { return out_dir_; }

private:
  std::filesystem::path out_dir_;
  nlohmann::json doc_;
};

}  // namespace cli
