#include "outputs.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cli {

std::string format_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) {
  row(std::move(header));
}

void Csv::row(std::vector<std::string> cells) {
  if (cells.size() != columns_)
    throw std::logic_error("csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) body_ += ',';
    body_ += cells[i];
  }
  body_ += '\n';
}

namespace {

std::string iso_utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[24];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void dump_to_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

Manifest::Manifest(std::filesystem::path out_dir, std::string command,
                   nlohmann::json config_echo, std::uint64_t seed)
    : out_dir_(std::move(out_dir)) {
  std::filesystem::create_directories(out_dir_);
  doc_["tool"] = {{"name", "chernoff"}, {"version", CHERNOFF_VERSION}};
  doc_["command"] = std::move(command);
  doc_["status"] = "ok";
  doc_["started"] = iso_utc_now();
  doc_["seed"] = seed;
  doc_["config"] = std::move(config_echo);
  doc_["outputs"] = nlohmann::json::array();
  doc_["results"] = nlohmann::json::object();
}

std::string Manifest::write_text(const std::string& name, std::string_view bytes) {
  dump_to_file(out_dir_ / name, bytes);
  std::string checksum = fnv1a64_hex(bytes);
  doc_["outputs"].push_back(
      {{"file", name}, {"bytes", bytes.size()}, {"fnv1a64", checksum}});
  return checksum;
}

std::string Manifest::write_wavefunction(const std::string& name,
                                         const chernoff::WaveFunction& f) {
  std::ostringstream os(std::ios::binary);
  chernoff::write_wf(f, os);
  return write_text(name, os.str());
}

void Manifest::fail(const std::string& message) {
  doc_["status"] = "failed";
  doc_["error"] = message;
}

void Manifest::finish() {
  doc_["finished"] = iso_utc_now();
  dump_to_file(out_dir_ / "manifest.json", doc_.dump(2) + "\n");
}

}  // namespace cli
