#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fracflow::cli {

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// Reproducibility record written next to every command's outputs.
class RunManifest {
 public:
  RunManifest(std::string command, nlohmann::json config, std::uint64_t root_seed, std::uint64_t stage_seed);

  void add_input(const std::string& path);
  /// Hashes every regular file under `dir` (sorted, recursive) as outputs.
  void add_outputs(const std::string& dir);

  /// Times a named stage; the timer stops when the guard is destroyed.
  class Timer {
   public:
    Timer(RunManifest& m, std::string stage) : m_(m), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
    ~Timer();
    Timer(const Timer&) = delete;
    Timer& operator=(const Timer&) = delete;

   private:
    RunManifest& m_;
    std::string stage_;
    std::chrono::steady_clock::time_point start_;
  };
  Timer time(std::string stage) { return Timer(*this, std::move(stage)); }

  nlohmann::json to_json() const;
  void write(const std::string& dir) const;

 private:
  std::string command_;
  nlohmann::json config_;
  std::uint64_t root_seed_;
  std::uint64_t stage_seed_;
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json outputs_ = nlohmann::json::array();
  nlohmann::json timings_ = nlohmann::json::object();
};

inline constexpr const char* kManifestFile = "manifest.json";

}  // namespace fracflow::cli
