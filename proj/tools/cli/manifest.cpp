#include "manifest.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "fracflow/error.hpp"
#include "fracflow/table_io.hpp"

namespace fracflow::cli {

namespace fs = std::filesystem;

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0 && EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount())) != 1)
      throw Error("sha256 update failed");
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) throw Error("sha256 final failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

RunManifest::RunManifest(std::string command, nlohmann::json config, std::uint64_t root_seed, std::uint64_t stage_seed)
    : command_(std::move(command)), config_(std::move(config)), root_seed_(root_seed), stage_seed_(stage_seed) {}

RunManifest::Timer::~Timer() {
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  m_.timings_[stage_] = ms;
}

void RunManifest::add_input(const std::string& path) {
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(path))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) inputs_.push_back({{"path", f.string()}, {"sha256", sha256_file(f.string())}});
    return;
  }
  inputs_.push_back({{"path", path}, {"sha256", sha256_file(path)}});
}

void RunManifest::add_outputs(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != kManifestFile) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files)
    outputs_.push_back({{"path", fs::relative(f, dir).generic_string()}, {"sha256", sha256_file(f.string())}});
}

nlohmann::json RunManifest::to_json() const {
  return {{"schema_version", kSchemaVersion},
          {"command", command_},
          {"config", config_},
          {"seeds", {{"root", root_seed_}, {"stage", stage_seed_}}},
          {"inputs", inputs_},
          {"outputs", outputs_},
          {"timings_ms", timings_}};
}

void RunManifest::write(const std::string& dir) const { write_json(to_json(), (fs::path(dir) / kManifestFile).string()); }

}  // namespace fracflow::cli
