#pragma once

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace crystalpr::cli {

inline std::string sha256_hex(const std::string& data)
{
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& p)
{
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

/// Collects written files and emits manifest.json next to them.
class Manifest {
public:
  explicit Manifest(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  void write(const std::string& name, const std::string& content)
  {
    std::filesystem::create_directories(dir_);
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << content;
    out.close();
    files_.push_back(name);
  }

  void finish(const nlohmann::json& spec, const nlohmann::json& seed, const std::string& rng, const nlohmann::json& versions)
  {
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& f : files_) outputs.push_back({{"path", f}, {"sha256", sha256_hex(read_file(dir_ / f))}});
    nlohmann::json m{{"spec", spec}, {"seed", seed}, {"rng", rng}, {"outputs", outputs}, {"versions", versions}};
    std::filesystem::create_directories(dir_);
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << m.dump(2) << '\n';
  }

private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

}  // namespace crystalpr::cli
