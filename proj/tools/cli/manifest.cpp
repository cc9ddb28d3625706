#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "wwlab/simd/kernels.hpp"

#ifndef WWLAB_VERSION
#define WWLAB_VERSION "unknown"
#endif

namespace wwcli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("SHA-256 init failed");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char two[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(two, sizeof two, "%02x", md[i]);
    hex += two;
  }
  return hex;
}

nlohmann::ordered_json build_manifest(const std::filesystem::path& dir, const ManifestInput& in) {
  nlohmann::ordered_json m;
  m["tool"] = "wwlab";
  m["version"] = WWLAB_VERSION;
  m["simd"] = std::string(wwlab::simd::isa_name(wwlab::simd::active_isa()));
  if (in.config) {
    nlohmann::ordered_json cfg;
    for (const auto& [k, v] : as_map(*in.config)) cfg[k] = v;
    m["config"] = cfg;
  }
  m["aborted"] = in.aborted;
  if (in.aborted) {
    m["last_good_time"] = in.last_good_time;
    m["abort_reason"] = in.abort_reason;
  }
  if (!in.error.empty()) m["error"] = in.error;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const std::string& name : in.files) {
    const auto p = dir / name;
    nlohmann::ordered_json f;
    f["name"] = name;
    f["size"] = std::filesystem::file_size(p);
    f["sha256"] = sha256_file(p);
    files.push_back(f);
  }
  m["files"] = files;
  return m;
}

void write_manifest(const std::filesystem::path& dir, const ManifestInput& in) {
  const auto m = build_manifest(dir, in);
  std::ofstream os(dir / "manifest.json", std::ios::binary);
  os << m.dump(2) << '\n';
  if (!os) throw std::ios_base::failure("cannot write " + (dir / "manifest.json").string());
}

}  // namespace wwcli
