#include "simcal/digest.hpp"

#include <array>
#include <cstdio>

#include <openssl/evp.h>

#include "simcal/error.hpp"

namespace simcal {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0x0F]);
  }
  return out;
}

std::string pairs_digest(std::span<const ScoredPair> pairs) {
  std::string canon;
  char buf[96];
  for (const auto& p : pairs) {
    canon += p.id;
    std::snprintf(buf, sizeof(buf), "\t%.17g\t%.17g\n", p.model_score, p.human_score);
    canon += buf;
  }
  return "sha256:" + sha256_hex(canon);
}

}  // namespace simcal
