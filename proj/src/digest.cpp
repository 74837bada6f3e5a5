#include "sentgrid/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

namespace sentgrid {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> raw{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), raw.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[raw[i] >> 4]);
    out.push_back(hex[raw[i] & 0x0f]);
  }
  return out;
}

}  // namespace sentgrid
