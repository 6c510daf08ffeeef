#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "wot/bytes.hpp"
#include "wot/identity.hpp"
#include "wot/peer.hpp"

namespace wot::testing {

// 32 copies of `n`; n = 0 is the all-zero seed.
inline Identity identity_for(std::uint8_t n) {
  Bytes seed(kSeedSize, n);
  return generate_identity(seed);
}

inline Identity identity_from_rng(std::mt19937_64& rng) {
  Bytes seed(kSeedSize);
  for (auto& b : seed) b = static_cast<std::uint8_t>(rng());
  return generate_identity(seed);
}

inline PublicKey random_key(std::mt19937_64& rng) {
  PublicKey k;
  for (auto& b : k.bytes) b = static_cast<std::uint8_t>(rng());
  return k;
}

inline peer::Peer make_peer(std::uint8_t n, std::uint64_t balance = 10000, peer::PeerPolicy policy = {}) {
  return peer::Peer(identity_for(n), balance, policy);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string golden_path(const std::string& name) { return std::string(WOT_GOLDEN_DIR) + "/" + name; }

// key=value lines from tests/golden/vectors.txt.
inline const std::map<std::string, std::string>& vectors() {
  static const std::map<std::string, std::string> v = [] {
    std::map<std::string, std::string> out;
    std::istringstream in(read_file(golden_path("vectors.txt")));
    std::string line;
    while (std::getline(in, line)) {
      auto eq = line.find('=');
      if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
  }();
  return v;
}

inline Bytes vector_bytes(const std::string& name) { return from_hex(vectors().at(name)); }

}  // namespace wot::testing
