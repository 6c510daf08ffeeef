#pragma once

// Brute-force reference for fork detection and a pool of pre-signed blocks to
// draw random block sets from.

#include <map>
#include <random>
#include <utility>
#include <vector>

#include "support.hpp"
#include "wot/ledger.hpp"

namespace wot::testing {

using ConflictGroups = std::map<std::pair<PublicKey, std::uint64_t>, std::pair<Digest, Digest>>;

// Compares every pair of blocks. A group conflicts when two validly signed
// blocks share signer and sequence but differ in digest; its reported pair is
// the lexicographically smallest (digest a, digest b) with a < b.
inline ConflictGroups brute_force_conflicts(const std::vector<ledger::Block>& blocks) {
  // verification results memoised by digest; random sets reuse pool blocks
  static std::map<Digest, bool> verified;
  std::vector<Digest> digest;
  std::vector<bool> valid;
  for (const auto& b : blocks) {
    Bytes full = ledger::signed_bytes(b);
    Bytes whole = full;
    whole.insert(whole.end(), b.signature.bytes.begin(), b.signature.bytes.end());
    digest.push_back(sha256(whole));
    auto it = verified.find(digest.back());
    if (it == verified.end()) it = verified.emplace(digest.back(), verify(b.signer, full, b.signature)).first;
    valid.push_back(it->second);
  }
  ConflictGroups out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      const auto& x = blocks[i];
      const auto& y = blocks[j];
      if (x.signer != y.signer || x.sequence != y.sequence) continue;
      if (!(digest[i] < digest[j]) || !valid[i] || !valid[j]) continue;
      auto key = std::make_pair(x.signer, x.sequence);
      auto cand = std::make_pair(digest[i], digest[j]);
      auto it = out.find(key);
      if (it == out.end() || cand < it->second) out[key] = cand;
    }
  }
  return out;
}

inline ConflictGroups as_groups(const std::vector<ledger::ConflictProof>& proofs) {
  ConflictGroups out;
  for (const auto& p : proofs) {
    out[{p.a.signer, p.a.sequence}] = {ledger::block_digest(p.a), ledger::block_digest(p.b)};
  }
  return out;
}

// For every (signer, sequence): three distinct validly signed variants and
// one with a broken signature.
class BlockPool {
 public:
  static constexpr int kValidVariants = 3;

  BlockPool(int signers, int sequences) : sequences_(sequences) {
    std::mt19937_64 rng(1234);
    for (int s = 0; s < signers; ++s) {
      auto id = identity_for(static_cast<std::uint8_t>(100 + s));
      for (int q = 1; q <= sequences; ++q) {
        for (int v = 0; v <= kValidVariants; ++v) {
          ledger::Block b;
          b.signer = id.public_key();
          b.sequence = static_cast<std::uint64_t>(q);
          b.link_key = random_key(rng);
          if (q > 1) {
            for (auto& x : b.previous_hash) x = static_cast<std::uint8_t>(rng());
          }
          b.kind = ledger::BlockKind::Proposal;
          b.amount = 1 + rng() % 1000;
          b.signature = sign(id, ledger::signed_bytes(b));
          if (v == kValidVariants) b.amount += 1;
          blocks_.push_back(b);
        }
      }
    }
    signers_ = signers;
  }

  const ledger::Block& at(int signer, int seq, int variant) const {
    return blocks_[static_cast<std::size_t>(((signer * sequences_) + (seq - 1)) * (kValidVariants + 1) + variant)];
  }

  // Up to `max_blocks` blocks. Without forks every (signer, sequence) slot
  // uses only its first variant (possibly repeated) or the broken one.
  std::vector<ledger::Block> random_set(std::mt19937_64& rng, std::size_t max_blocks, bool forks) const {
    std::size_t n = rng() % (max_blocks + 1);
    int signers = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(signers_));
    std::vector<ledger::Block> out;
    for (std::size_t i = 0; i < n; ++i) {
      int s = static_cast<int>(rng() % static_cast<std::uint64_t>(signers));
      int q = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(sequences_));
      int v = 0;
      auto roll = rng() % 10;
      if (roll == 0) {
        v = kValidVariants;
      } else if (forks && roll < 4) {
        v = 1 + static_cast<int>(rng() % 2);
      }
      out.push_back(at(s, q, v));
    }
    return out;
  }

 private:
  int signers_ = 0;
  int sequences_;
  std::vector<ledger::Block> blocks_;
};

}  // namespace wot::testing
