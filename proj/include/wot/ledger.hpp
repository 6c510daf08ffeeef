#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wot/error.hpp"
#include "wot/identity.hpp"

namespace wot::ledger {

enum class BlockKind : std::uint8_t { Proposal = 1, Agreement = 2 };

const char* to_string(BlockKind kind);

// One half of a pairwise transaction, recorded on the signer's own chain.
//
// Canonical layout (big-endian, fixed width, declaration order):
//   signer          74
//   sequence         8
//   link_key        74
//   link_sequence    8
//   previous_hash   32
//   kind             1
//   amount           8   (euro-cents)
//   signature       64   (over the preceding 205 octets)
struct Block {
  PublicKey signer;
  std::uint64_t sequence = 0;
  PublicKey link_key;
  std::uint64_t link_sequence = 0;
  Digest previous_hash{};
  BlockKind kind = BlockKind::Proposal;
  std::uint64_t amount = 0;
  Signature signature;

  bool operator==(const Block&) const = default;
};

inline constexpr std::size_t kSignedBlockSize = 205;
inline constexpr std::size_t kBlockSize = kSignedBlockSize + kSignatureSize;  // 269

Bytes signed_bytes(const Block& block);
Bytes encode_block(const Block& block);
Block decode_block(ByteView data);

Digest block_digest(const Block& block);

bool signature_valid(const Block& block);

// Checks the block's own shape: signature, sequence >= 1, previous_hash
// zero iff genesis, proposal amount > 0 and link_sequence == 0, agreement
// link_sequence >= 1. Throws Error(BadSignature | Malformed).
void check_well_formed(const Block& block);

std::string block_to_json(const Block& block);
Block block_from_json(const std::string& line);

// Two distinct validly signed blocks from one signer at one sequence.
// Canonical order: block_digest(a) < block_digest(b).
struct ConflictProof {
  Block a;
  Block b;

  const PublicKey& offender() const { return a.signer; }
  std::uint64_t sequence() const { return a.sequence; }
  bool operator==(const ConflictProof&) const = default;
};

std::optional<ConflictProof> make_conflict(const Block& x, const Block& y);

bool verify_conflict(const ConflictProof& proof);

// A node's own chain plus the foreign blocks it has observed.
class Chain {
 public:
  Chain(PublicKey owner, std::uint64_t initial_balance);

  const PublicKey& owner() const { return owner_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::uint64_t initial_balance() const { return initial_balance_; }

  // initial + agreements received - proposals sent. Signed because an
  // adversary that skips the balance check can go negative.
  std::int64_t balance() const { return balance_; }

  std::uint64_t next_sequence() const { return blocks_.size() + 1; }
  Digest head_digest() const;

  // Own block at `sequence`, or the first foreign block observed at
  // (signer, sequence).
  const Block* find(const PublicKey& signer, std::uint64_t sequence) const;

  // Records a foreign block. First-seen wins; own-key blocks are ignored.
  // Returns true if the block was new.
  bool observe(const Block& block);

  std::size_t foreign_count() const { return foreign_.size(); }
  const std::map<std::pair<PublicKey, std::uint64_t>, Block>& foreign() const { return foreign_; }

  // Used by create_proposal / create_agreement and by adversarial builders.
  void append(const Block& block);

 private:
  PublicKey owner_;
  std::uint64_t initial_balance_;
  std::int64_t balance_;
  std::vector<Block> blocks_;
  std::map<std::pair<PublicKey, std::uint64_t>, Block> foreign_;
};

// Builds and signs a proposal at the chain's next sequence without appending
// it. Used directly by adversaries to forge forks.
Block build_proposal(const Chain& chain, const Identity& identity, const PublicKey& counterparty,
                     std::uint64_t amount, std::uint64_t sequence);

enum class BalanceCheck { Enforce, Skip };

Block create_proposal(Chain& chain, const Identity& identity, const PublicKey& counterparty,
                      std::uint64_t amount, BalanceCheck check = BalanceCheck::Enforce);

Block create_agreement(Chain& chain, const Identity& identity, const Block& proposal);

struct Validation {
  enum class Status { Ok, Conflict, Invalid };

  Status status = Status::Ok;
  std::optional<ConflictProof> proof;
  std::optional<ErrorCode> error;
  std::string message;

  bool ok() const { return status == Status::Ok; }
};

// Proactive check of a single block against local knowledge.
Validation validate_block(const Block& block, const Chain& local_view);

// Retroactive scan: one proof per (signer, sequence) group holding two or more
// distinct validly signed blocks. Within a group the reported pair is the one
// with the two smallest digests. Output is ordered by (signer, sequence).
std::vector<ConflictProof> find_double_spends(std::span<const Block> blocks);

// Last min(n, length) own blocks, oldest first.
std::vector<Block> chain_segment(const Chain& chain, std::size_t n);

// chain_segment plus, for every agreement in it, the linked proposal when the
// chain has observed it. This is what peers hand each other as evidence.
std::vector<Block> evidence_segment(const Chain& chain, std::size_t n);

}  // namespace wot::ledger
