#include "wot/ledger.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

namespace wot::ledger {
namespace {

bool is_zero(const Digest& d) {
  return std::all_of(d.begin(), d.end(), [](std::uint8_t b) { return b == 0; });
}

}  // namespace

const char* to_string(BlockKind kind) {
  return kind == BlockKind::Proposal ? "proposal" : "agreement";
}

Bytes signed_bytes(const Block& block) {
  Bytes out;
  out.reserve(kSignedBlockSize);
  put_bytes(out, block.signer.bytes);
  put_u64(out, block.sequence);
  put_bytes(out, block.link_key.bytes);
  put_u64(out, block.link_sequence);
  put_bytes(out, block.previous_hash);
  put_u8(out, static_cast<std::uint8_t>(block.kind));
  put_u64(out, block.amount);
  return out;
}

Bytes encode_block(const Block& block) {
  Bytes out = signed_bytes(block);
  put_bytes(out, block.signature.bytes);
  return out;
}

Block decode_block(ByteView data) {
  if (data.size() != kBlockSize) {
    throw Error(ErrorCode::Length, "block must be 269 octets, got " + std::to_string(data.size()),
                data.size());
  }
  ByteReader r(data);
  Block b;
  b.signer.bytes = r.array<kPublicKeySize>();
  b.sequence = r.u64();
  b.link_key.bytes = r.array<kPublicKeySize>();
  b.link_sequence = r.u64();
  b.previous_hash = r.array<kDigestSize>();
  auto kind = r.u8();
  if (kind != 1 && kind != 2) {
    throw Error(ErrorCode::Malformed, "unknown block kind " + std::to_string(kind), r.offset() - 1);
  }
  b.kind = static_cast<BlockKind>(kind);
  b.amount = r.u64();
  b.signature.bytes = r.array<kSignatureSize>();
  return b;
}

Digest block_digest(const Block& block) { return sha256(encode_block(block)); }

bool signature_valid(const Block& block) {
  // Verified-good digests; a block's validity depends only on its bytes.
  thread_local std::set<Digest> verified;
  auto digest = block_digest(block);
  if (verified.contains(digest)) return true;
  if (!verify(block.signer, signed_bytes(block), block.signature)) return false;
  if (verified.size() >= (1u << 20)) verified.clear();
  verified.insert(digest);
  return true;
}

void check_well_formed(const Block& block) {
  if (block.sequence == 0) throw Error(ErrorCode::Malformed, "sequence must be >= 1");
  if ((block.sequence == 1) != is_zero(block.previous_hash)) {
    throw Error(ErrorCode::Malformed, "previous_hash must be all-zero exactly at sequence 1");
  }
  if (block.kind == BlockKind::Proposal) {
    if (block.amount == 0) throw Error(ErrorCode::Malformed, "proposal amount must be > 0");
    if (block.link_sequence != 0) throw Error(ErrorCode::Malformed, "proposal link_sequence must be 0");
  } else if (block.link_sequence == 0) {
    throw Error(ErrorCode::Malformed, "agreement must link a proposal sequence");
  }
  if (!signature_valid(block)) throw Error(ErrorCode::BadSignature, "block signature does not verify");
}

std::string block_to_json(const Block& block) {
  nlohmann::ordered_json j;
  j["signer"] = encode_key_hex(block.signer);
  j["sequence"] = block.sequence;
  j["link_key"] = encode_key_hex(block.link_key);
  j["link_sequence"] = block.link_sequence;
  j["previous_hash"] = to_hex(block.previous_hash);
  j["kind"] = to_string(block.kind);
  j["amount"] = block.amount;
  j["signature"] = to_hex(block.signature.bytes);
  j["digest"] = to_hex(block_digest(block));
  return j.dump();
}

Block block_from_json(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("block json: ") + e.what());
  }
  try {
    Block b;
    b.signer = decode_key_hex(j.at("signer").get<std::string>());
    b.sequence = j.at("sequence").get<std::uint64_t>();
    b.link_key = decode_key_hex(j.at("link_key").get<std::string>());
    b.link_sequence = j.at("link_sequence").get<std::uint64_t>();
    auto prev = from_hex(j.at("previous_hash").get<std::string>());
    if (prev.size() != kDigestSize) throw Error(ErrorCode::Length, "previous_hash must be 32 octets");
    std::copy(prev.begin(), prev.end(), b.previous_hash.begin());
    auto kind = j.at("kind").get<std::string>();
    if (kind == "proposal") {
      b.kind = BlockKind::Proposal;
    } else if (kind == "agreement") {
      b.kind = BlockKind::Agreement;
    } else {
      throw Error(ErrorCode::Parse, "unknown block kind '" + kind + "'");
    }
    b.amount = j.at("amount").get<std::uint64_t>();
    auto sig = from_hex(j.at("signature").get<std::string>());
    if (sig.size() != kSignatureSize) throw Error(ErrorCode::Length, "signature must be 64 octets");
    std::copy(sig.begin(), sig.end(), b.signature.bytes.begin());
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("block json: ") + e.what());
  }
}

std::optional<ConflictProof> make_conflict(const Block& x, const Block& y) {
  if (x.signer != y.signer || x.sequence != y.sequence) return std::nullopt;
  auto dx = block_digest(x);
  auto dy = block_digest(y);
  if (dx == dy) return std::nullopt;
  return dx < dy ? ConflictProof{x, y} : ConflictProof{y, x};
}

bool verify_conflict(const ConflictProof& proof) {
  if (proof.a.signer != proof.b.signer || proof.a.sequence != proof.b.sequence) return false;
  if (!(block_digest(proof.a) < block_digest(proof.b))) return false;
  return signature_valid(proof.a) && signature_valid(proof.b);
}

Chain::Chain(PublicKey owner, std::uint64_t initial_balance)
    : owner_(owner),
      initial_balance_(initial_balance),
      balance_(static_cast<std::int64_t>(initial_balance)) {}

Digest Chain::head_digest() const {
  return blocks_.empty() ? Digest{} : block_digest(blocks_.back());
}

const Block* Chain::find(const PublicKey& signer, std::uint64_t sequence) const {
  if (signer == owner_) {
    if (sequence == 0 || sequence > blocks_.size()) return nullptr;
    return &blocks_[sequence - 1];
  }
  auto it = foreign_.find({signer, sequence});
  return it == foreign_.end() ? nullptr : &it->second;
}

bool Chain::observe(const Block& block) {
  if (block.signer == owner_) return false;
  return foreign_.try_emplace({block.signer, block.sequence}, block).second;
}

void Chain::append(const Block& block) {
  if (block.signer != owner_ || block.sequence != next_sequence()) {
    throw Error(ErrorCode::Malformed, "block does not extend this chain");
  }
  auto amount = static_cast<std::int64_t>(block.amount);
  balance_ += block.kind == BlockKind::Agreement ? amount : -amount;
  blocks_.push_back(block);
}

Block build_proposal(const Chain& chain, const Identity& identity, const PublicKey& counterparty,
                     std::uint64_t amount, std::uint64_t sequence) {
  if (amount == 0) throw Error(ErrorCode::ZeroAmount, "payment amount must be > 0");
  if (identity.public_key() != chain.owner()) {
    throw Error(ErrorCode::InvalidArgument, "identity does not own this chain");
  }
  if (sequence == 0 || sequence > chain.next_sequence()) {
    throw Error(ErrorCode::InvalidArgument, "sequence outside chain range");
  }
  Block b;
  b.signer = chain.owner();
  b.sequence = sequence;
  b.link_key = counterparty;
  b.link_sequence = 0;
  if (sequence > 1) b.previous_hash = block_digest(chain.blocks()[sequence - 2]);
  b.kind = BlockKind::Proposal;
  b.amount = amount;
  b.signature = sign(identity, signed_bytes(b));
  return b;
}

Block create_proposal(Chain& chain, const Identity& identity, const PublicKey& counterparty,
                      std::uint64_t amount, BalanceCheck check) {
  if (amount == 0) throw Error(ErrorCode::ZeroAmount, "payment amount must be > 0");
  if (counterparty == chain.owner()) {
    throw Error(ErrorCode::InvalidArgument, "cannot pay own key");
  }
  if (check == BalanceCheck::Enforce && chain.balance() < static_cast<std::int64_t>(amount)) {
    throw Error(ErrorCode::InsufficientBalance,
                "balance " + std::to_string(chain.balance()) + " below amount " + std::to_string(amount));
  }
  auto b = build_proposal(chain, identity, counterparty, amount, chain.next_sequence());
  chain.append(b);
  return b;
}

Block create_agreement(Chain& chain, const Identity& identity, const Block& proposal) {
  if (proposal.kind != BlockKind::Proposal) {
    throw Error(ErrorCode::Malformed, "can only agree to a proposal");
  }
  check_well_formed(proposal);
  if (proposal.link_key != chain.owner()) {
    throw Error(ErrorCode::Mislinked, "proposal is addressed to a different key");
  }
  if (identity.public_key() != chain.owner()) {
    throw Error(ErrorCode::InvalidArgument, "identity does not own this chain");
  }
  Block b;
  b.signer = chain.owner();
  b.sequence = chain.next_sequence();
  b.link_key = proposal.signer;
  b.link_sequence = proposal.sequence;
  b.previous_hash = chain.head_digest();
  b.kind = BlockKind::Agreement;
  b.amount = proposal.amount;
  b.signature = sign(identity, signed_bytes(b));
  chain.observe(proposal);
  chain.append(b);
  return b;
}

Validation validate_block(const Block& block, const Chain& local_view) {
  Validation v;
  const Block* known = local_view.find(block.signer, block.sequence);
  // Known blocks were validated on receipt.
  if (known && *known == block) return v;

  try {
    check_well_formed(block);
  } catch (const Error& e) {
    v.status = Validation::Status::Invalid;
    v.error = e.code();
    v.message = e.what();
    return v;
  }
  if (known) {
    v.status = Validation::Status::Conflict;
    v.proof = make_conflict(*known, block);
  }
  return v;
}

std::vector<ConflictProof> find_double_spends(std::span<const Block> blocks) {
  // (signer, sequence) -> distinct blocks keyed by digest
  std::map<std::pair<PublicKey, std::uint64_t>, std::map<Digest, const Block*>> groups;
  for (const auto& b : blocks) groups[{b.signer, b.sequence}].emplace(block_digest(b), &b);

  std::vector<ConflictProof> proofs;
  for (const auto& [key, group] : groups) {
    if (group.size() < 2) continue;
    std::vector<const Block*> valid;
    for (const auto& [digest, block] : group) {
      if (signature_valid(*block)) valid.push_back(block);
      if (valid.size() == 2) break;
    }
    if (valid.size() == 2) proofs.push_back(ConflictProof{*valid[0], *valid[1]});
  }
  return proofs;
}

std::vector<Block> chain_segment(const Chain& chain, std::size_t n) {
  const auto& own = chain.blocks();
  auto count = std::min(n, own.size());
  return {own.end() - static_cast<std::ptrdiff_t>(count), own.end()};
}

std::vector<Block> evidence_segment(const Chain& chain, std::size_t n) {
  auto own = chain_segment(chain, n);
  std::vector<Block> out;
  out.reserve(own.size() * 2);
  for (const auto& b : own) {
    if (b.kind == BlockKind::Agreement) {
      if (const Block* p = chain.find(b.link_key, b.link_sequence)) out.push_back(*p);
    }
    out.push_back(b);
  }
  return out;
}

}  // namespace wot::ledger
