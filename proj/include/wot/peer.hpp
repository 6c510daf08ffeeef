#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wot/identity.hpp"
#include "wot/ledger.hpp"
#include "wot/trust.hpp"
#include "wot/wire.hpp"

namespace wot::peer {

struct PeerPolicy {
  bool segment_exchange = true;
  std::size_t segment_length = 20;
  bool direct_increment = false;
  // Scenario choice: abort a payment whose proactive check surfaced a conflict.
  bool refuse_on_conflict = false;
  int decay_per_round = 0;
  trust::BandThresholds thresholds;
  trust::PenaltyPolicy penalty;
  wire::TransferParams transfer;
};

void validate(const PeerPolicy& policy);

class Peer {
 public:
  // `cipher` defaults to a shared TestCipher.
  Peer(Identity identity, std::uint64_t initial_balance, PeerPolicy policy = {},
       std::shared_ptr<const Cipher> cipher = nullptr);

  const Identity& identity() const { return identity_; }
  const PublicKey& key() const { return identity_.public_key(); }
  const PeerPolicy& policy() const { return policy_; }
  const Cipher& cipher() const { return *cipher_; }

  ledger::Chain& chain() { return chain_; }
  const ledger::Chain& chain() const { return chain_; }
  trust::TrustStore& store() { return store_; }
  const trust::TrustStore& store() const { return store_; }
  const std::vector<trust::HistoryEntry>& history() const { return history_; }
  void record(const trust::HistoryEntry& entry) { history_.push_back(entry); }

  std::int64_t balance() const { return chain_.balance(); }

  const std::map<PublicKey, ledger::ConflictProof>& known_proofs() const { return proofs_; }

  // Verifies the proof, penalises its offender and keeps it for gossip.
  // Returns true if this is the first proof held against that offender.
  // Proofs against the peer itself are ignored.
  bool learn_proof(const ledger::ConflictProof& proof, std::uint64_t round);

  // identity, balance, chain length, embedded store CSV and own blocks.
  std::string dump_json() const;

 private:
  Identity identity_;
  PeerPolicy policy_;
  std::shared_ptr<const Cipher> cipher_;
  ledger::Chain chain_;
  trust::TrustStore store_;
  std::vector<trust::HistoryEntry> history_;
  std::map<PublicKey, ledger::ConflictProof> proofs_;
};

struct Detection {
  PublicKey detector;
  ledger::ConflictProof proof;
};

struct CheckResult {
  trust::TrustBand band = trust::TrustBand::NoInfo;
  std::vector<ledger::ConflictProof> conflicts;
  std::size_t invalid_blocks = 0;
};

// Validates every presented block against the peer's local knowledge. Clean
// blocks are remembered, conflicts penalise their signer before the
// counterparty's band is read.
CheckResult proactive_check(Peer& peer, const PublicKey& counterparty,
                            std::span<const ledger::Block> presented, std::uint64_t round);

struct EncounterOutcome {
  bool paid = false;
  std::optional<ErrorCode> failure;
  std::string failure_message;

  trust::TrustBand proactive_band = trust::TrustBand::NoInfo;  // sender's view of receiver
  trust::TrustBand payer_band = trust::TrustBand::NoInfo;      // receiver's view of sender
  std::vector<ledger::ConflictProof> conflicts_found;
  std::vector<Detection> detections;
  std::size_t invalid_blocks = 0;
  std::size_t proofs_learned = 0;  // through proof gossip

  std::size_t list_size = 0;
  bool list_delivered = false;
  trust::ContactList delivered_list;  // as decoded by the receiver
  std::optional<std::string> list_error;
  trust::UpdateSummary list_update;

  std::uint64_t list_bytes = 0;     // packets on the wire for the sealed contact list
  std::uint64_t segment_bytes = 0;  // evidence blocks and proofs, both directions
  std::uint64_t bytes_transferred = 0;
};

// Carries a proposal the sender has built to the receiver and runs the rest
// of the encounter: proactive check of `presented` plus the proposal,
// agreement, contact-list transfer sender -> receiver, then (policy
// permitting) evidence exchange in both directions. The proposal is appended
// to the sender's chain only if it extends it, so forged forks leave the
// adversary's chain untouched.
EncounterOutcome complete_payment(Peer& sender, Peer& receiver, const ledger::Block& proposal,
                                  std::span<const ledger::Block> presented, std::uint64_t round,
                                  wire::PacketChannel& channel);

// Honest payment. Insufficient balance or a zero amount aborts before any
// block is written (reported in the outcome, not thrown).
EncounterOutcome transact(Peer& sender, Peer& receiver, std::uint64_t amount, std::uint64_t round,
                          wire::PacketChannel& channel);

// Two validly signed proposals sharing the adversary's next sequence number,
// one per victim. Neither is appended; complete_payment appends the first.
std::pair<ledger::Block, ledger::Block> adversary_double_spend(
    Peer& adversary, const PublicKey& first_victim, const PublicKey& second_victim,
    std::uint64_t amount);

struct BoostResult {
  trust::TrustScore score_of_first;   // target's score for the first accomplice
  trust::TrustScore score_of_second;  // target's score for the second accomplice
  std::vector<EncounterOutcome> outcomes;
};

// The accomplices alternate `repetitions` payments between each other (first
// pays second on even steps), then each pays `target` once.
BoostResult adversary_cycle_boost(Peer& first, Peer& second, std::size_t repetitions, Peer& target,
                                  std::uint64_t amount, std::uint64_t round,
                                  wire::PacketChannel& channel);

}  // namespace wot::peer
