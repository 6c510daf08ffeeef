#include "wot/peer.hpp"

#include <json.hpp>

namespace wot::peer {
namespace {

std::shared_ptr<const Cipher> default_cipher() {
  static const auto cipher = std::make_shared<const TestCipher>();
  return cipher;
}

void note_detections(const Peer& detector, const CheckResult& check, EncounterOutcome& out) {
  for (const auto& proof : check.conflicts) {
    out.conflicts_found.push_back(proof);
    out.detections.push_back(Detection{detector.key(), proof});
  }
  out.invalid_blocks += check.invalid_blocks;
}

std::size_t share_proofs(const Peer& from, Peer& to, std::uint64_t round) {
  std::size_t learned = 0;
  for (const auto& [offender, proof] : from.known_proofs()) {
    if (to.learn_proof(proof, round)) ++learned;
  }
  return learned;
}

}  // namespace

void validate(const PeerPolicy& policy) {
  trust::validate(policy.thresholds);
  wire::validate(policy.transfer);
  if (policy.penalty.reset_score < 0 || policy.penalty.reset_score > trust::kMaxScore) {
    throw Error(ErrorCode::Config, "penalty score must be in [0, 100]");
  }
  if (policy.decay_per_round < 0) throw Error(ErrorCode::Config, "decay_per_round must be >= 0");
}

Peer::Peer(Identity identity, std::uint64_t initial_balance, PeerPolicy policy,
           std::shared_ptr<const Cipher> cipher)
    : identity_(std::move(identity)),
      policy_(policy),
      cipher_(cipher ? std::move(cipher) : default_cipher()),
      chain_(identity_.public_key(), initial_balance),
      store_(identity_.public_key(), policy.thresholds, policy.penalty) {
  validate(policy_);
}

bool Peer::learn_proof(const ledger::ConflictProof& proof, std::uint64_t round) {
  if (proof.offender() == key()) return false;
  if (proofs_.contains(proof.offender())) return false;
  store_.apply_penalty(proof.offender(), proof, round);
  proofs_.emplace(proof.offender(), proof);
  return true;
}

std::string Peer::dump_json() const {
  nlohmann::ordered_json j;
  j["identity"] = encode_key_hex(key());
  j["balance"] = balance();
  j["initial_balance"] = chain_.initial_balance();
  j["chain_length"] = chain_.blocks().size();
  j["store_csv"] = store_.to_csv();
  auto blocks = nlohmann::ordered_json::array();
  for (const auto& b : chain_.blocks()) blocks.push_back(nlohmann::ordered_json::parse(ledger::block_to_json(b)));
  j["blocks"] = std::move(blocks);
  auto offenders = nlohmann::ordered_json::array();
  for (const auto& [offender, proof] : proofs_) offenders.push_back(encode_key_hex(offender));
  j["flagged_offenders"] = std::move(offenders);
  return j.dump(2);
}

CheckResult proactive_check(Peer& peer, const PublicKey& counterparty,
                            std::span<const ledger::Block> presented, std::uint64_t round) {
  CheckResult result;
  for (const auto& block : presented) {
    auto v = ledger::validate_block(block, peer.chain());
    switch (v.status) {
      case ledger::Validation::Status::Ok:
        peer.chain().observe(block);
        break;
      case ledger::Validation::Status::Invalid:
        ++result.invalid_blocks;
        break;
      case ledger::Validation::Status::Conflict:
        if (v.proof && v.proof->offender() != peer.key()) {
          peer.learn_proof(*v.proof, round);
          result.conflicts.push_back(*v.proof);
        }
        break;
    }
  }
  result.band = peer.store().band(counterparty);
  return result;
}

EncounterOutcome complete_payment(Peer& sender, Peer& receiver, const ledger::Block& proposal,
                                  std::span<const ledger::Block> presented, std::uint64_t round,
                                  wire::PacketChannel& channel) {
  EncounterOutcome out;
  auto fail = [&](const Error& e) {
    out.failure = e.code();
    out.failure_message = e.what();
    return out;
  };
  if (proposal.signer != sender.key()) {
    return fail(Error(ErrorCode::InvalidArgument, "proposal not signed by the paying peer"));
  }
  const bool extends = proposal.sequence == sender.chain().next_sequence();
  if (!extends && proposal.sequence > sender.chain().next_sequence()) {
    return fail(Error(ErrorCode::Malformed, "proposal skips sequence numbers"));
  }

  out.proactive_band = sender.store().band(receiver.key());
  auto list = trust::recent_counterparties(sender.history(), sender.key());

  std::vector<ledger::Block> shown(presented.begin(), presented.end());
  shown.push_back(proposal);
  auto check = proactive_check(receiver, sender.key(), shown, round);
  note_detections(receiver, check, out);
  out.payer_band = check.band;
  out.segment_bytes += presented.size() * ledger::kBlockSize;

  if (!check.conflicts.empty() && receiver.policy().refuse_on_conflict) {
    return fail(Error(ErrorCode::InvalidProof, "payment refused: payer holds a conflicting block"));
  }

  try {
    ledger::create_agreement(receiver.chain(), receiver.identity(), proposal);
  } catch (const Error& e) {
    return fail(e);
  }
  if (extends) sender.chain().append(proposal);
  out.paid = true;
  sender.record({round, receiver.key(), trust::Direction::Sent, proposal.amount});
  receiver.record({round, sender.key(), trust::Direction::Received, proposal.amount});
  if (receiver.policy().direct_increment) receiver.store().increment(sender.key(), round);

  // Contact list: sender -> receiver only.
  out.list_size = list.size();
  auto id = wire::message_id_for(sender.key(), proposal.sequence);
  auto sealed = wire::seal_message(sender.cipher(), receiver.key(), wire::encode_contact_payload(list), id);
  auto transfer = wire::run_transfer(std::move(sealed), id, channel, sender.policy().transfer);
  out.list_bytes = transfer.bytes_on_wire;
  if (transfer.completed) {
    try {
      auto opened = wire::open_message(receiver.cipher(), receiver.identity(), transfer.received);
      if (opened.id != id) throw Error(ErrorCode::Authentication, "message identifier mismatch");
      auto received = wire::decode_contact_payload(opened.payload);
      out.list_update = receiver.store().apply_contact_list(received, round);
      out.list_delivered = true;
      out.delivered_list = std::move(received);
    } catch (const Error& e) {
      out.list_error = e.what();
    }
  } else {
    out.list_error = std::string("transfer ended with sender ") + wire::to_string(transfer.sender_phase);
  }

  if (sender.policy().segment_exchange && receiver.policy().segment_exchange) {
    auto length = std::min(sender.policy().segment_length, receiver.policy().segment_length);
    // A forged proposal travels with the branch it was built on, not with the
    // sender's real chain.
    auto from_sender = extends ? ledger::evidence_segment(sender.chain(), length) : shown;
    auto from_receiver = ledger::evidence_segment(receiver.chain(), length);
    auto proofs_from_sender = sender.known_proofs().size();
    auto proofs_from_receiver = receiver.known_proofs().size();

    note_detections(receiver, proactive_check(receiver, sender.key(), from_sender, round), out);
    note_detections(sender, proactive_check(sender, receiver.key(), from_receiver, round), out);
    out.proofs_learned += share_proofs(sender, receiver, round);
    out.proofs_learned += share_proofs(receiver, sender, round);

    out.segment_bytes += (from_sender.size() + from_receiver.size()) * ledger::kBlockSize;
    out.segment_bytes += (proofs_from_sender + proofs_from_receiver) * 2 * ledger::kBlockSize;
  }
  out.bytes_transferred = out.list_bytes + out.segment_bytes;
  return out;
}

EncounterOutcome transact(Peer& sender, Peer& receiver, std::uint64_t amount, std::uint64_t round,
                          wire::PacketChannel& channel) {
  std::vector<ledger::Block> presented;
  ledger::Block proposal;
  try {
    if (amount == 0) throw Error(ErrorCode::ZeroAmount, "payment amount must be > 0");
    if (sender.key() == receiver.key()) throw Error(ErrorCode::InvalidArgument, "cannot pay own key");
    if (sender.balance() < static_cast<std::int64_t>(amount)) {
      throw Error(ErrorCode::InsufficientBalance, "balance " + std::to_string(sender.balance()) +
                                                      " below amount " + std::to_string(amount));
    }
    if (sender.policy().segment_exchange) {
      presented = ledger::evidence_segment(sender.chain(), sender.policy().segment_length);
    }
    proposal = ledger::build_proposal(sender.chain(), sender.identity(), receiver.key(), amount,
                                      sender.chain().next_sequence());
  } catch (const Error& e) {
    EncounterOutcome out;
    out.failure = e.code();
    out.failure_message = e.what();
    return out;
  }
  return complete_payment(sender, receiver, proposal, presented, round, channel);
}

std::pair<ledger::Block, ledger::Block> adversary_double_spend(Peer& adversary,
                                                               const PublicKey& first_victim,
                                                               const PublicKey& second_victim,
                                                               std::uint64_t amount) {
  if (first_victim == second_victim) {
    throw Error(ErrorCode::InvalidArgument, "double spend needs two distinct victims");
  }
  auto sequence = adversary.chain().next_sequence();
  return {ledger::build_proposal(adversary.chain(), adversary.identity(), first_victim, amount, sequence),
          ledger::build_proposal(adversary.chain(), adversary.identity(), second_victim, amount, sequence)};
}

BoostResult adversary_cycle_boost(Peer& first, Peer& second, std::size_t repetitions, Peer& target,
                                  std::uint64_t amount, std::uint64_t round,
                                  wire::PacketChannel& channel) {
  BoostResult result;
  for (std::size_t i = 0; i < repetitions; ++i) {
    auto& payer = i % 2 == 0 ? first : second;
    auto& payee = i % 2 == 0 ? second : first;
    result.outcomes.push_back(transact(payer, payee, amount, round, channel));
  }
  result.outcomes.push_back(transact(first, target, amount, round, channel));
  result.outcomes.push_back(transact(second, target, amount, round, channel));
  result.score_of_first = target.store().lookup(first.key());
  result.score_of_second = target.store().lookup(second.key());
  return result;
}

}  // namespace wot::peer
