#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "wot/identity.hpp"
#include "wot/trust.hpp"

namespace wot::wire {

// Contact payload body: n x 74-octet keys, no header, no separators.
inline constexpr std::size_t kMaxPayloadSize = trust::kContactListCapacity * kPublicKeySize;  // 3700

Bytes encode_contact_payload(const trust::ContactList& list);

// Throws Error(Length) for a body that is not a multiple of 74, Error(Oversize)
// past 3700 octets, Error(Duplicate) for a repeated key.
trust::ContactList decode_contact_payload(ByteView body);

inline constexpr std::size_t kMessageIdSize = 8;
using MessageId = std::array<std::uint8_t, kMessageIdSize>;

// First 8 octets of SHA-256(sender key || sequence). Unique per payment.
MessageId message_id_for(const PublicKey& sender, std::uint64_t sequence);

// cipher.seal(recipient, message_id || payload)
Bytes seal_message(const Cipher& cipher, const PublicKey& recipient, ByteView payload,
                   const MessageId& id);

struct OpenedMessage {
  MessageId id{};
  Bytes payload;
};

OpenedMessage open_message(const Cipher& cipher, const Identity& identity, ByteView sealed);

enum class PacketKind : std::uint8_t { Data = 1, Ack = 2, Fin = 3 };

const char* to_string(PacketKind kind);

// Packet layout (big-endian, fixed offsets):
//   0  message_id   8
//   8  kind         1
//   9  total_len    4   sealed message length
//  13  chunk_index  4   DATA: chunk number; ACK: count of contiguous chunks held
//  17  chunk_len    2
//  19  chunk        chunk_len (DATA only, <= 1200)
struct Packet {
  MessageId message_id{};
  PacketKind kind = PacketKind::Data;
  std::uint32_t total_len = 0;
  std::uint32_t chunk_index = 0;
  Bytes chunk;

  bool operator==(const Packet&) const = default;
};

inline constexpr std::size_t kPacketHeaderSize = 19;
inline constexpr std::size_t kMaxChunkSize = 1200;

Bytes encode_packet(const Packet& packet);
Packet decode_packet(ByteView data);

struct TransferParams {
  static constexpr std::uint32_t kUnboundedRetries = std::numeric_limits<std::uint32_t>::max();

  std::size_t chunk_size = kMaxChunkSize;
  std::size_t window = 4;
  std::uint32_t retry_budget = 8;
  std::uint32_t timeout_rounds = 2;

  bool operator==(const TransferParams&) const = default;
};

void validate(const TransferParams& params);

std::uint32_t chunk_count(std::size_t total_len, std::size_t chunk_size);

// Rounds a lossless transfer needs until the receiver holds every chunk: one
// round per hop, one window per round trip.
std::uint64_t ideal_rounds(std::size_t total_len, const TransferParams& params);

enum class Phase { Idle, Sending, Awaiting, Done, Failed };

const char* to_string(Phase phase);

struct SenderState {
  Phase phase = Phase::Idle;
  MessageId id{};
  TransferParams params;
  Bytes data;
  std::uint32_t chunks = 0;
  std::uint32_t base = 0;  // lowest unacknowledged chunk
  std::uint32_t next = 0;  // lowest never-sent chunk
  std::vector<std::uint32_t> retries;
  std::uint32_t duplicate_acks = 0;

  bool operator==(const SenderState&) const = default;
};

struct SenderStep {
  SenderState state;
  std::vector<Packet> packets;
};

SenderStep sender_start(Bytes sealed, const MessageId& id, const TransferParams& params = {});

// Cumulative ack: advances the window, refills it, emits FIN once all chunks
// are acknowledged. The second duplicate ack for the current base triggers
// one retransmission of that chunk.
SenderStep sender_on_ack(SenderState state, const Packet& packet);

// Retransmits `chunk_index` if still outstanding; exceeding the retry budget
// moves the sender to Failed.
SenderStep on_timeout(SenderState state, std::uint32_t chunk_index);

struct ReceiverState {
  Phase phase = Phase::Idle;
  MessageId id{};
  TransferParams params;
  std::optional<std::uint32_t> total_len;
  std::map<std::uint32_t, Bytes> buffer;
  std::uint32_t contiguous = 0;

  bool operator==(const ReceiverState&) const = default;
};

struct ReceiverStep {
  ReceiverState state;
  std::optional<Packet> ack;
  std::optional<Bytes> completed;
};

ReceiverState receiver_start(const MessageId& id, const TransferParams& params = {});

// Foreign message ids and inconsistent DATA are ignored without touching
// state. Every accepted DATA packet is acknowledged.
ReceiverStep receiver_on_packet(ReceiverState state, const Packet& packet);

// Carries one batch of packets in one direction. Implementations may drop,
// duplicate or reorder but never alter packet bytes.
class PacketChannel {
 public:
  virtual ~PacketChannel() = default;
  virtual std::vector<Packet> carry(std::vector<Packet> batch) = 0;
};

class PerfectChannel final : public PacketChannel {
 public:
  std::vector<Packet> carry(std::vector<Packet> batch) override { return batch; }
};

enum class Hop { SenderToReceiver, ReceiverToSender };

struct TransferEvent {
  std::uint64_t round = 0;
  Hop hop = Hop::SenderToReceiver;
  bool delivered = false;  // false: put on the channel; true: taken off it
  const Packet* packet = nullptr;
};

struct TransferOutcome {
  bool completed = false;  // receiver reassembled the full message
  Bytes received;
  Phase sender_phase = Phase::Idle;
  Phase receiver_phase = Phase::Idle;
  std::uint64_t completion_round = 0;  // 0 if never completed
  std::uint64_t rounds = 0;            // rounds executed
  std::uint64_t bytes_on_wire = 0;     // encoded bytes put on the channel, both directions
  std::uint64_t packets_sent = 0;
};

// Drives both state machines round by round: packets sent in round r are
// delivered in round r + 1; acknowledgements are processed before timers.
// Stops once the sender is Done or Failed and nothing is in flight, or after
// `max_rounds`.
TransferOutcome run_transfer(Bytes sealed, const MessageId& id, PacketChannel& channel,
                             const TransferParams& params = {}, std::uint64_t max_rounds = 100000,
                             const std::function<void(const TransferEvent&)>& observer = {});

}  // namespace wot::wire
