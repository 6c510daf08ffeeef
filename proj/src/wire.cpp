#include "wot/wire.hpp"

#include <algorithm>

namespace wot::wire {

Bytes encode_contact_payload(const trust::ContactList& list) {
  Bytes body;
  body.reserve(list.size() * kPublicKeySize);
  for (const auto& key : list.keys()) put_bytes(body, key.bytes);
  return body;
}

trust::ContactList decode_contact_payload(ByteView body) {
  if (body.size() > kMaxPayloadSize) {
    throw Error(ErrorCode::Oversize,
                "payload of " + std::to_string(body.size()) + " octets exceeds 3700", body.size());
  }
  if (body.size() % kPublicKeySize != 0) {
    throw Error(ErrorCode::Length,
                "payload length " + std::to_string(body.size()) + " is not a multiple of 74",
                body.size());
  }
  std::vector<PublicKey> keys;
  keys.reserve(body.size() / kPublicKeySize);
  for (std::size_t off = 0; off < body.size(); off += kPublicKeySize) {
    keys.push_back(PublicKey::from_bytes(body.subspan(off, kPublicKeySize)));
  }
  return trust::ContactList(std::move(keys));
}

MessageId message_id_for(const PublicKey& sender, std::uint64_t sequence) {
  Bytes input;
  put_bytes(input, sender.bytes);
  put_u64(input, sequence);
  auto d = sha256(input);
  MessageId id{};
  std::copy_n(d.begin(), kMessageIdSize, id.begin());
  return id;
}

Bytes seal_message(const Cipher& cipher, const PublicKey& recipient, ByteView payload,
                   const MessageId& id) {
  Bytes plain;
  plain.reserve(kMessageIdSize + payload.size());
  put_bytes(plain, id);
  put_bytes(plain, payload);
  return cipher.seal(recipient, plain);
}

OpenedMessage open_message(const Cipher& cipher, const Identity& identity, ByteView sealed) {
  auto plain = cipher.open(identity, sealed);
  if (plain.size() < kMessageIdSize) {
    throw Error(ErrorCode::Malformed, "sealed message lacks a message identifier");
  }
  OpenedMessage m;
  std::copy_n(plain.begin(), kMessageIdSize, m.id.begin());
  m.payload.assign(plain.begin() + kMessageIdSize, plain.end());
  return m;
}

const char* to_string(PacketKind kind) {
  switch (kind) {
    case PacketKind::Data: return "DATA";
    case PacketKind::Ack: return "ACK";
    case PacketKind::Fin: return "FIN";
  }
  return "?";
}

Bytes encode_packet(const Packet& p) {
  if (p.chunk.size() > kMaxChunkSize) {
    throw Error(ErrorCode::Oversize, "packet chunk exceeds 1200 octets");
  }
  Bytes out;
  out.reserve(kPacketHeaderSize + p.chunk.size());
  put_bytes(out, p.message_id);
  put_u8(out, static_cast<std::uint8_t>(p.kind));
  put_u32(out, p.total_len);
  put_u32(out, p.chunk_index);
  put_u16(out, static_cast<std::uint16_t>(p.chunk.size()));
  put_bytes(out, p.chunk);
  return out;
}

Packet decode_packet(ByteView data) {
  ByteReader r(data);
  Packet p;
  p.message_id = r.array<kMessageIdSize>();
  auto kind = r.u8();
  if (kind < 1 || kind > 3) {
    throw Error(ErrorCode::Malformed, "unknown packet kind " + std::to_string(kind), 8);
  }
  p.kind = static_cast<PacketKind>(kind);
  p.total_len = r.u32();
  p.chunk_index = r.u32();
  auto len = r.u16();
  if (len > kMaxChunkSize) throw Error(ErrorCode::Oversize, "packet chunk exceeds 1200 octets", 17);
  auto chunk = r.take(len);
  p.chunk.assign(chunk.begin(), chunk.end());
  if (r.remaining() != 0) {
    throw Error(ErrorCode::Length, "trailing octets after packet", r.offset());
  }
  return p;
}

void validate(const TransferParams& params) {
  if (params.chunk_size == 0 || params.chunk_size > kMaxChunkSize) {
    throw Error(ErrorCode::Config, "chunk_size must be in [1, 1200]");
  }
  if (params.window == 0) throw Error(ErrorCode::Config, "window must be >= 1");
  if (params.timeout_rounds == 0) throw Error(ErrorCode::Config, "timeout must be >= 1 round");
}

std::uint32_t chunk_count(std::size_t total_len, std::size_t chunk_size) {
  if (total_len == 0) return 1;
  return static_cast<std::uint32_t>((total_len + chunk_size - 1) / chunk_size);
}

std::uint64_t ideal_rounds(std::size_t total_len, const TransferParams& params) {
  auto windows = (chunk_count(total_len, params.chunk_size) + params.window - 1) / params.window;
  return 2 * windows;
}

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::Idle: return "idle";
    case Phase::Sending: return "sending";
    case Phase::Awaiting: return "awaiting";
    case Phase::Done: return "done";
    case Phase::Failed: return "failed";
  }
  return "?";
}

namespace {

std::size_t chunk_length(std::size_t total_len, std::size_t chunk_size, std::uint32_t index) {
  auto off = static_cast<std::size_t>(index) * chunk_size;
  return std::min(chunk_size, total_len - std::min(total_len, off));
}

Packet data_packet(const SenderState& s, std::uint32_t index) {
  Packet p;
  p.message_id = s.id;
  p.kind = PacketKind::Data;
  p.total_len = static_cast<std::uint32_t>(s.data.size());
  p.chunk_index = index;
  auto off = static_cast<std::size_t>(index) * s.params.chunk_size;
  auto len = chunk_length(s.data.size(), s.params.chunk_size, index);
  p.chunk.assign(s.data.begin() + static_cast<std::ptrdiff_t>(off),
                 s.data.begin() + static_cast<std::ptrdiff_t>(off + len));
  return p;
}

void fill_window(SenderState& s, std::vector<Packet>& out) {
  while (s.next < s.chunks && s.next < s.base + s.params.window) {
    out.push_back(data_packet(s, s.next));
    ++s.next;
  }
  s.phase = s.next < s.chunks ? Phase::Sending : Phase::Awaiting;
}

bool active(Phase p) { return p == Phase::Sending || p == Phase::Awaiting; }

}  // namespace

SenderStep sender_start(Bytes sealed, const MessageId& id, const TransferParams& params) {
  validate(params);
  if (sealed.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::Oversize, "message too large for a 32-bit length field");
  }
  SenderStep step;
  auto& s = step.state;
  s.id = id;
  s.params = params;
  s.data = std::move(sealed);
  s.chunks = chunk_count(s.data.size(), params.chunk_size);
  s.retries.assign(s.chunks, 0);
  fill_window(s, step.packets);
  return step;
}

SenderStep sender_on_ack(SenderState state, const Packet& packet) {
  SenderStep step{std::move(state), {}};
  auto& s = step.state;
  if (!active(s.phase) || packet.message_id != s.id || packet.kind != PacketKind::Ack) return step;
  auto acked = packet.chunk_index;
  if (acked > s.next) return step;

  if (acked > s.base) {
    s.base = acked;
    s.duplicate_acks = 0;
    if (s.base == s.chunks) {
      s.phase = Phase::Done;
      Packet fin;
      fin.message_id = s.id;
      fin.kind = PacketKind::Fin;
      fin.total_len = static_cast<std::uint32_t>(s.data.size());
      fin.chunk_index = s.chunks;
      step.packets.push_back(fin);
      return step;
    }
    fill_window(s, step.packets);
  } else if (acked == s.base && s.base < s.next) {
    if (++s.duplicate_acks == 2) step.packets.push_back(data_packet(s, s.base));
  }
  return step;
}

SenderStep on_timeout(SenderState state, std::uint32_t chunk_index) {
  SenderStep step{std::move(state), {}};
  auto& s = step.state;
  if (!active(s.phase) || chunk_index < s.base || chunk_index >= s.next) return step;
  if (s.retries[chunk_index] >= s.params.retry_budget) {
    s.phase = Phase::Failed;
    return step;
  }
  ++s.retries[chunk_index];
  step.packets.push_back(data_packet(s, chunk_index));
  return step;
}

ReceiverState receiver_start(const MessageId& id, const TransferParams& params) {
  validate(params);
  ReceiverState r;
  r.id = id;
  r.params = params;
  r.phase = Phase::Awaiting;
  return r;
}

ReceiverStep receiver_on_packet(ReceiverState state, const Packet& packet) {
  ReceiverStep step{std::move(state), std::nullopt, std::nullopt};
  auto& r = step.state;
  if (packet.message_id != r.id || packet.kind != PacketKind::Data) return step;
  if (r.phase != Phase::Awaiting && r.phase != Phase::Done) return step;
  if (r.total_len && *r.total_len != packet.total_len) return step;

  auto chunks = chunk_count(packet.total_len, r.params.chunk_size);
  if (packet.chunk_index >= chunks ||
      packet.chunk.size() != chunk_length(packet.total_len, r.params.chunk_size, packet.chunk_index)) {
    return step;
  }

  r.total_len = packet.total_len;
  if (r.phase == Phase::Awaiting) {
    r.buffer.try_emplace(packet.chunk_index, packet.chunk);
    while (r.buffer.contains(r.contiguous)) ++r.contiguous;
  }

  Packet ack;
  ack.message_id = r.id;
  ack.kind = PacketKind::Ack;
  ack.total_len = packet.total_len;
  ack.chunk_index = r.contiguous;
  step.ack = ack;

  if (r.phase == Phase::Awaiting && r.contiguous == chunks) {
    r.phase = Phase::Done;
    Bytes whole;
    whole.reserve(packet.total_len);
    for (const auto& [index, chunk] : r.buffer) put_bytes(whole, chunk);
    step.completed = std::move(whole);
  }
  return step;
}

TransferOutcome run_transfer(Bytes sealed, const MessageId& id, PacketChannel& channel,
                             const TransferParams& params, std::uint64_t max_rounds,
                             const std::function<void(const TransferEvent&)>& observer) {
  TransferOutcome outcome;
  auto start = sender_start(std::move(sealed), id, params);
  SenderState sender = std::move(start.state);
  ReceiverState receiver = receiver_start(id, params);

  std::vector<Packet> to_receiver;
  std::vector<Packet> to_sender;
  std::map<std::uint32_t, std::uint64_t> timers;  // chunk -> round its timeout fires

  auto notify = [&](std::uint64_t round, Hop hop, bool delivered, const Packet& p) {
    if (observer) observer(TransferEvent{round, hop, delivered, &p});
  };

  std::vector<Packet> sender_out = std::move(start.packets);
  for (std::uint64_t round = 1; round <= max_rounds; ++round) {
    outcome.rounds = round;
    std::vector<Packet> receiver_out;

    if (round > 1) {
      for (const auto& p : channel.carry(std::move(to_receiver))) {
        notify(round, Hop::SenderToReceiver, true, p);
        auto step = receiver_on_packet(std::move(receiver), p);
        receiver = std::move(step.state);
        if (step.ack) receiver_out.push_back(*step.ack);
        if (step.completed) {
          outcome.completed = true;
          outcome.completion_round = round;
          outcome.received = std::move(*step.completed);
        }
      }
      for (const auto& p : channel.carry(std::move(to_sender))) {
        notify(round, Hop::ReceiverToSender, true, p);
        auto step = sender_on_ack(std::move(sender), p);
        sender = std::move(step.state);
        std::move(step.packets.begin(), step.packets.end(), std::back_inserter(sender_out));
      }
      to_receiver.clear();
      to_sender.clear();

      for (auto& [chunk, due] : timers) {
        if (due != round || chunk < sender.base || chunk >= sender.next) continue;
        auto step = on_timeout(std::move(sender), chunk);
        sender = std::move(step.state);
        std::move(step.packets.begin(), step.packets.end(), std::back_inserter(sender_out));
      }
    }

    for (const auto& p : sender_out) {
      if (p.kind == PacketKind::Data) timers[p.chunk_index] = round + params.timeout_rounds;
      notify(round, Hop::SenderToReceiver, false, p);
      outcome.bytes_on_wire += kPacketHeaderSize + p.chunk.size();
      ++outcome.packets_sent;
    }
    for (const auto& p : receiver_out) {
      notify(round, Hop::ReceiverToSender, false, p);
      outcome.bytes_on_wire += kPacketHeaderSize + p.chunk.size();
      ++outcome.packets_sent;
    }
    to_receiver = std::move(sender_out);
    to_sender = std::move(receiver_out);
    sender_out.clear();

    bool sender_finished = sender.phase == Phase::Done || sender.phase == Phase::Failed;
    if (sender_finished && to_receiver.empty() && to_sender.empty()) break;
  }
  outcome.sender_phase = sender.phase;
  outcome.receiver_phase = receiver.phase;
  return outcome;
}

}  // namespace wot::wire
