#include "wot/wot.h"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <tuple>
#include <cstring>
#include <fstream>
#include <limits>
#include <new>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wot/ledger.hpp"
#include "wot/peer.hpp"
#include "wot/sim.hpp"
#include "wot/trust.hpp"
#include "wot/wire.hpp"

struct wot_store {
  wot::trust::TrustStore store;
  std::vector<std::pair<wot::PublicKey, wot::trust::TrustEntry>> rows;
};

struct wot_peer {
  wot::peer::Peer peer;
};

struct wot_sim_config {
  wot::sim::SimConfig config;
};

struct wot_sim_result {
  wot::sim::SimRun run;
};

namespace {

thread_local std::string g_error;
thread_local std::size_t g_position = std::numeric_limits<std::size_t>::max();

void set_error(std::string message, std::size_t position = std::numeric_limits<std::size_t>::max()) {
  g_error = std::move(message);
  g_position = position;
}

wot_status status_for(wot::ErrorCode code) {
  using wot::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return WOT_ERR_INVALID_ARGUMENT;
    case ErrorCode::Io: return WOT_ERR_IO;
    case ErrorCode::Length:
    case ErrorCode::InvalidCharacter:
    case ErrorCode::Malformed:
    case ErrorCode::Oversize:
    case ErrorCode::Duplicate:
    case ErrorCode::Config:
    case ErrorCode::Parse: return WOT_ERR_PARSE;
    case ErrorCode::ZeroAmount:
    case ErrorCode::InsufficientBalance:
    case ErrorCode::BadSignature:
    case ErrorCode::Mislinked:
    case ErrorCode::Authentication:
    case ErrorCode::InvalidProof:
    case ErrorCode::SignerMismatch: return WOT_ERR_LEDGER;
  }
  return WOT_ERR_INTERNAL;
}

template <typename F>
wot_status guarded(F&& body) {
  set_error("");
  try {
    return body();
  } catch (const wot::Error& e) {
    set_error(e.what(), e.has_position() ? e.position() : std::numeric_limits<std::size_t>::max());
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return WOT_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return WOT_ERR_INTERNAL;
  }
}

wot_status require(bool cond, const char* what) {
  if (!cond) {
    set_error(what);
    return WOT_ERR_INVALID_ARGUMENT;
  }
  return WOT_OK;
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void copy_key(const wot::PublicKey& key, char* out_hex) {
  auto hex = wot::encode_key_hex(key);
  std::memcpy(out_hex, hex.c_str(), hex.size() + 1);
}

wot_band to_c(wot::trust::TrustBand band) { return static_cast<wot_band>(band); }

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wot::Error(wot::ErrorCode::Io, std::string("cannot read '") + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

extern "C" {

const char* wot_version(void) { return "1.0.0"; }

const char* wot_last_error(void) { return g_error.c_str(); }

size_t wot_last_error_position(void) { return g_position; }

void wot_free(void* p) { std::free(p); }

wot_status wot_key_from_seed(const uint8_t seed[WOT_SEED_SIZE], char out_hex[WOT_KEY_HEX_SIZE + 1]) {
  if (auto s = require(seed && out_hex, "null argument")) return s;
  return guarded([&] {
    copy_key(wot::generate_identity(wot::ByteView(seed, WOT_SEED_SIZE)).public_key(), out_hex);
    return WOT_OK;
  });
}

wot_status wot_key_normalize(const char* hex, char out_hex[WOT_KEY_HEX_SIZE + 1]) {
  if (auto s = require(hex && out_hex, "null argument")) return s;
  return guarded([&] {
    copy_key(wot::decode_key_hex(hex), out_hex);
    return WOT_OK;
  });
}

wot_status wot_payload_encode_lines(const char* key_lines, uint8_t** out, size_t* out_size) {
  if (auto s = require(key_lines && out && out_size, "null argument")) return s;
  return guarded([&] {
    std::istringstream in(key_lines);
    std::string line;
    std::size_t line_no = 0;
    std::vector<wot::PublicKey> keys;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      try {
        keys.push_back(wot::decode_key_hex(line));
      } catch (const wot::Error& e) {
        throw wot::Error(wot::ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what(), line_no);
      }
    }
    auto body = wot::wire::encode_contact_payload(wot::trust::ContactList(std::move(keys)));
    *out = static_cast<uint8_t*>(std::malloc(body.empty() ? 1 : body.size()));
    if (!*out) throw std::bad_alloc();
    if (!body.empty()) std::memcpy(*out, body.data(), body.size());
    *out_size = body.size();
    return WOT_OK;
  });
}

wot_status wot_payload_decode_lines(const uint8_t* data, size_t size, char** out_lines) {
  if (auto s = require((data || size == 0) && out_lines, "null argument")) return s;
  return guarded([&] {
    auto list = wot::wire::decode_contact_payload(wot::ByteView(data, size));
    std::string text;
    for (const auto& key : list.keys()) text += wot::encode_key_hex(key) + "\n";
    *out_lines = dup_string(text);
    return WOT_OK;
  });
}

wot_band wot_classify(int score, int flagged, int low, int medium, int high) {
  wot::trust::BandThresholds t{low, medium, high};
  score = std::clamp(score, 0, wot::trust::kMaxScore);
  return to_c(wot::trust::classify(wot::trust::TrustScore(score), flagged != 0, t));
}

const char* wot_band_name(wot_band band) {
  return wot::trust::to_string(static_cast<wot::trust::TrustBand>(band));
}

wot_status wot_store_parse_csv(const char* csv, wot_store** out) {
  if (auto s = require(csv && out, "null argument")) return s;
  return guarded([&] {
    auto store = wot::trust::TrustStore::from_csv(csv, wot::PublicKey{});
    std::vector<std::pair<wot::PublicKey, wot::trust::TrustEntry>> rows(store.entries().begin(),
                                                                        store.entries().end());
    *out = new wot_store{std::move(store), std::move(rows)};
    return WOT_OK;
  });
}

size_t wot_store_size(const wot_store* store) { return store ? store->rows.size() : 0; }

wot_status wot_store_entry(const wot_store* store, size_t index, char key_hex[WOT_KEY_HEX_SIZE + 1], int* score,
                           int* flagged, uint64_t* last_updated) {
  if (auto s = require(store && key_hex && score && flagged && last_updated, "null argument")) return s;
  if (auto s = require(index < store->rows.size(), "store index out of range")) return s;
  const auto& [key, entry] = store->rows[index];
  copy_key(key, key_hex);
  *score = entry.score.value();
  *flagged = entry.flagged ? 1 : 0;
  *last_updated = entry.last_updated;
  return WOT_OK;
}

void wot_store_free(wot_store* store) { delete store; }

wot_status wot_peer_create(const uint8_t seed[WOT_SEED_SIZE], uint64_t initial_balance, wot_peer** out) {
  if (auto s = require(seed && out, "null argument")) return s;
  return guarded([&] {
    *out = new wot_peer{wot::peer::Peer(wot::generate_identity(wot::ByteView(seed, WOT_SEED_SIZE)),
                                        initial_balance)};
    return WOT_OK;
  });
}

void wot_peer_free(wot_peer* peer) { delete peer; }

wot_status wot_peer_key(const wot_peer* peer, char out_hex[WOT_KEY_HEX_SIZE + 1]) {
  if (auto s = require(peer && out_hex, "null argument")) return s;
  copy_key(peer->peer.key(), out_hex);
  return WOT_OK;
}

int64_t wot_peer_balance(const wot_peer* peer) { return peer ? peer->peer.balance() : 0; }

wot_status wot_peer_score(const wot_peer* peer, const char* key_hex, int* score, int* flagged) {
  if (auto s = require(peer && key_hex && score && flagged, "null argument")) return s;
  return guarded([&] {
    auto key = wot::decode_key_hex(key_hex);
    *score = peer->peer.store().lookup(key).value();
    *flagged = peer->peer.store().flagged(key) ? 1 : 0;
    return WOT_OK;
  });
}

wot_status wot_peer_dump_json(const wot_peer* peer, char** out) {
  if (auto s = require(peer && out, "null argument")) return s;
  return guarded([&] {
    *out = dup_string(peer->peer.dump_json());
    return WOT_OK;
  });
}

wot_status wot_transact(wot_peer* sender, wot_peer* receiver, uint64_t amount, uint64_t round,
                        wot_encounter* out) {
  if (auto s = require(sender && receiver && out && sender != receiver, "invalid peer arguments")) return s;
  return guarded([&] {
    wot::wire::PerfectChannel channel;
    auto o = wot::peer::transact(sender->peer, receiver->peer, amount, round, channel);
    *out = wot_encounter{o.paid ? 1 : 0,          to_c(o.proactive_band), to_c(o.payer_band),
                         o.conflicts_found.size(), o.list_delivered ? 1 : 0, o.list_size,
                         o.bytes_transferred};
    if (!o.paid) set_error(o.failure_message);
    return WOT_OK;
  });
}

wot_status wot_sim_config_parse(const char* json, wot_sim_config** out) {
  if (auto s = require(json && out, "null argument")) return s;
  return guarded([&] {
    *out = new wot_sim_config{wot::sim::config_from_json(json)};
    return WOT_OK;
  });
}

wot_status wot_sim_config_load(const char* path, wot_sim_config** out) {
  if (auto s = require(path && out, "null argument")) return s;
  return guarded([&] {
    auto text = read_file(path);
    try {
      *out = new wot_sim_config{wot::sim::config_from_json(text)};
    } catch (const wot::Error& e) {
      throw wot::Error(e.code(), std::string(path) + ": " + e.what(), e.position());
    }
    return WOT_OK;
  });
}

void wot_sim_config_set_seed(wot_sim_config* config, uint64_t seed) {
  if (config) config->config.seed = seed;
}

void wot_sim_config_free(wot_sim_config* config) { delete config; }

wot_status wot_sim_run(const wot_sim_config* config, wot_sim_result** out) {
  if (auto s = require(config && out, "null argument")) return s;
  return guarded([&] {
    *out = new wot_sim_result{wot::sim::run_simulation_with_peers(config->config)};
    return WOT_OK;
  });
}

wot_status wot_sim_summary_json(const wot_sim_result* result, char** out) {
  if (auto s = require(result && out, "null argument")) return s;
  return guarded([&] {
    *out = dup_string(wot::sim::summary_json(result->run.metrics));
    return WOT_OK;
  });
}

wot_status wot_sim_rounds_csv(const wot_sim_result* result, char** out) {
  if (auto s = require(result && out, "null argument")) return s;
  return guarded([&] {
    *out = dup_string(wot::sim::rounds_csv(result->run.metrics));
    return WOT_OK;
  });
}

uint64_t wot_sim_transactions_total(const wot_sim_result* result) {
  return result ? result->run.metrics.transactions_total : 0;
}

uint64_t wot_sim_bytes_total(const wot_sim_result* result) { return result ? result->run.metrics.bytes_total : 0; }

size_t wot_sim_detections(const wot_sim_result* result) {
  return result ? result->run.metrics.detections.size() : 0;
}

size_t wot_sim_peer_count(const wot_sim_result* result) { return result ? result->run.peers.size() : 0; }

wot_status wot_sim_peer_dump_json(const wot_sim_result* result, size_t index, char** out) {
  if (auto s = require(result && out, "null argument")) return s;
  if (auto s = require(index < result->run.peers.size(), "peer index out of range")) return s;
  return guarded([&] {
    *out = dup_string(result->run.peers[index].dump_json());
    return WOT_OK;
  });
}

wot_status wot_sim_blocks_jsonl(const wot_sim_result* result, char** out) {
  if (auto s = require(result && out, "null argument")) return s;
  return guarded([&] {
    std::map<std::tuple<wot::PublicKey, std::uint64_t, wot::Digest>, const wot::ledger::Block*> all;
    for (const auto& p : result->run.peers) {
      for (const auto& b : p.chain().blocks()) all.emplace(std::tuple{b.signer, b.sequence, wot::ledger::block_digest(b)}, &b);
      for (const auto& [key, b] : p.chain().foreign()) {
        all.emplace(std::tuple{b.signer, b.sequence, wot::ledger::block_digest(b)}, &b);
      }
    }
    std::string text;
    for (const auto& [key, b] : all) text += wot::ledger::block_to_json(*b) + "\n";
    *out = dup_string(text);
    return WOT_OK;
  });
}

void wot_sim_result_free(wot_sim_result* result) { delete result; }

wot_status wot_demo_transfer(size_t size, double drop, double duplicate, int reorder, uint64_t seed,
                             char** transcript, wot_transfer_report* report) {
  if (auto s = require(transcript && report, "null argument")) return s;
  return guarded([&] {
    using namespace wot;
    sim::ChannelParams params{drop, duplicate, reorder != 0};
    sim::validate(params);

    auto data_rng = sim::substream(seed, sim::Stream::Amounts);
    Bytes payload(size);
    for (auto& b : payload) b = static_cast<std::uint8_t>(data_rng.next());
    std::array<std::uint8_t, kSeedSize> id_seed{};
    auto id_rng = sim::substream(seed, sim::Stream::Identities);
    for (auto& b : id_seed) b = static_cast<std::uint8_t>(id_rng.next());
    auto recipient = generate_identity(id_seed);

    TestCipher cipher;
    auto id = wire::message_id_for(recipient.public_key(), 1);
    auto sealed = wire::seal_message(cipher, recipient.public_key(), payload, id);

    wire::TransferParams transfer;
    sim::LossyChannel channel(params, sim::substream(seed, sim::Stream::Channel));
    std::ostringstream log;
    log << "message " << to_hex(id) << " sealed " << sealed.size() << " octets in "
        << wire::chunk_count(sealed.size(), transfer.chunk_size) << " chunks\n";
    auto observer = [&](const wire::TransferEvent& e) {
      char line[160];
      const auto& p = *e.packet;
      std::snprintf(line, sizeof line, "round %4llu  %s  %-4s  %-4s  index=%u  len=%zu\n",
                    static_cast<unsigned long long>(e.round),
                    e.hop == wire::Hop::SenderToReceiver ? "S->R" : "R->S", e.delivered ? "recv" : "send",
                    wire::to_string(p.kind), p.chunk_index, p.chunk.size());
      log << line;
    };
    auto outcome = wire::run_transfer(sealed, id, channel, transfer, 100000, observer);

    auto sent_digest = sha256(sealed);
    auto received_digest = sha256(outcome.received);
    report->completed = outcome.completed && outcome.received == sealed ? 1 : 0;
    report->rounds = outcome.rounds;
    report->completion_round = outcome.completion_round;
    report->ideal_rounds = wire::ideal_rounds(sealed.size(), transfer);
    report->bytes_on_wire = outcome.bytes_on_wire;
    report->packets_sent = outcome.packets_sent;
    report->sealed_size = sealed.size();
    std::memcpy(report->sent_digest, sent_digest.data(), 32);
    std::memcpy(report->received_digest, received_digest.data(), 32);

    log << "sender " << wire::to_string(outcome.sender_phase) << ", receiver "
        << wire::to_string(outcome.receiver_phase) << ", dropped " << channel.dropped() << ", duplicated "
        << channel.duplicated() << "\n";
    *transcript = dup_string(log.str());
    if (!report->completed) {
      set_error(std::string("transfer failed: sender ") + wire::to_string(outcome.sender_phase) +
                " after " + std::to_string(outcome.rounds) + " rounds");
      return WOT_ERR_TRANSFER_FAILED;
    }
    return WOT_OK;
  });
}

wot_status wot_inspect(const char* text, char** report) {
  if (auto s = require(text && report, "null argument")) return s;
  return guarded([&] {
    using namespace wot;
    std::string input(text);
    std::ostringstream out;
    std::vector<ledger::Block> blocks;

    auto first = input.find_first_not_of(" \t\r\n");
    bool dump = first != std::string::npos && input[first] == '{' &&
                nlohmann::json::accept(input);
    if (dump) {
      nlohmann::json j = nlohmann::json::parse(input);
      if (!j.is_object() || !j.contains("identity") || !j.contains("blocks")) {
        throw Error(ErrorCode::Parse, "peer dump needs 'identity' and 'blocks'");
      }
      try {
        auto owner = decode_key_hex(j.at("identity").get<std::string>());
        auto store = trust::TrustStore::from_csv(j.at("store_csv").get<std::string>(), owner);
        std::size_t flagged = 0;
        for (const auto& [key, e] : store.entries()) flagged += e.flagged ? 1 : 0;
        out << "identity " << encode_key_hex(owner) << "\n"
            << "balance " << j.at("balance").get<std::int64_t>() << "\n"
            << "chain_length " << j.at("chain_length").get<std::uint64_t>() << "\n"
            << "store_entries " << store.size() << "\n"
            << "flagged " << flagged << "\n";
        for (const auto& b : j.at("blocks")) blocks.push_back(ledger::block_from_json(b.dump()));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("peer dump: ") + e.what());
      }
    } else {
      std::istringstream in(input);
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
          blocks.push_back(ledger::block_from_json(line));
        } catch (const Error& e) {
          throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
      }
    }

    std::size_t invalid = 0;
    for (const auto& b : blocks) {
      out << ledger::block_to_json(b) << "\n";
      if (!ledger::signature_valid(b)) ++invalid;
    }
    auto proofs = ledger::find_double_spends(blocks);
    out << "blocks " << blocks.size() << "\n"
        << "invalid_signatures " << invalid << "\n"
        << "double_spends " << proofs.size() << "\n";
    for (const auto& p : proofs) {
      nlohmann::ordered_json j;
      j["offender"] = encode_key_hex(p.offender());
      j["sequence"] = p.sequence();
      j["a"] = to_hex(ledger::block_digest(p.a));
      j["b"] = to_hex(ledger::block_digest(p.b));
      out << j.dump() << "\n";
    }
    *report = dup_string(out.str());
    return WOT_OK;
  });
}

}  // extern "C"
