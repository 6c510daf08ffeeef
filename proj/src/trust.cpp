#include "wot/trust.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace wot::trust {

TrustScore::TrustScore(int value) : value_(value) {
  if (value < 0 || value > kMaxScore) {
    throw Error(ErrorCode::InvalidArgument, "trust score out of range: " + std::to_string(value));
  }
}

const char* to_string(TrustBand band) {
  switch (band) {
    case TrustBand::NoInfo: return "no-info";
    case TrustBand::Low: return "low";
    case TrustBand::Medium: return "medium";
    case TrustBand::High: return "high";
    case TrustBand::Flagged: return "flagged";
  }
  return "unknown";
}

void validate(const BandThresholds& t) {
  if (!(1 <= t.low && t.low <= t.medium && t.medium <= t.high && t.high <= kMaxScore)) {
    throw Error(ErrorCode::Config, "band thresholds must satisfy 1 <= low <= medium <= high <= 100");
  }
}

TrustBand classify(TrustScore score, bool flagged, const BandThresholds& t) {
  if (flagged) return TrustBand::Flagged;
  int v = score.value();
  if (v >= t.high) return TrustBand::High;
  if (v >= t.medium) return TrustBand::Medium;
  if (v >= t.low) return TrustBand::Low;
  return TrustBand::NoInfo;
}

ContactList::ContactList(std::vector<PublicKey> keys) : keys_(std::move(keys)) {
  if (keys_.size() > kContactListCapacity) {
    throw Error(ErrorCode::Oversize,
                "contact list holds " + std::to_string(keys_.size()) + " keys, limit is 50");
  }
  std::set<PublicKey> seen;
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (!seen.insert(keys_[i]).second) {
      throw Error(ErrorCode::Duplicate, "duplicate key in contact list at position " + std::to_string(i), i);
    }
  }
}

bool ContactList::contains(const PublicKey& key) const {
  return std::find(keys_.begin(), keys_.end(), key) != keys_.end();
}

ContactList recent_counterparties(const std::vector<HistoryEntry>& history, const PublicKey& owner,
                                  std::size_t limit) {
  limit = std::min(limit, kContactListCapacity);
  std::vector<PublicKey> keys;
  std::set<PublicKey> seen;
  for (auto it = history.rbegin(); it != history.rend() && keys.size() < limit; ++it) {
    if (it->counterparty == owner || !seen.insert(it->counterparty).second) continue;
    keys.push_back(it->counterparty);
  }
  return ContactList(std::move(keys));
}

TrustStore::TrustStore(PublicKey owner, BandThresholds thresholds, PenaltyPolicy penalty)
    : owner_(owner), thresholds_(thresholds), penalty_(penalty) {
  validate(thresholds_);
  TrustScore check(penalty_.reset_score);
  (void)check;
}

TrustScore TrustStore::lookup(const PublicKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? TrustScore{} : it->second.score;
}

bool TrustStore::flagged(const PublicKey& key) const {
  auto it = entries_.find(key);
  return it != entries_.end() && it->second.flagged;
}

TrustBand TrustStore::band(const PublicKey& key) const {
  return classify(lookup(key), flagged(key), thresholds_);
}

const TrustEntry* TrustStore::find(const PublicKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void TrustStore::increment(const PublicKey& key, std::uint64_t round) {
  if (key == owner_) return;
  auto [it, inserted] = entries_.try_emplace(key);
  auto& e = it->second;
  e.score = TrustScore(std::min(kMaxScore, e.score.value() + 1));
  e.last_updated = round;
}

UpdateSummary TrustStore::apply_contact_list(const ContactList& list, std::uint64_t round) {
  UpdateSummary summary;
  for (const auto& key : list.keys()) {
    if (key == owner_) continue;
    if (entries_.contains(key)) {
      ++summary.incremented;
    } else {
      ++summary.inserted;
    }
    increment(key, round);
  }
  return summary;
}

const TrustEntry& TrustStore::apply_penalty(const PublicKey& key, const ledger::ConflictProof& proof,
                                            std::uint64_t round) {
  if (!ledger::verify_conflict(proof)) {
    throw Error(ErrorCode::InvalidProof, "conflict proof does not verify");
  }
  if (proof.offender() != key) {
    throw Error(ErrorCode::SignerMismatch, "conflict proof names a different signer");
  }
  if (key == owner_) {
    throw Error(ErrorCode::InvalidArgument, "store does not hold its owner's key");
  }
  auto& e = entries_[key];
  if (!e.flagged || e.score.value() != penalty_.reset_score) {
    e.flagged = true;
    e.score = TrustScore(penalty_.reset_score);
    e.last_updated = round;
  }
  return e;
}

void TrustStore::decay(int points, std::uint64_t round) {
  if (points <= 0) return;
  for (auto& [key, e] : entries_) {
    if (e.flagged || e.score.value() == 0) continue;
    e.score = TrustScore(std::max(0, e.score.value() - points));
    e.last_updated = round;
  }
}

std::string TrustStore::to_csv() const {
  std::ostringstream out;
  out << "hex_key,score,flagged,last_updated\n";
  for (const auto& [key, e] : entries_) {
    out << encode_key_hex(key) << ',' << e.score.value() << ',' << (e.flagged ? 1 : 0) << ','
        << e.last_updated << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::uint64_t parse_uint(const std::string& s, std::size_t line_no, const char* what) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw Error(ErrorCode::Parse,
                "line " + std::to_string(line_no) + ": " + what + " is not a non-negative integer", line_no);
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + what + " out of range", line_no);
  }
}

}  // namespace

TrustStore TrustStore::from_csv(const std::string& text, PublicKey owner, BandThresholds thresholds,
                                PenaltyPolicy penalty) {
  TrustStore store(owner, thresholds, penalty);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line != "hex_key,score,flagged,last_updated") {
        throw Error(ErrorCode::Parse, "line 1: missing header hex_key,score,flagged,last_updated", 1);
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != 4) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected 4 fields", line_no);
    }
    PublicKey key;
    try {
      key = decode_key_hex(fields[0]);
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    if (key == owner) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": store lists its owner", line_no);
    }
    auto score = parse_uint(fields[1], line_no, "score");
    if (score > static_cast<std::uint64_t>(kMaxScore)) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": score above 100", line_no);
    }
    if (fields[2] != "0" && fields[2] != "1") {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": flagged must be 0 or 1", line_no);
    }
    TrustEntry e{TrustScore(static_cast<int>(score)), fields[2] == "1",
                 parse_uint(fields[3], line_no, "last_updated")};
    if (!store.entries_.emplace(key, e).second) {
      throw Error(ErrorCode::Duplicate, "line " + std::to_string(line_no) + ": duplicate key", line_no);
    }
  }
  if (!header_seen) throw Error(ErrorCode::Parse, "empty store file: header row required", 1);
  return store;
}

}  // namespace wot::trust
