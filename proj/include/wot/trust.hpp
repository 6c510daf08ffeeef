#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wot/identity.hpp"
#include "wot/ledger.hpp"

namespace wot::trust {

inline constexpr int kMaxScore = 100;
inline constexpr std::size_t kContactListCapacity = 50;

class TrustScore {
 public:
  constexpr TrustScore() = default;
  // Throws Error(InvalidArgument) outside [0, 100].
  explicit TrustScore(int value);

  constexpr int value() const { return value_; }
  auto operator<=>(const TrustScore&) const = default;

 private:
  int value_ = 0;
};

enum class TrustBand { NoInfo, Low, Medium, High, Flagged };

const char* to_string(TrustBand band);

// Lowest score of each band; NoInfo is exactly 0.
struct BandThresholds {
  int low = 1;
  int medium = 30;
  int high = 70;
};

void validate(const BandThresholds& t);

TrustBand classify(TrustScore score, bool flagged, const BandThresholds& thresholds = {});

// Distinct keys, at most 50, recency order as produced by the sender.
class ContactList {
 public:
  ContactList() = default;

  // Throws Error(Oversize) past 50 keys, Error(Duplicate) on a repeated key.
  explicit ContactList(std::vector<PublicKey> keys);

  const std::vector<PublicKey>& keys() const { return keys_; }
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  bool contains(const PublicKey& key) const;

  bool operator==(const ContactList&) const = default;

 private:
  std::vector<PublicKey> keys_;
};

enum class Direction { Sent, Received };

struct HistoryEntry {
  std::uint64_t round = 0;
  PublicKey counterparty;
  Direction direction = Direction::Sent;
  std::uint64_t amount = 0;
};

// Distinct counterparties, most recent first, owner excluded, truncated to
// `limit`. History is oldest first.
ContactList recent_counterparties(const std::vector<HistoryEntry>& history, const PublicKey& owner,
                                  std::size_t limit = kContactListCapacity);

struct TrustEntry {
  TrustScore score;
  bool flagged = false;
  std::uint64_t last_updated = 0;

  bool operator==(const TrustEntry&) const = default;
};

struct UpdateSummary {
  std::size_t incremented = 0;
  std::size_t inserted = 0;
};

struct PenaltyPolicy {
  int reset_score = 0;
};

class TrustStore {
 public:
  explicit TrustStore(PublicKey owner, BandThresholds thresholds = {}, PenaltyPolicy penalty = {});

  const PublicKey& owner() const { return owner_; }
  const BandThresholds& thresholds() const { return thresholds_; }

  // Stored score, 0 when absent.
  TrustScore lookup(const PublicKey& key) const;
  bool flagged(const PublicKey& key) const;
  TrustBand band(const PublicKey& key) const;

  const TrustEntry* find(const PublicKey& key) const;
  const std::map<PublicKey, TrustEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // +1 (clamped at 100) for known keys, insert at 1 for unknown ones. The
  // owner's key is skipped.
  UpdateSummary apply_contact_list(const ContactList& list, std::uint64_t round);

  // Single +1 for one key; used by the direct-increment policy.
  void increment(const PublicKey& key, std::uint64_t round);

  // Flags the offender and resets its score. The entry is kept. Throws
  // Error(InvalidProof) or Error(SignerMismatch) and leaves the store
  // untouched.
  const TrustEntry& apply_penalty(const PublicKey& key, const ledger::ConflictProof& proof,
                                  std::uint64_t round);

  // Lowers every unflagged score by `points`, floored at 0.
  void decay(int points, std::uint64_t round);

  // `hex_key,score,flagged,last_updated` with header, keys in ascending order.
  std::string to_csv() const;

  static TrustStore from_csv(const std::string& text, PublicKey owner,
                             BandThresholds thresholds = {}, PenaltyPolicy penalty = {});

 private:
  PublicKey owner_;
  BandThresholds thresholds_;
  PenaltyPolicy penalty_;
  std::map<PublicKey, TrustEntry> entries_;
};

}  // namespace wot::trust
