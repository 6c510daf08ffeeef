#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "wot/trust.hpp"

using namespace wot;
using namespace wot::trust;
using wot::testing::identity_for;

namespace {

PublicKey key(std::uint8_t n) { return identity_for(n).public_key(); }

ledger::ConflictProof fork_of(std::uint8_t n) {
  auto id = identity_for(n);
  ledger::Chain c1(id.public_key(), 100), c2(id.public_key(), 100);
  auto x = ledger::create_proposal(c1, id, key(1), 5);
  auto y = ledger::create_proposal(c2, id, key(2), 5);
  return *ledger::make_conflict(x, y);
}

TrustStore with_score(const PublicKey& k, int score) {
  auto csv = "hex_key,score,flagged,last_updated\n" + encode_key_hex(k) + "," + std::to_string(score) + ",0,0\n";
  return TrustStore::from_csv(csv, key(0));
}

}  // namespace

TEST(Score, Range) {
  EXPECT_EQ(TrustScore().value(), 0);
  EXPECT_EQ(TrustScore(100).value(), 100);
  EXPECT_THROW(TrustScore(101), Error);
  EXPECT_THROW(TrustScore(-1), Error);
}

TEST(Lookup, UnknownIsZero) {
  TrustStore s(key(0));
  EXPECT_EQ(s.lookup(key(5)).value(), 0);
  auto t = with_score(key(5), 37);
  EXPECT_EQ(t.lookup(key(5)).value(), 37);
  EXPECT_EQ(t.lookup(key(6)).value(), 0);
}

TEST(Apply, IncrementAndInsert) {
  auto s = with_score(key(1), 10);
  auto sum = s.apply_contact_list(ContactList({key(1), key(2)}), 4);
  EXPECT_EQ(s.lookup(key(1)).value(), 11);
  EXPECT_EQ(s.lookup(key(2)).value(), 1);
  EXPECT_EQ(sum.incremented, 1u);
  EXPECT_EQ(sum.inserted, 1u);
  EXPECT_EQ(s.find(key(2))->last_updated, 4u);
}

TEST(Apply, ClampAtHundred) {
  auto s = with_score(key(1), 100);
  s.apply_contact_list(ContactList({key(1)}), 1);
  EXPECT_EQ(s.lookup(key(1)).value(), 100);
}

TEST(Apply, AccumulatesNotIdempotent) {
  TrustStore s(key(0));
  ContactList l({key(1), key(2), key(3)});
  s.apply_contact_list(l, 1);
  s.apply_contact_list(l, 2);
  for (std::uint8_t n = 1; n <= 3; ++n) EXPECT_EQ(s.lookup(key(n)).value(), 2);
}

TEST(Apply, OwnerSkipped) {
  TrustStore s(key(0));
  auto sum = s.apply_contact_list(ContactList({key(0), key(1)}), 1);
  EXPECT_EQ(s.find(key(0)), nullptr);
  EXPECT_EQ(sum.inserted, 1u);
  EXPECT_EQ(s.size(), 1u);
}

TEST(Apply, FlaggedStaysFlagged) {
  TrustStore s(key(0));
  s.apply_penalty(key(7), fork_of(7), 1);
  s.apply_contact_list(ContactList({key(7)}), 2);
  EXPECT_EQ(s.lookup(key(7)).value(), 1);
  EXPECT_TRUE(s.flagged(key(7)));
  EXPECT_EQ(s.band(key(7)), TrustBand::Flagged);
}

TEST(Apply, MonotoneAccumulationProperty) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    int s0 = static_cast<int>(rng() % 101);
    int n = static_cast<int>(rng() % 150);
    auto s = with_score(key(1), s0);
    for (int i = 0; i < n; ++i) s.apply_contact_list(ContactList({key(1)}), static_cast<std::uint64_t>(i));
    EXPECT_EQ(s.lookup(key(1)).value(), std::min(100, s0 + n));
  }
}

TEST(ContactListTest, Invariants) {
  std::vector<PublicKey> keys;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 51; ++i) keys.push_back(wot::testing::random_key(rng));
  try {
    ContactList l(keys);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Oversize);
  }
  keys.pop_back();
  EXPECT_EQ(ContactList(keys).size(), 50u);
  keys[10] = keys[3];
  try {
    ContactList l(keys);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Duplicate);
  }
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(TrustScore(0), false), TrustBand::NoInfo);
  EXPECT_EQ(classify(TrustScore(30), false), TrustBand::Medium);
  EXPECT_EQ(classify(TrustScore(29), false), TrustBand::Low);
  EXPECT_EQ(classify(TrustScore(55), true), TrustBand::Flagged);
}

TEST(Classify, ExhaustiveDefaultBands) {
  for (int s = 0; s <= 100; ++s) {
    TrustBand expected = s == 0 ? TrustBand::NoInfo : s < 30 ? TrustBand::Low : s < 70 ? TrustBand::Medium : TrustBand::High;
    EXPECT_EQ(classify(TrustScore(s), false), expected) << s;
    EXPECT_EQ(classify(TrustScore(s), true), TrustBand::Flagged) << s;
  }
}

TEST(Classify, CustomThresholds) {
  BandThresholds t{5, 10, 90};
  EXPECT_EQ(classify(TrustScore(4), false, t), TrustBand::NoInfo);
  EXPECT_EQ(classify(TrustScore(5), false, t), TrustBand::Low);
  EXPECT_EQ(classify(TrustScore(89), false, t), TrustBand::Medium);
  EXPECT_EQ(classify(TrustScore(90), false, t), TrustBand::High);
  EXPECT_THROW(validate(BandThresholds{0, 30, 70}), Error);
  EXPECT_THROW(validate(BandThresholds{30, 20, 70}), Error);
  EXPECT_NO_THROW(validate(BandThresholds{30, 30, 70}));
  EXPECT_THROW(validate(BandThresholds{1, 30, 101}), Error);
}

TEST(Recent, Examples) {
  auto owner = key(0);
  EXPECT_TRUE(recent_counterparties({}, owner).empty());

  std::vector<HistoryEntry> h = {{1, key(1), Direction::Sent, 1}, {2, key(2), Direction::Received, 1},
                                 {3, key(1), Direction::Sent, 1}};
  auto l = recent_counterparties(h, owner);
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l.keys()[0], key(1));
  EXPECT_EQ(l.keys()[1], key(2));
}

TEST(Recent, TruncatesToFiftyMostRecent) {
  std::mt19937_64 rng(4);
  std::vector<HistoryEntry> h;
  std::vector<PublicKey> ks;
  for (int i = 0; i < 60; ++i) {
    ks.push_back(wot::testing::random_key(rng));
    h.push_back({static_cast<std::uint64_t>(i), ks.back(), Direction::Sent, 1});
  }
  auto l = recent_counterparties(h, key(0));
  ASSERT_EQ(l.size(), 50u);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(l.keys()[static_cast<std::size_t>(i)], ks[static_cast<std::size_t>(59 - i)]);
}

TEST(Recent, AlwaysAValidContactList) {
  std::mt19937_64 rng(8);
  std::vector<PublicKey> pool;
  for (int i = 0; i < 70; ++i) pool.push_back(wot::testing::random_key(rng));
  pool.push_back(key(0));
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<HistoryEntry> h;
    auto n = rng() % 300;
    for (std::uint64_t i = 0; i < n; ++i) h.push_back({i, pool[rng() % pool.size()], Direction::Sent, 1});
    auto l = recent_counterparties(h, key(0));
    EXPECT_LE(l.size(), 50u);
    EXPECT_FALSE(l.contains(key(0)));
  }
}

TEST(Penalty, FlagsAndResets) {
  auto s = with_score(key(3), 80);
  const auto& e = s.apply_penalty(key(3), fork_of(3), 9);
  EXPECT_TRUE(e.flagged);
  EXPECT_EQ(e.score.value(), 0);
  EXPECT_EQ(e.last_updated, 9u);
  auto snapshot = s.entries();
  s.apply_penalty(key(3), fork_of(3), 9);
  EXPECT_EQ(s.entries(), snapshot);
  EXPECT_NE(s.find(key(3)), nullptr);
}

TEST(Penalty, ConfigurableReset) {
  TrustStore s(key(0), {}, PenaltyPolicy{10});
  s.apply_contact_list(ContactList({key(3)}), 1);
  s.apply_penalty(key(3), fork_of(3), 2);
  EXPECT_EQ(s.lookup(key(3)).value(), 10);
}

TEST(Penalty, InvalidProofLeavesStoreUnchanged) {
  auto s = with_score(key(3), 80);
  auto snapshot = s.entries();
  auto bad = fork_of(3);
  bad.a.amount += 1;
  try {
    s.apply_penalty(key(3), bad, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidProof);
  }
  try {
    s.apply_penalty(key(4), fork_of(3), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SignerMismatch);
  }
  EXPECT_EQ(s.entries(), snapshot);
}

TEST(Decay, OffByDefaultAndFloored) {
  auto s = with_score(key(1), 3);
  s.decay(0, 1);
  EXPECT_EQ(s.lookup(key(1)).value(), 3);
  s.decay(5, 2);
  EXPECT_EQ(s.lookup(key(1)).value(), 0);
  EXPECT_NE(s.find(key(1)), nullptr);
}

TEST(Csv, RoundTrip) {
  TrustStore s(key(0));
  s.apply_contact_list(ContactList({key(1), key(2), key(3)}), 5);
  s.apply_contact_list(ContactList({key(2)}), 6);
  s.apply_penalty(key(3), fork_of(3), 7);
  auto csv = s.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "hex_key,score,flagged,last_updated");
  auto back = TrustStore::from_csv(csv, key(0));
  EXPECT_EQ(back.entries(), s.entries());
  EXPECT_EQ(back.to_csv(), csv);
}

TEST(Csv, Errors) {
  auto line = [](const std::string& body) { return "hex_key,score,flagged,last_updated\n" + body; };
  auto k = encode_key_hex(key(1));
  auto code_at = [&](const std::string& text, ErrorCode code, std::size_t pos) {
    try {
      TrustStore::from_csv(text, key(0));
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << text;
      EXPECT_EQ(e.position(), pos) << text;
    }
  };
  code_at("", ErrorCode::Parse, 1);
  code_at(k + ",1,0,0\n", ErrorCode::Parse, 1);
  code_at(line(k + ",101,0,0\n"), ErrorCode::Parse, 2);
  code_at(line(k + ",1,2,0\n"), ErrorCode::Parse, 2);
  code_at(line(k + ",1,0\n"), ErrorCode::Parse, 2);
  code_at(line(k + ",1,0,0\n" + k + ",2,0,0\n"), ErrorCode::Duplicate, 3);
  code_at(line(encode_key_hex(key(0)) + ",1,0,0\n"), ErrorCode::Parse, 2);
  code_at(line("zz,1,0,0\n"), ErrorCode::Parse, 2);
}
