// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../oracle.hpp"
#include "../support.hpp"
#include "wot/peer.hpp"
#include "wot/sim.hpp"
#include "wot/trust.hpp"
#include "wot/wire.hpp"

using namespace wot;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

sim::SimConfig reference_config() {
  return sim::config_from_json(wot::testing::read_file(std::string(WOT_CONFIG_DIR) + "/reference.json"));
}

Verdict payload_size_law() {
  std::mt19937_64 rng(1);
  std::vector<PublicKey> keys;
  for (int i = 0; i < 50; ++i) keys.push_back(wot::testing::identity_from_rng(rng).public_key());
  auto body = wire::encode_contact_payload(trust::ContactList(keys));
  bool ok = body.size() == 3700 && body.size() * 8 == 29600;
  return {ok, fmt("50 keys -> %zu octets, %zu bits", body.size(), body.size() * 8)};
}

Verdict trust_semantics() {
  auto owner = wot::testing::identity_for(0).public_key();
  auto k = wot::testing::identity_for(1).public_key();
  auto fresh = wot::testing::identity_for(2).public_key();
  int failures = 0;

  trust::TrustStore empty(owner);
  if (empty.lookup(k).value() != 0) ++failures;

  for (int s = 0; s <= 100; ++s) {
    auto csv = "hex_key,score,flagged,last_updated\n" + encode_key_hex(k) + "," + std::to_string(s) + ",0,0\n";
    auto store = trust::TrustStore::from_csv(csv, owner);
    if (store.lookup(k).value() != s) ++failures;
    auto sum = store.apply_contact_list(trust::ContactList({k, fresh}), 1);
    if (store.lookup(k).value() != std::min(100, s + 1)) ++failures;
    if (store.lookup(fresh).value() != 1 || sum.inserted != 1 || sum.incremented != 1) ++failures;
    auto expected = s == 0 ? trust::TrustBand::NoInfo
                    : s < 30 ? trust::TrustBand::Low
                    : s < 70 ? trust::TrustBand::Medium
                             : trust::TrustBand::High;
    if (trust::classify(trust::TrustScore(s), false) != expected) ++failures;
    if (trust::classify(trust::TrustScore(s), true) != trust::TrustBand::Flagged) ++failures;
  }
  return {failures == 0, fmt("101 scores checked, %d failures", failures)};
}

Verdict codec_round_trips() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(3);
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    auto key = wot::testing::random_key(rng);
    if (decode_key_hex(encode_key_hex(key)) != key) ++failures;
  }
  for (int i = 0; i < 1000; ++i) {
    std::vector<PublicKey> keys;
    auto n = rng() % 51;
    for (std::uint64_t j = 0; j < n; ++j) keys.push_back(wot::testing::random_key(rng));
    trust::ContactList list(keys);
    auto body = wire::encode_contact_payload(list);
    if (body.size() != 74 * n || wire::decode_contact_payload(body) != list) ++failures;
  }
  double t = seconds_since(t0);
  return {failures == 0 && t < 1.0, fmt("2000 round-trips, %d failures, %.3f s", failures, t)};
}

Verdict fork_oracle_equivalence() {
  auto t0 = Clock::now();
  wot::testing::BlockPool pool(10, 20);
  std::mt19937_64 rng(4);
  int mismatches = 0;
  int with_forks = 0;
  for (int i = 0; i < 500; ++i) {
    bool inject = rng() % 2 == 0;
    auto set = pool.random_set(rng, 200, inject);
    auto expected = wot::testing::brute_force_conflicts(set);
    if (!expected.empty()) ++with_forks;
    if (wot::testing::as_groups(ledger::find_double_spends(set)) != expected) ++mismatches;
  }
  double t = seconds_since(t0);
  return {mismatches == 0 && t < 10.0,
          fmt("500 sets (%d with forks), %d mismatches, %.2f s", with_forks, mismatches, t)};
}

Verdict transfer_under_loss() {
  auto t0 = Clock::now();
  auto recipient = wot::testing::identity_for(9);
  TestCipher cipher;
  std::mt19937_64 rng(5);
  std::vector<PublicKey> keys;
  for (int i = 0; i < 50; ++i) keys.push_back(wot::testing::random_key(rng));
  auto payload = wire::encode_contact_payload(trust::ContactList(keys));
  wire::TransferParams params;

  int failures = 0;
  std::uint64_t worst = 0;
  std::uint64_t ideal = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto id = wire::message_id_for(recipient.public_key(), seed);
    auto sealed = wire::seal_message(cipher, recipient.public_key(), payload, id);
    ideal = wire::ideal_rounds(sealed.size(), params);
    sim::LossyChannel channel({0.3, 0.1, true}, sim::substream(seed, sim::Stream::Channel));
    auto out = wire::run_transfer(sealed, id, channel, params);
    bool ok = out.completed && out.received == sealed && out.completion_round <= 10 * ideal;
    if (ok) ok = wire::open_message(cipher, recipient, out.received).payload == payload;
    if (!ok) ++failures;
    worst = std::max(worst, out.completion_round);
  }
  double t = seconds_since(t0);
  return {failures == 0 && t < 30.0,
          fmt("200 seeds, %d failures, slowest completion round %llu (bound %llu), %.2f s", failures,
              static_cast<unsigned long long>(worst), static_cast<unsigned long long>(10 * ideal), t)};
}

Verdict three_node_double_spend() {
  auto t0 = Clock::now();
  auto scenario = [] {
    auto a = wot::testing::make_peer(30);
    auto b = wot::testing::make_peer(31);
    auto c = wot::testing::make_peer(32);
    wire::PerfectChannel ch;
    auto [p1, p2] = peer::adversary_double_spend(a, b.key(), c.key(), 700);
    auto ob = peer::complete_payment(a, b, p1, {}, 1, ch);
    auto oc = peer::complete_payment(a, c, p2, {}, 1, ch);
    bool silent = ob.paid && oc.paid && ob.conflicts_found.empty() && oc.conflicts_found.empty();
    auto meet = peer::transact(b, c, 10, 2, ch);
    bool proof_ok = !meet.conflicts_found.empty() && ledger::verify_conflict(meet.conflicts_found[0]) &&
                    meet.conflicts_found[0].offender() == a.key();
    bool flagged = b.store().band(a.key()) == trust::TrustBand::Flagged &&
                   c.store().band(a.key()) == trust::TrustBand::Flagged;
    std::string trace = meet.conflicts_found.empty() ? "" : to_hex(ledger::block_digest(meet.conflicts_found[0].a));
    return std::make_tuple(silent, proof_ok, flagged, trace);
  };
  auto first = scenario();
  auto second = scenario();
  auto [silent, proof_ok, flagged, trace] = first;
  double t = seconds_since(t0);
  bool ok = silent && proof_ok && flagged && first == second && t < 1.0;
  return {ok, fmt("victims accept alone=%d, proof valid=%d, flagged at both=%d, deterministic=%d, %.3f s", silent,
                  proof_ok, flagged, first == second ? 1 : 0, t)};
}

Verdict gossip_ablation() {
  auto t0 = Clock::now();
  std::vector<sim::SimConfig> configs;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    sim::SimConfig c;
    c.n_honest = 32;
    c.rounds = 200;
    c.seed = seed;
    c.channel = {0.1, 0.05, true};
    c.adversaries = {sim::AdversarySpec{sim::AdversarySpec::Kind::DoubleSpender, 10, 20, 500}};
    c.policy.segment_exchange = true;
    configs.push_back(c);
    c.policy.segment_exchange = false;
    configs.push_back(c);
  }
  auto results = sim::run_many(configs);
  std::size_t on_total = 0, off_total = 0;
  int violations = 0;
  for (std::size_t i = 0; i < results.size(); i += 2) {
    auto on = results[i].detections.size();
    auto off = results[i + 1].detections.size();
    on_total += on;
    off_total += off;
    if (on < off) ++violations;
  }
  double t = seconds_since(t0);
  bool ok = violations == 0 && on_total > off_total && t < 300.0;
  return {ok, fmt("100 pairs, detections on=%zu off=%zu, %d pairs with on<off, %.1f s", on_total, off_total,
                  violations, t)};
}

Verdict cycle_boost_accounting() {
  int failures = 0;
  int cases = 0;
  for (std::size_t k = 0; k <= 6; ++k) {
    for (int m = 1; m <= 4; ++m) {
      auto a = wot::testing::make_peer(40);
      auto b = wot::testing::make_peer(41);
      auto t = wot::testing::make_peer(42);
      wire::PerfectChannel ch;
      int lists_with_b = 0;
      for (std::size_t i = 0; i < k; ++i) {
        auto& payer = i % 2 == 0 ? a : b;
        auto& payee = i % 2 == 0 ? b : a;
        peer::transact(payer, payee, 10, 1, ch);
      }
      for (int j = 0; j < m; ++j) {
        auto o = peer::transact(a, t, 10, 2, ch);
        if (o.list_delivered && o.delivered_list.contains(b.key())) ++lists_with_b;
      }
      // hand trace: every list A sends after meeting B names B once
      int hand = k == 0 ? 0 : m;
      int score = t.store().lookup(b.key()).value();
      if (score != hand || score != lists_with_b) ++failures;
      ++cases;
    }
  }
  auto m = sim::run_simulation(reference_config());
  bool sim_ok = m.boost_checks > 0 && m.boost_mismatches == 0;
  return {failures == 0 && sim_ok, fmt("%d hand-traced cases, %d failures; reference run %zu checks, %zu mismatches",
                                       cases, failures, m.boost_checks, m.boost_mismatches)};
}

Verdict determinism() {
  auto c = reference_config();
  auto a = sim::run_simulation(c);
  auto b = sim::run_simulation(c);
  auto sa = sim::summary_json(a), ra = sim::rounds_csv(a);
  bool same = sa == sim::summary_json(b) && ra == sim::rounds_csv(b);
  bool golden = sa == wot::testing::read_file(wot::testing::golden_path("reference_summary.json")) &&
                ra == wot::testing::read_file(wot::testing::golden_path("reference_rounds.csv"));
  return {same && golden, fmt("two runs identical=%d, matches frozen golden files=%d", same, golden)};
}

Verdict conservation() {
  auto c = reference_config();
  c.adversaries.clear();
  c.rounds = 200;
  auto run = sim::run_simulation_with_peers(c);
  const auto& m = run.metrics;
  int bad_rounds = 0;
  for (const auto& r : m.rounds) {
    if (r.balance_total != m.initial_total) ++bad_rounds;
  }
  std::int64_t final_total = 0;
  for (const auto& p : run.peers) final_total += p.balance();
  bool ok = m.strict_conservation && m.conservation_ok && bad_rounds == 0 && m.rounds.size() == 200 &&
            final_total == m.initial_total && m.transactions_total > 0;
  return {ok, fmt("%zu rounds, %zu transactions, total %lld, %d rounds off", m.rounds.size(), m.transactions_total,
                  static_cast<long long>(final_total), bad_rounds)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  std::vector<Criterion> criteria = {
      {"payload size law", payload_size_law},
      {"trust semantics", trust_semantics},
      {"codec and hex round-trips", codec_round_trips},
      {"fork detection oracle equivalence", fork_oracle_equivalence},
      {"transfer integrity under loss", transfer_under_loss},
      {"three-node double spend", three_node_double_spend},
      {"gossip ablation", gossip_ablation},
      {"cycle-boost accounting", cycle_boost_accounting},
      {"determinism", determinism},
      {"conservation", conservation},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s  %2zu  %-36s %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
