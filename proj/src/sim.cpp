#include "wot/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <initializer_list>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace wot::sim {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::next() {
  state_ += kGolden;
  return mix(state_);
}

std::uint64_t Rng::uniform(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "uniform range must be non-empty");
  // Rejection sampling on the largest multiple of n.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

std::uint64_t Rng::uniform_between(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw Error(ErrorCode::InvalidArgument, "empty range");
  if (hi - lo == std::numeric_limits<std::uint64_t>::max()) return next();
  return lo + uniform(hi - lo + 1);
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

bool Rng::bernoulli(double p) { return unit() < p; }

Rng substream(std::uint64_t seed, Stream stream) {
  return Rng(mix(seed + static_cast<std::uint64_t>(stream) * kGolden));
}

std::vector<std::pair<std::size_t, std::size_t>> sample_encounters(Rng& rng, std::size_t n_peers,
                                                                   std::size_t m) {
  if (n_peers < 2) throw Error(ErrorCode::InvalidArgument, "encounters need at least two peers");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto sender = static_cast<std::size_t>(rng.uniform(n_peers));
    auto receiver = static_cast<std::size_t>(rng.uniform(n_peers - 1));
    if (receiver >= sender) ++receiver;
    pairs.emplace_back(sender, receiver);
  }
  return pairs;
}

void validate(const ChannelParams& p) {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(p.drop_probability) || !in_unit(p.duplicate_probability)) {
    throw Error(ErrorCode::Config, "channel probabilities must be in [0, 1]");
  }
}

LossyChannel::LossyChannel(ChannelParams params, Rng rng) : params_(params), rng_(rng) {
  validate(params_);
}

std::vector<wire::Packet> LossyChannel::carry(std::vector<wire::Packet> batch) {
  std::vector<wire::Packet> out;
  out.reserve(batch.size());
  for (auto& p : batch) {
    if (rng_.bernoulli(params_.drop_probability)) {
      ++dropped_;
      continue;
    }
    bool dup = rng_.bernoulli(params_.duplicate_probability);
    if (dup) {
      ++duplicated_;
      out.push_back(p);
    }
    out.push_back(std::move(p));
  }
  if (params_.reorder && out.size() > 1) {
    for (std::size_t i = out.size() - 1; i > 0; --i) {
      std::swap(out[i], out[static_cast<std::size_t>(rng_.uniform(i + 1))]);
    }
  }
  return out;
}

void validate(const SimConfig& c) {
  if (c.n_honest < 2) throw Error(ErrorCode::Config, "n_honest must be >= 2");
  if (!(c.transaction_probability >= 0.0 && c.transaction_probability <= 1.0)) {
    throw Error(ErrorCode::Config, "transaction_probability must be in [0, 1]");
  }
  validate(c.channel);
  if (c.amount.kind == AmountDistribution::Kind::Fixed && c.amount.lo == 0) {
    throw Error(ErrorCode::Config, "fixed amount must be > 0");
  }
  if (c.amount.kind == AmountDistribution::Kind::Uniform && (c.amount.lo == 0 || c.amount.hi < c.amount.lo)) {
    throw Error(ErrorCode::Config, "uniform amount needs 0 < lo <= hi");
  }
  for (const auto& a : c.adversaries) {
    if (a.amount == 0) throw Error(ErrorCode::Config, "adversary amount must be > 0");
    if (a.kind == AdversarySpec::Kind::DoubleSpender && a.fork_round == 0) {
      throw Error(ErrorCode::Config, "fork_round must be >= 1");
    }
  }
  peer::validate(c.policy);
}

// ---- config JSON ------------------------------------------------------------

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!obj.is_object()) throw Error(ErrorCode::Config, path + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
        allowed.end()) {
      throw Error(ErrorCode::Config, "unknown key '" + path + "." + key + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& path) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::Config, "bad value for '" + path + "." + key + "'");
  }
}

void read_count(const json& obj, const char* key, std::uint64_t& out, const std::string& path) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_number_unsigned()) {
    throw Error(ErrorCode::Config, "'" + path + "." + key + "' must be a non-negative integer");
  }
  out = obj.at(key).get<std::uint64_t>();
}

void read_size(const json& obj, const char* key, std::size_t& out, const std::string& path) {
  std::uint64_t v = out;
  read_count(obj, key, v, path);
  out = static_cast<std::size_t>(v);
}

}  // namespace

SimConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("config is not valid JSON: ") + e.what());
  }
  SimConfig c;
  check_keys(j,
             {"n_honest", "adversaries", "rounds", "encounters_per_round", "transaction_probability",
              "amount", "channel", "seed", "initial_balance", "policy"},
             "config");
  read_size(j, "n_honest", c.n_honest, "config");
  read_count(j, "rounds", c.rounds, "config");
  read_size(j, "encounters_per_round", c.encounters_per_round, "config");
  read(j, "transaction_probability", c.transaction_probability, "config");
  read_count(j, "seed", c.seed, "config");
  read_count(j, "initial_balance", c.initial_balance, "config");

  if (j.contains("amount")) {
    const auto& a = j["amount"];
    check_keys(a, {"kind", "value", "lo", "hi"}, "amount");
    std::string kind = "uniform";
    read(a, "kind", kind, "amount");
    if (kind == "fixed") {
      c.amount.kind = AmountDistribution::Kind::Fixed;
      c.amount.lo = c.amount.hi = 0;
      read_count(a, "value", c.amount.lo, "amount");
      c.amount.hi = c.amount.lo;
    } else if (kind == "uniform") {
      c.amount.kind = AmountDistribution::Kind::Uniform;
      read_count(a, "lo", c.amount.lo, "amount");
      read_count(a, "hi", c.amount.hi, "amount");
    } else {
      throw Error(ErrorCode::Config, "amount.kind must be 'fixed' or 'uniform'");
    }
  }
  if (j.contains("channel")) {
    const auto& ch = j["channel"];
    check_keys(ch, {"drop_probability", "duplicate_probability", "reorder"}, "channel");
    read(ch, "drop_probability", c.channel.drop_probability, "channel");
    read(ch, "duplicate_probability", c.channel.duplicate_probability, "channel");
    read(ch, "reorder", c.channel.reorder, "channel");
  }
  if (j.contains("adversaries")) {
    if (!j["adversaries"].is_array()) throw Error(ErrorCode::Config, "adversaries must be an array");
    for (const auto& a : j["adversaries"]) {
      check_keys(a, {"kind", "fork_round", "repetitions", "amount"}, "adversaries[]");
      AdversarySpec spec;
      std::string kind;
      read(a, "kind", kind, "adversaries[]");
      if (kind == "double_spender") {
        spec.kind = AdversarySpec::Kind::DoubleSpender;
      } else if (kind == "cycle_booster") {
        spec.kind = AdversarySpec::Kind::CycleBooster;
      } else {
        throw Error(ErrorCode::Config, "adversary kind must be 'double_spender' or 'cycle_booster'");
      }
      read_count(a, "fork_round", spec.fork_round, "adversaries[]");
      read_count(a, "repetitions", spec.repetitions, "adversaries[]");
      read_count(a, "amount", spec.amount, "adversaries[]");
      c.adversaries.push_back(spec);
    }
  }
  if (j.contains("policy")) {
    const auto& p = j["policy"];
    check_keys(p,
               {"segment_exchange", "segment_length", "direct_increment", "refuse_on_conflict",
                "decay_per_round", "penalty_score", "thresholds", "transfer"},
               "policy");
    auto& pol = c.policy;
    read(p, "segment_exchange", pol.segment_exchange, "policy");
    read_size(p, "segment_length", pol.segment_length, "policy");
    read(p, "direct_increment", pol.direct_increment, "policy");
    read(p, "refuse_on_conflict", pol.refuse_on_conflict, "policy");
    read(p, "decay_per_round", pol.decay_per_round, "policy");
    read(p, "penalty_score", pol.penalty.reset_score, "policy");
    if (p.contains("thresholds")) {
      const auto& t = p["thresholds"];
      check_keys(t, {"low", "medium", "high"}, "policy.thresholds");
      read(t, "low", pol.thresholds.low, "policy.thresholds");
      read(t, "medium", pol.thresholds.medium, "policy.thresholds");
      read(t, "high", pol.thresholds.high, "policy.thresholds");
    }
    if (p.contains("transfer")) {
      const auto& t = p["transfer"];
      check_keys(t, {"chunk_size", "window", "retry_budget", "timeout_rounds"}, "policy.transfer");
      read_size(t, "chunk_size", pol.transfer.chunk_size, "policy.transfer");
      read_size(t, "window", pol.transfer.window, "policy.transfer");
      if (t.contains("retry_budget") && t["retry_budget"] == "unbounded") {
        pol.transfer.retry_budget = wire::TransferParams::kUnboundedRetries;
      } else {
        read(t, "retry_budget", pol.transfer.retry_budget, "policy.transfer");
      }
      read(t, "timeout_rounds", pol.transfer.timeout_rounds, "policy.transfer");
    }
  }
  validate(c);
  return c;
}

std::string config_to_json(const SimConfig& c) {
  ordered_json j;
  j["n_honest"] = c.n_honest;
  auto adversaries = ordered_json::array();
  for (const auto& a : c.adversaries) {
    ordered_json o;
    if (a.kind == AdversarySpec::Kind::DoubleSpender) {
      o["kind"] = "double_spender";
      o["fork_round"] = a.fork_round;
    } else {
      o["kind"] = "cycle_booster";
      o["repetitions"] = a.repetitions;
    }
    o["amount"] = a.amount;
    adversaries.push_back(o);
  }
  j["adversaries"] = adversaries;
  j["rounds"] = c.rounds;
  j["encounters_per_round"] = c.encounters_per_round;
  j["transaction_probability"] = c.transaction_probability;
  if (c.amount.kind == AmountDistribution::Kind::Fixed) {
    j["amount"] = {{"kind", "fixed"}, {"value", c.amount.lo}};
  } else {
    j["amount"] = {{"kind", "uniform"}, {"lo", c.amount.lo}, {"hi", c.amount.hi}};
  }
  j["channel"] = {{"drop_probability", c.channel.drop_probability},
                  {"duplicate_probability", c.channel.duplicate_probability},
                  {"reorder", c.channel.reorder}};
  j["seed"] = c.seed;
  j["initial_balance"] = c.initial_balance;
  const auto& p = c.policy;
  ordered_json pol;
  pol["segment_exchange"] = p.segment_exchange;
  pol["segment_length"] = p.segment_length;
  pol["direct_increment"] = p.direct_increment;
  pol["refuse_on_conflict"] = p.refuse_on_conflict;
  pol["decay_per_round"] = p.decay_per_round;
  pol["penalty_score"] = p.penalty.reset_score;
  pol["thresholds"] = {{"low", p.thresholds.low}, {"medium", p.thresholds.medium}, {"high", p.thresholds.high}};
  ordered_json transfer;
  transfer["chunk_size"] = p.transfer.chunk_size;
  transfer["window"] = p.transfer.window;
  if (p.transfer.retry_budget == wire::TransferParams::kUnboundedRetries) {
    transfer["retry_budget"] = "unbounded";
  } else {
    transfer["retry_budget"] = p.transfer.retry_budget;
  }
  transfer["timeout_rounds"] = p.transfer.timeout_rounds;
  pol["transfer"] = transfer;
  j["policy"] = pol;
  return j.dump(2);
}

const char* to_string(NodeClass c) {
  switch (c) {
    case NodeClass::Honest: return "honest";
    case NodeClass::DoubleSpender: return "double_spender";
    case NodeClass::CycleBooster: return "cycle_booster";
  }
  return "?";
}

// ---- simulation -------------------------------------------------------------

namespace {

class Simulation {
 public:
  explicit Simulation(const SimConfig& config)
      : config_(config),
        encounters_(substream(config.seed, Stream::Encounters)),
        transactions_(substream(config.seed, Stream::Transactions)),
        amounts_(substream(config.seed, Stream::Amounts)),
        adversary_(substream(config.seed, Stream::Adversary)),
        channel_(config.channel, substream(config.seed, Stream::Channel)) {
    validate(config);
    build_population();
  }

  SimRun run() {
    for (std::uint64_t round = 1; round <= config_.rounds; ++round) step(round);
    finish();
    return SimRun{std::move(metrics_), std::move(peers_)};
  }

 private:
  void build_population() {
    auto ids = substream(config_.seed, Stream::Identities);
    auto add = [&](NodeClass cls) {
      std::array<std::uint8_t, kSeedSize> seed{};
      for (std::size_t i = 0; i < kSeedSize; i += 8) {
        auto v = ids.next();
        for (std::size_t b = 0; b < 8; ++b) seed[i + b] = static_cast<std::uint8_t>(v >> (8 * b));
      }
      peers_.emplace_back(generate_identity(seed), config_.initial_balance, config_.policy);
      index_.emplace(peers_.back().key(), peers_.size() - 1);
      metrics_.peer_keys.push_back(encode_key_hex(peers_.back().key()));
      metrics_.peer_classes.push_back(cls);
      return peers_.size() - 1;
    };
    for (std::size_t i = 0; i < config_.n_honest; ++i) add(NodeClass::Honest);
    for (const auto& spec : config_.adversaries) {
      if (spec.kind == AdversarySpec::Kind::DoubleSpender) {
        auto idx = add(NodeClass::DoubleSpender);
        double_spenders_.push_back({idx, spec});
        metrics_.aware_fraction_curve[idx];
        metrics_.strict_conservation = false;
      } else {
        auto a = add(NodeClass::CycleBooster);
        auto b = add(NodeClass::CycleBooster);
        boosters_.push_back({a, b, spec});
      }
    }
    metrics_.initial_total = static_cast<std::int64_t>(config_.initial_balance * peers_.size());
    mentions_.assign(peers_.size(), std::vector<std::uint64_t>(peers_.size(), 0));
    direct_payments_.assign(peers_.size(), std::vector<std::uint64_t>(peers_.size(), 0));
  }

  void absorb(std::size_t sender, std::size_t receiver, const peer::EncounterOutcome& out,
              std::uint64_t round, RoundStats& stats) {
    stats.bytes += out.bytes_transferred;
    if (out.paid) {
      ++stats.transactions;
      ++direct_payments_[receiver][sender];
      if (!out.list_delivered) ++metrics_.list_transfers_failed;
    } else if (out.failure == ErrorCode::InvalidProof) {
      ++metrics_.payments_refused;
    }
    for (const auto& key : out.delivered_list.keys()) {
      auto it = index_.find(key);
      if (it != index_.end()) ++mentions_[receiver][it->second];
    }
    for (const auto& d : out.detections) {
      auto detector = index_.at(d.detector);
      auto offender_it = index_.find(d.proof.offender());
      if (offender_it == index_.end()) continue;
      auto offender = offender_it->second;
      if (!detected_.insert({detector, offender}).second) continue;
      metrics_.detections.push_back({round, detector, offender});
      ++stats.detections;
      for (auto& ev : metrics_.double_spends) {
        if (ev.offender == offender && round >= ev.round && !ev.latency_rounds) {
          ev.latency_rounds = round - ev.round;
        }
      }
    }
  }

  void step(std::uint64_t round) {
    RoundStats stats;
    stats.round = round;
    if (config_.policy.decay_per_round > 0) {
      for (auto& p : peers_) p.store().decay(config_.policy.decay_per_round, round);
    }

    for (const auto& [idx, spec] : double_spenders_) {
      if (spec.fork_round != round) continue;
      auto v1 = static_cast<std::size_t>(adversary_.uniform(config_.n_honest));
      auto v2 = static_cast<std::size_t>(adversary_.uniform(config_.n_honest - 1));
      if (v2 >= v1) ++v2;
      auto& adv = peers_[idx];
      // Evidence shown to both victims stops short of the forked sequence.
      std::vector<ledger::Block> presented;
      if (config_.policy.segment_exchange) {
        presented = ledger::evidence_segment(adv.chain(), config_.policy.segment_length);
      }
      auto [p1, p2] = peer::adversary_double_spend(adv, peers_[v1].key(), peers_[v2].key(), spec.amount);
      DoubleSpendEvent ev{idx, round, spec.amount, v1, v2, false, std::nullopt};
      metrics_.double_spends.push_back(ev);
      auto o1 = peer::complete_payment(adv, peers_[v1], p1, presented, round, channel_);
      absorb(idx, v1, o1, round, stats);
      auto o2 = peer::complete_payment(adv, peers_[v2], p2, presented, round, channel_);
      absorb(idx, v2, o2, round, stats);
      bool both = o1.paid && o2.paid;
      for (auto& e : metrics_.double_spends) {
        if (e.offender == idx && e.round == round) e.both_paid = both;
      }
      if (both) metrics_.created_surplus += static_cast<std::int64_t>(spec.amount);
    }

    for (const auto& [a, b, spec] : boosters_) {
      if (round > spec.repetitions) continue;
      auto payer = round % 2 == 1 ? a : b;
      auto payee = round % 2 == 1 ? b : a;
      absorb(payer, payee, peer::transact(peers_[payer], peers_[payee], spec.amount, round, channel_),
             round, stats);
    }

    for (const auto& [s, r] : sample_encounters(encounters_, peers_.size(), config_.encounters_per_round)) {
      if (!transactions_.bernoulli(config_.transaction_probability)) continue;
      std::uint64_t amount = config_.amount.kind == AmountDistribution::Kind::Fixed
                                 ? config_.amount.lo
                                 : amounts_.uniform_between(config_.amount.lo, config_.amount.hi);
      absorb(s, r, peer::transact(peers_[s], peers_[r], amount, round, channel_), round, stats);
    }

    // awareness: honest peers holding a flag for each double spender
    double aware_sum = 0.0;
    for (auto& [offender, curve] : metrics_.aware_fraction_curve) {
      std::size_t aware = 0;
      for (std::size_t h = 0; h < config_.n_honest; ++h) {
        if (peers_[h].store().flagged(peers_[offender].key())) ++aware;
      }
      double fraction = static_cast<double>(aware) / static_cast<double>(config_.n_honest);
      curve.push_back(fraction);
      aware_sum += fraction;
    }
    if (!metrics_.aware_fraction_curve.empty()) {
      stats.aware_fraction = aware_sum / static_cast<double>(metrics_.aware_fraction_curve.size());
    }

    for (const auto& p : peers_) stats.balance_total += p.balance();
    if (stats.balance_total != metrics_.initial_total + metrics_.created_surplus) {
      metrics_.conservation_ok = false;
    }
    metrics_.bytes_total += stats.bytes;
    metrics_.transactions_total += stats.transactions;
    metrics_.rounds.push_back(stats);
  }

  void finish() {
    for (auto cls : {NodeClass::Honest, NodeClass::DoubleSpender, NodeClass::CycleBooster}) {
      ScoreHistogram hist{};
      bool any = false;
      for (std::size_t h = 0; h < config_.n_honest; ++h) {
        for (std::size_t s = 0; s < peers_.size(); ++s) {
          if (s == h || metrics_.peer_classes[s] != cls) continue;
          any = true;
          auto score = peers_[h].store().lookup(peers_[s].key()).value();
          ++hist[static_cast<std::size_t>(score / 10)];
        }
      }
      if (any) metrics_.score_histograms[cls] = hist;
    }

    if (config_.policy.decay_per_round == 0) {
      for (const auto& [a, b, spec] : boosters_) {
        for (auto booster : {a, b}) {
          for (std::size_t h = 0; h < config_.n_honest; ++h) {
            const auto& store = peers_[h].store();
            if (store.flagged(peers_[booster].key())) continue;
            auto expected = mentions_[h][booster];
            if (config_.policy.direct_increment) expected += direct_payments_[h][booster];
            expected = std::min<std::uint64_t>(expected, trust::kMaxScore);
            ++metrics_.boost_checks;
            if (static_cast<std::uint64_t>(store.lookup(peers_[booster].key()).value()) != expected) {
              ++metrics_.boost_mismatches;
            }
          }
        }
      }
    }
  }

  struct Booster {
    std::size_t a;
    std::size_t b;
    AdversarySpec spec;
  };

  SimConfig config_;
  Rng encounters_;
  Rng transactions_;
  Rng amounts_;
  Rng adversary_;
  LossyChannel channel_;

  std::vector<peer::Peer> peers_;
  std::map<PublicKey, std::size_t> index_;
  std::vector<std::pair<std::size_t, AdversarySpec>> double_spenders_;
  std::vector<Booster> boosters_;
  std::set<std::pair<std::size_t, std::size_t>> detected_;
  std::vector<std::vector<std::uint64_t>> mentions_;         // [receiver][subject]
  std::vector<std::vector<std::uint64_t>> direct_payments_;  // [receiver][payer]
  Metrics metrics_;
};

}  // namespace

SimRun run_simulation_with_peers(const SimConfig& config) { return Simulation(config).run(); }

Metrics run_simulation(const SimConfig& config) { return run_simulation_with_peers(config).metrics; }

std::vector<Metrics> run_many(const std::vector<SimConfig>& configs, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<Metrics> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        results[i] = run_simulation(configs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::string summary_json(const Metrics& m) {
  ordered_json j;
  j["peers"] = m.peer_keys.size();
  auto classes = ordered_json::array();
  for (std::size_t i = 0; i < m.peer_keys.size(); ++i) {
    classes.push_back({{"index", i}, {"key", m.peer_keys[i]}, {"class", to_string(m.peer_classes[i])}});
  }
  j["population"] = classes;
  j["rounds"] = m.rounds.size();
  j["transactions_total"] = m.transactions_total;
  j["payments_refused"] = m.payments_refused;
  j["list_transfers_failed"] = m.list_transfers_failed;
  j["bytes_total"] = m.bytes_total;

  auto detections = ordered_json::array();
  for (const auto& d : m.detections) {
    detections.push_back({{"round", d.round}, {"detector", d.detector}, {"offender", d.offender}});
  }
  j["detections"] = detections;

  auto spends = ordered_json::array();
  for (const auto& e : m.double_spends) {
    ordered_json o;
    o["offender"] = e.offender;
    o["round"] = e.round;
    o["amount"] = e.amount;
    o["victims"] = {e.first_victim, e.second_victim};
    o["both_paid"] = e.both_paid;
    o["detection_latency_rounds"] = e.latency_rounds ? ordered_json(*e.latency_rounds) : ordered_json(nullptr);
    spends.push_back(o);
  }
  j["double_spends"] = spends;

  ordered_json aware = ordered_json::object();
  for (const auto& [offender, curve] : m.aware_fraction_curve) aware[std::to_string(offender)] = curve;
  j["aware_fraction_curve"] = aware;

  ordered_json hist = ordered_json::object();
  for (const auto& [cls, h] : m.score_histograms) hist[to_string(cls)] = h;
  j["score_histograms"] = hist;

  j["conservation"] = {{"mode", m.strict_conservation ? "strict" : "audit"},
                       {"initial_total", m.initial_total},
                       {"created_surplus", m.created_surplus},
                       {"ok", m.conservation_ok}};
  j["cycle_boost"] = {{"checks", m.boost_checks}, {"mismatches", m.boost_mismatches}};
  return j.dump(2) + "\n";
}

std::string rounds_csv(const Metrics& m) {
  std::string out = "round,detections,aware_fraction,bytes,transactions\n";
  char line[128];
  for (const auto& r : m.rounds) {
    std::snprintf(line, sizeof line, "%llu,%zu,%.6f,%llu,%zu\n",
                  static_cast<unsigned long long>(r.round), r.detections, r.aware_fraction,
                  static_cast<unsigned long long>(r.bytes), r.transactions);
    out += line;
  }
  return out;
}

}  // namespace wot::sim
