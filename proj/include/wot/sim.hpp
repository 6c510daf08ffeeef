#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wot/peer.hpp"
#include "wot/wire.hpp"

namespace wot::sim {

// SplitMix64. Sub-streams for independent subsystems are derived from the run
// seed by counter: stream k starts from mix(seed + k * 0x9e3779b97f4a7c15), so
// adding a subsystem never shifts another one's draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Unbiased integer in [0, n); n > 0.
  std::uint64_t uniform(std::uint64_t n);
  // [lo, hi] inclusive.
  std::uint64_t uniform_between(std::uint64_t lo, std::uint64_t hi);
  // 53-bit double in [0, 1).
  double unit();
  // Always false for p <= 0 and true for p >= 1, but still consumes one draw.
  bool bernoulli(double p);

 private:
  std::uint64_t state_;
};

enum class Stream : std::uint64_t {
  Identities = 1,
  Encounters = 2,
  Transactions = 3,
  Amounts = 4,
  Channel = 5,
  Adversary = 6,
};

Rng substream(std::uint64_t seed, Stream stream);

// m ordered (sender, receiver) pairs drawn uniformly, sender != receiver.
std::vector<std::pair<std::size_t, std::size_t>> sample_encounters(Rng& rng, std::size_t n_peers,
                                                                   std::size_t m);

struct ChannelParams {
  double drop_probability = 0.0;
  double duplicate_probability = 0.0;
  bool reorder = false;
};

void validate(const ChannelParams& params);

// Per packet: drop with p_drop, otherwise deliver and add one duplicate with
// p_dup. With reorder on, each carried batch is shuffled. Bytes are never
// altered.
class LossyChannel final : public wire::PacketChannel {
 public:
  LossyChannel(ChannelParams params, Rng rng);

  std::vector<wire::Packet> carry(std::vector<wire::Packet> batch) override;

  std::uint64_t dropped() const { return dropped_; }
  std::uint64_t duplicated() const { return duplicated_; }

 private:
  ChannelParams params_;
  Rng rng_;
  std::uint64_t dropped_ = 0;
  std::uint64_t duplicated_ = 0;
};

struct AmountDistribution {
  enum class Kind { Fixed, Uniform };
  Kind kind = Kind::Uniform;
  std::uint64_t lo = 10;  // Fixed uses lo
  std::uint64_t hi = 500;
};

struct AdversarySpec {
  enum class Kind { DoubleSpender, CycleBooster };
  Kind kind = Kind::DoubleSpender;
  // double_spender: forks once in this round toward two random honest peers.
  std::uint64_t fork_round = 10;
  // cycle_booster: the pair alternates one payment per round for this many
  // rounds, starting at round 1.
  std::uint64_t repetitions = 20;
  std::uint64_t amount = 500;
};

struct SimConfig {
  std::size_t n_honest = 32;
  std::vector<AdversarySpec> adversaries;
  std::uint64_t rounds = 200;
  std::size_t encounters_per_round = 16;
  double transaction_probability = 1.0;
  AmountDistribution amount;
  ChannelParams channel;
  std::uint64_t seed = 1;
  std::uint64_t initial_balance = 10000;
  peer::PeerPolicy policy;
};

void validate(const SimConfig& config);

// Strict JSON: unknown keys are rejected. Missing keys take the defaults
// above. Throws Error(Config | Parse).
SimConfig config_from_json(const std::string& text);
std::string config_to_json(const SimConfig& config);

enum class NodeClass { Honest, DoubleSpender, CycleBooster };

const char* to_string(NodeClass c);

struct DetectionRecord {
  std::uint64_t round = 0;
  std::size_t detector = 0;
  std::size_t offender = 0;
};

struct DoubleSpendEvent {
  std::size_t offender = 0;
  std::uint64_t round = 0;
  std::uint64_t amount = 0;
  std::size_t first_victim = 0;
  std::size_t second_victim = 0;
  bool both_paid = false;
  std::optional<std::uint64_t> latency_rounds;  // first detection - spend round
};

struct RoundStats {
  std::uint64_t round = 0;
  std::size_t detections = 0;
  double aware_fraction = 0.0;  // mean over double spenders; 0 without any
  std::uint64_t bytes = 0;
  std::size_t transactions = 0;
  std::int64_t balance_total = 0;
};

using ScoreHistogram = std::array<std::uint64_t, 11>;  // [0,10) ... [90,100) and 100

struct Metrics {
  std::vector<std::string> peer_keys;  // hex, by peer index
  std::vector<NodeClass> peer_classes;

  std::vector<DetectionRecord> detections;
  std::vector<DoubleSpendEvent> double_spends;
  std::map<std::size_t, std::vector<double>> aware_fraction_curve;  // per offender, per round
  std::map<NodeClass, ScoreHistogram> score_histograms;  // scores honest peers hold, by subject class

  std::uint64_t bytes_total = 0;
  std::size_t transactions_total = 0;
  std::size_t payments_refused = 0;
  std::size_t list_transfers_failed = 0;

  // Strict mode (no double spenders): balance total equals the initial total
  // every round. Audit mode: it equals initial + created_surplus, the sum of
  // forked amounts credited without a matching debit.
  bool strict_conservation = true;
  std::int64_t initial_total = 0;
  std::int64_t created_surplus = 0;
  bool conservation_ok = true;

  // Honest peers' score for each cycle booster vs the number of received
  // lists naming that booster (clamped at 100).
  std::size_t boost_checks = 0;
  std::size_t boost_mismatches = 0;

  std::vector<RoundStats> rounds;
};

struct SimRun {
  Metrics metrics;
  std::vector<peer::Peer> peers;
};

SimRun run_simulation_with_peers(const SimConfig& config);
Metrics run_simulation(const SimConfig& config);

// Runs independent configurations on up to `threads` workers; results keep
// input order.
std::vector<Metrics> run_many(const std::vector<SimConfig>& configs, unsigned threads = 0);

std::string summary_json(const Metrics& metrics);

// `round,detections,aware_fraction,bytes,transactions`
std::string rounds_csv(const Metrics& metrics);

}  // namespace wot::sim
