// wot: command-line front end over the C API in libwot.

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wot/wot.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitUnwritable = 3;
constexpr int kExitTransfer = 4;

struct CFree {
  void operator()(void* p) const { wot_free(p); }
};
using CString = std::unique_ptr<char, CFree>;

int fail(int code, const std::string& message) {
  std::cerr << "wot: " << message << "\n";
  return code;
}

int fail_c(int code, const std::string& context) {
  return fail(code, context + ": " + wot_last_error());
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const fs::path& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  return static_cast<bool>(out);
}

bool write_text(const fs::path& path, const char* text) {
  return write_file(path, text, std::char_traits<char>::length(text));
}

int run_simulate(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir,
                 bool dump) {
  wot_sim_config* raw_config = nullptr;
  if (wot_sim_config_load(config_path.c_str(), &raw_config) != WOT_OK) {
    return fail_c(kExitBadInput, "bad config '" + config_path + "'");
  }
  std::unique_ptr<wot_sim_config, decltype(&wot_sim_config_free)> config(raw_config, wot_sim_config_free);
  if (seed) wot_sim_config_set_seed(config.get(), *seed);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) return fail(kExitUnwritable, "cannot create output directory '" + out_dir + "'");

  wot_sim_result* raw_result = nullptr;
  if (wot_sim_run(config.get(), &raw_result) != WOT_OK) return fail_c(kExitFailure, "simulation failed");
  std::unique_ptr<wot_sim_result, decltype(&wot_sim_result_free)> result(raw_result, wot_sim_result_free);

  char* summary = nullptr;
  char* rounds = nullptr;
  if (wot_sim_summary_json(result.get(), &summary) != WOT_OK) return fail_c(kExitFailure, "summary");
  CString summary_owner(summary);
  if (wot_sim_rounds_csv(result.get(), &rounds) != WOT_OK) return fail_c(kExitFailure, "rounds");
  CString rounds_owner(rounds);

  fs::path dir(out_dir);
  if (!write_text(dir / "summary.json", summary) || !write_text(dir / "rounds.csv", rounds)) {
    return fail(kExitUnwritable, "cannot write into '" + out_dir + "'");
  }

  if (dump) {
    fs::create_directories(dir / "peers", ec);
    if (ec) return fail(kExitUnwritable, "cannot create '" + (dir / "peers").string() + "'");
    for (std::size_t i = 0; i < wot_sim_peer_count(result.get()); ++i) {
      char* peer = nullptr;
      if (wot_sim_peer_dump_json(result.get(), i, &peer) != WOT_OK) return fail_c(kExitFailure, "peer dump");
      CString owner(peer);
      if (!write_text(dir / "peers" / (std::to_string(i) + ".json"), peer)) {
        return fail(kExitUnwritable, "cannot write peer dumps");
      }
    }
    char* blocks = nullptr;
    if (wot_sim_blocks_jsonl(result.get(), &blocks) != WOT_OK) return fail_c(kExitFailure, "blocks");
    CString owner(blocks);
    if (!write_text(dir / "blocks.jsonl", blocks)) return fail(kExitUnwritable, "cannot write blocks.jsonl");
  }

  std::cout << "peers=" << wot_sim_peer_count(result.get())
            << " transactions=" << wot_sim_transactions_total(result.get())
            << " detections=" << wot_sim_detections(result.get())
            << " bytes=" << wot_sim_bytes_total(result.get()) << " out=" << out_dir << "\n";
  return kExitOk;
}

int run_codec_encode(const std::string& keys_path, const std::string& out_path) {
  auto text = read_file(keys_path);
  if (!text) return fail(kExitBadInput, "cannot read '" + keys_path + "'");
  std::uint8_t* body = nullptr;
  std::size_t size = 0;
  if (wot_payload_encode_lines(text->c_str(), &body, &size) != WOT_OK) {
    return fail_c(kExitBadInput, keys_path);
  }
  std::unique_ptr<std::uint8_t, CFree> owner(body);
  if (!out_path.empty() && !write_file(out_path, body, size)) {
    return fail(kExitUnwritable, "cannot write '" + out_path + "'");
  }
  std::cout << size << "\n";
  return kExitOk;
}

int run_codec_decode(const std::string& payload_path, const std::string& out_path) {
  auto data = read_file(payload_path);
  if (!data) return fail(kExitBadInput, "cannot read '" + payload_path + "'");
  char* lines = nullptr;
  if (wot_payload_decode_lines(reinterpret_cast<const std::uint8_t*>(data->data()), data->size(), &lines) !=
      WOT_OK) {
    return fail_c(kExitBadInput, payload_path);
  }
  CString owner(lines);
  if (out_path.empty()) {
    std::cout << lines;
  } else if (!write_text(out_path, lines)) {
    return fail(kExitUnwritable, "cannot write '" + out_path + "'");
  }
  return kExitOk;
}

std::string hex32(const std::uint8_t* d) {
  static const char digits[] = "0123456789abcdef";
  std::string s;
  for (int i = 0; i < 32; ++i) {
    s.push_back(digits[d[i] >> 4]);
    s.push_back(digits[d[i] & 15]);
  }
  return s;
}

int run_demo_transfer(std::size_t size, double drop, double dup, bool reorder, std::uint64_t seed) {
  if (!(drop >= 0.0 && drop <= 1.0) || !(dup >= 0.0 && dup <= 1.0)) {
    return fail(kExitBadInput, "--drop and --dup must be within [0, 1]");
  }
  char* transcript = nullptr;
  wot_transfer_report report{};
  auto status = wot_demo_transfer(size, drop, dup, reorder ? 1 : 0, seed, &transcript, &report);
  CString owner(transcript);
  if (transcript) std::cout << transcript;
  if (status != WOT_OK && status != WOT_ERR_TRANSFER_FAILED) return fail_c(kExitBadInput, "demo-transfer");
  std::cout << "sealed " << report.sealed_size << " octets, " << report.packets_sent << " packets, "
            << report.bytes_on_wire << " octets on the wire\n"
            << "completed in round " << report.completion_round << " (ideal " << report.ideal_rounds << ")\n"
            << "sent     sha256 " << hex32(report.sent_digest) << "\n"
            << "received sha256 " << hex32(report.received_digest) << "\n";
  if (status == WOT_ERR_TRANSFER_FAILED) {
    std::cout << "verdict: FAILED\n";
    return fail_c(kExitTransfer, "demo-transfer");
  }
  std::cout << "verdict: digests match\n";
  return kExitOk;
}

int run_inspect(const std::string& path) {
  auto text = read_file(path);
  if (!text) return fail(kExitBadInput, "cannot read '" + path + "'");
  char* report = nullptr;
  if (wot_inspect(text->c_str(), &report) != WOT_OK) return fail_c(kExitBadInput, path);
  CString owner(report);
  std::cout << report;
  return kExitOk;
}

const char* band_color(wot_band band) {
  switch (band) {
    case WOT_BAND_NO_INFO: return "\x1b[90m";
    case WOT_BAND_LOW: return "\x1b[31m";
    case WOT_BAND_MEDIUM: return "\x1b[33m";
    case WOT_BAND_HIGH: return "\x1b[32m";
    case WOT_BAND_FLAGGED: return "\x1b[1;35m";
  }
  return "";
}

int run_scores(const std::string& path, int low, int medium, int high) {
  if (!(1 <= low && low <= medium && medium <= high && high <= 100)) {
    return fail(kExitBadInput, "thresholds must satisfy 1 <= low <= medium <= high <= 100");
  }
  auto text = read_file(path);
  if (!text) return fail(kExitBadInput, "cannot read '" + path + "'");
  wot_store* raw = nullptr;
  if (wot_store_parse_csv(text->c_str(), &raw) != WOT_OK) return fail_c(kExitBadInput, path);
  std::unique_ptr<wot_store, decltype(&wot_store_free)> store(raw, wot_store_free);

  bool color = std::getenv("NO_COLOR") == nullptr && isatty(STDOUT_FILENO);
  for (std::size_t i = 0; i < wot_store_size(store.get()); ++i) {
    char key[WOT_KEY_HEX_SIZE + 1];
    int score = 0;
    int flagged = 0;
    std::uint64_t updated = 0;
    wot_store_entry(store.get(), i, key, &score, &flagged, &updated);
    auto band = wot_classify(score, flagged, low, medium, high);
    std::cout << key << ' ' << score << ' ';
    if (color) std::cout << band_color(band);
    std::cout << wot_band_name(band);
    if (color) std::cout << "\x1b[0m";
    std::cout << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline web-of-trust payments: simulator and tools", "wot"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Run a simulation and write summary.json and rounds.csv");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool dump = false;
  simulate->add_option("--config", config_path, "SimConfig JSON file")->required();
  simulate->add_option("--seed", seed, "Override the configured seed");
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_flag("--dump", dump, "Also write peers/<index>.json and blocks.jsonl");

  auto* codec = app.add_subcommand("codec", "Encode or decode contact payloads");
  codec->require_subcommand(1);
  auto* encode = codec->add_subcommand("encode", "Newline-separated hex keys -> payload file");
  std::string keys_path;
  std::string codec_out;
  encode->add_option("--keys", keys_path, "Key file, one 148-hex key per line")->required();
  encode->add_option("--out", codec_out, "Payload output file");
  auto* decode = codec->add_subcommand("decode", "Payload file -> hex keys");
  std::string payload_path;
  decode->add_option("--payload", payload_path, "Payload file")->required();
  decode->add_option("--out", codec_out, "Key output file (default stdout)");

  auto* demo = app.add_subcommand("demo-transfer", "Transfer random octets through a lossy channel");
  std::size_t size = 3700;
  double drop = 0.0;
  double dup = 0.0;
  bool reorder = false;
  std::uint64_t demo_seed = 1;
  demo->add_option("--size", size, "Payload size in octets");
  demo->add_option("--drop", drop, "Drop probability");
  demo->add_option("--dup", dup, "Duplicate probability");
  demo->add_flag("--reorder", reorder, "Shuffle packets within each round");
  demo->add_option("--seed", demo_seed, "Seed");

  auto* inspect = app.add_subcommand("inspect", "Summarise a peer dump or block JSON lines");
  std::string inspect_path;
  inspect->add_option("file", inspect_path, "Peer dump (.json) or blocks (.jsonl)")->required();

  auto* scores = app.add_subcommand("scores", "Print trust bands for a store CSV");
  std::string store_path;
  int low = 1;
  int medium = 30;
  int high = 70;
  scores->add_option("--store", store_path, "Store CSV (hex_key,score,flagged,last_updated)")->required();
  scores->add_option("--low", low, "Lowest Low score");
  scores->add_option("--medium", medium, "Lowest Medium score");
  scores->add_option("--high", high, "Lowest High score");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "wot: " << e.what() << "\n\n" << app.help();
    return kExitBadInput;
  }

  if (*simulate) return run_simulate(config_path, seed, out_dir, dump);
  if (*encode) return run_codec_encode(keys_path, codec_out);
  if (*decode) return run_codec_decode(payload_path, codec_out);
  if (*demo) return run_demo_transfer(size, drop, dup, reorder, demo_seed);
  if (*inspect) return run_inspect(inspect_path);
  if (*scores) return run_scores(store_path, low, medium, high);
  return kExitFailure;
}
