/*
 * C interface to the web-of-trust payment library.
 *
 * Objects are opaque handles created by wot_*_create / *_parse / *_run and
 * released with the matching *_free. Strings and byte buffers returned
 * through out-parameters are owned by the caller and released with
 * wot_free(). Every fallible call returns a wot_status; on failure
 * wot_last_error() describes the problem for the calling thread.
 */
#ifndef WOT_WOT_H
#define WOT_WOT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define WOT_API __declspec(dllexport)
#else
#define WOT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wot_status {
  WOT_OK = 0,
  WOT_ERR_INVALID_ARGUMENT = 1,
  WOT_ERR_PARSE = 2, /* malformed key text, payload, CSV, JSON or config */
  WOT_ERR_IO = 3,
  WOT_ERR_TRANSFER_FAILED = 4,
  WOT_ERR_LEDGER = 5, /* signature, linkage, balance */
  WOT_ERR_INTERNAL = 6
} wot_status;

typedef enum wot_band {
  WOT_BAND_NO_INFO = 0,
  WOT_BAND_LOW = 1,
  WOT_BAND_MEDIUM = 2,
  WOT_BAND_HIGH = 3,
  WOT_BAND_FLAGGED = 4
} wot_band;

#define WOT_KEY_HEX_SIZE 148
#define WOT_SEED_SIZE 32

WOT_API const char* wot_version(void);

/* Message for the last failed call on this thread; "" if none. */
WOT_API const char* wot_last_error(void);
/* Input position attached to the last error (hex index, line number, ...),
 * or SIZE_MAX. */
WOT_API size_t wot_last_error_position(void);

WOT_API void wot_free(void* p);

/* ---- keys --------------------------------------------------------------- */

/* out_hex receives 148 lowercase hex characters plus a terminating NUL. */
WOT_API wot_status wot_key_from_seed(const uint8_t seed[WOT_SEED_SIZE], char out_hex[WOT_KEY_HEX_SIZE + 1]);
WOT_API wot_status wot_key_normalize(const char* hex, char out_hex[WOT_KEY_HEX_SIZE + 1]);

/* ---- contact payload ------------------------------------------------------ */

/* Newline-separated hex keys -> headerless payload body. Blank lines are
 * skipped; the error position is the 1-based line number. */
WOT_API wot_status wot_payload_encode_lines(const char* key_lines, uint8_t** out, size_t* out_size);
/* Payload body -> one lowercase hex key per line. */
WOT_API wot_status wot_payload_decode_lines(const uint8_t* data, size_t size, char** out_lines);

/* ---- trust bands and stores ----------------------------------------------- */

WOT_API wot_band wot_classify(int score, int flagged, int low, int medium, int high);
WOT_API const char* wot_band_name(wot_band band);

typedef struct wot_store wot_store;

WOT_API wot_status wot_store_parse_csv(const char* csv, wot_store** out);
WOT_API size_t wot_store_size(const wot_store* store);
WOT_API wot_status wot_store_entry(const wot_store* store, size_t index, char key_hex[WOT_KEY_HEX_SIZE + 1],
                                   int* score, int* flagged, uint64_t* last_updated);
WOT_API void wot_store_free(wot_store* store);

/* ---- peers ------------------------------------------------------------- */

typedef struct wot_peer wot_peer;

typedef struct wot_encounter {
  int paid;
  wot_band proactive_band; /* sender's view of the receiver */
  wot_band payer_band;     /* receiver's view of the sender after its check */
  size_t conflicts_found;
  int list_delivered;
  size_t list_size;
  uint64_t bytes_transferred;
} wot_encounter;

/* Default policy, lossless channel, deterministic test cipher. */
WOT_API wot_status wot_peer_create(const uint8_t seed[WOT_SEED_SIZE], uint64_t initial_balance, wot_peer** out);
WOT_API void wot_peer_free(wot_peer* peer);
WOT_API wot_status wot_peer_key(const wot_peer* peer, char out_hex[WOT_KEY_HEX_SIZE + 1]);
WOT_API int64_t wot_peer_balance(const wot_peer* peer);
WOT_API wot_status wot_peer_score(const wot_peer* peer, const char* key_hex, int* score, int* flagged);
WOT_API wot_status wot_peer_dump_json(const wot_peer* peer, char** out);

/* A refused or unaffordable payment still returns WOT_OK with paid == 0;
 * wot_last_error() then holds the reason. */
WOT_API wot_status wot_transact(wot_peer* sender, wot_peer* receiver, uint64_t amount, uint64_t round,
                                wot_encounter* out);

/* ---- simulation ----------------------------------------------------------- */

typedef struct wot_sim_config wot_sim_config;
typedef struct wot_sim_result wot_sim_result;

WOT_API wot_status wot_sim_config_parse(const char* json, wot_sim_config** out);
WOT_API wot_status wot_sim_config_load(const char* path, wot_sim_config** out);
WOT_API void wot_sim_config_set_seed(wot_sim_config* config, uint64_t seed);
WOT_API void wot_sim_config_free(wot_sim_config* config);

WOT_API wot_status wot_sim_run(const wot_sim_config* config, wot_sim_result** out);
WOT_API wot_status wot_sim_summary_json(const wot_sim_result* result, char** out);
WOT_API wot_status wot_sim_rounds_csv(const wot_sim_result* result, char** out);
WOT_API uint64_t wot_sim_transactions_total(const wot_sim_result* result);
WOT_API uint64_t wot_sim_bytes_total(const wot_sim_result* result);
WOT_API size_t wot_sim_detections(const wot_sim_result* result);
WOT_API size_t wot_sim_peer_count(const wot_sim_result* result);
WOT_API wot_status wot_sim_peer_dump_json(const wot_sim_result* result, size_t index, char** out);
/* Every peer's own blocks plus every foreign block any peer observed, one
 * JSON object per line, deduplicated, in canonical (signer, sequence,
 * digest) order. */
WOT_API wot_status wot_sim_blocks_jsonl(const wot_sim_result* result, char** out);
WOT_API void wot_sim_result_free(wot_sim_result* result);

/* ---- transfer demo -------------------------------------------------------- */

typedef struct wot_transfer_report {
  int completed;
  uint64_t rounds;
  uint64_t completion_round;
  uint64_t ideal_rounds;
  uint64_t bytes_on_wire;
  uint64_t packets_sent;
  uint64_t sealed_size;
  uint8_t sent_digest[32];
  uint8_t received_digest[32];
} wot_transfer_report;

/* Seals `size` seeded random octets and transfers them through a seeded
 * lossy channel with default transfer parameters. The transcript is set
 * even when the transfer fails (WOT_ERR_TRANSFER_FAILED). */
WOT_API wot_status wot_demo_transfer(size_t size, double drop, double duplicate, int reorder, uint64_t seed,
                                     char** transcript, wot_transfer_report* report);

/* ---- inspection ----------------------------------------------------------- */

/* Accepts a peer dump (JSON object) or block JSON lines and returns a text
 * report that ends with any double spends found among the blocks. */
WOT_API wot_status wot_inspect(const char* text, char** report);

#ifdef __cplusplus
}
#endif

#endif /* WOT_WOT_H */
