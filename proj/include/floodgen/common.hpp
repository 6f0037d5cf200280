#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace floodgen {

// Error taxonomy. Codes group into the four CLI exit families:
// config (2), data (3), numeric (4), io (5).
enum class errc {
  // config
  bad_config,
  // data
  bad_data,
  point_outside_study_area,
  missing_depths,
  insufficient_events,
  negative_precipitation,
  empty_watershed,
  missing_cells,
  unknown_cell,
  empty_training_set,
  inconsistent_feature_length,
  feature_length_mismatch,
  too_few_records,
  empty_sample,
  empty_dataset,
  too_few_events,
  negative_value,
  empty_pool,
  mesh_fingerprint_mismatch,
  empty_input,
  length_mismatch,
  synth_smaller_than_train,
  empty_partition,
  empty_batch,
  corrupt_store,
  // numeric
  numeric_error,
  acceptance_rate_too_low,
  degenerate_variance,
  zero_vector,
  constant_vector,
  // io
  io_failure,
};

const char* errc_name(errc c);
int exit_code_for(errc c);

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& msg);
  errc code() const { return code_; }

private:
  errc code_;
};

[[noreturn]] void fail(errc code, const std::string& msg);

// FNV-1a over raw bytes; used for mesh fingerprints and store digests.
std::uint64_t fnv1a64(const void* data, std::size_t len,
                      std::uint64_t seed = 0xcbf29ce484222325ull);
std::string to_hex64(std::uint64_t v);

std::string read_file(const std::string& path);

// Writes via a sibling temp file + rename so a failure never leaves a
// partial output at `path`.
void write_file_atomic(const std::string& path, const std::string& content);

// Decimal form with enough digits to round-trip bit-identically.
std::string format_double(double v);

}  // namespace floodgen
