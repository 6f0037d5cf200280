#include "floodgen/common.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace floodgen {

const char* errc_name(errc c) {
  switch (c) {
    case errc::bad_config: return "BadConfig";
    case errc::bad_data: return "BadData";
    case errc::point_outside_study_area: return "PointOutsideStudyArea";
    case errc::missing_depths: return "MissingDepths";
    case errc::insufficient_events: return "InsufficientEvents";
    case errc::negative_precipitation: return "NegativePrecipitation";
    case errc::empty_watershed: return "EmptyWatershed";
    case errc::missing_cells: return "MissingCells";
    case errc::unknown_cell: return "UnknownCell";
    case errc::empty_training_set: return "EmptyTrainingSet";
    case errc::inconsistent_feature_length: return "InconsistentFeatureLength";
    case errc::feature_length_mismatch: return "FeatureLengthMismatch";
    case errc::too_few_records: return "TooFewRecords";
    case errc::empty_sample: return "EmptySample";
    case errc::empty_dataset: return "EmptyDataset";
    case errc::too_few_events: return "TooFewEvents";
    case errc::negative_value: return "NegativeValue";
    case errc::empty_pool: return "EmptyPool";
    case errc::mesh_fingerprint_mismatch: return "MeshFingerprintMismatch";
    case errc::empty_input: return "EmptyInput";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::synth_smaller_than_train: return "SynthSmallerThanTrain";
    case errc::empty_partition: return "EmptyPartition";
    case errc::empty_batch: return "EmptyBatch";
    case errc::corrupt_store: return "CorruptStore";
    case errc::numeric_error: return "NumericError";
    case errc::acceptance_rate_too_low: return "AcceptanceRateTooLow";
    case errc::degenerate_variance: return "DegenerateVariance";
    case errc::zero_vector: return "ZeroVector";
    case errc::constant_vector: return "ConstantVector";
    case errc::io_failure: return "IoFailure";
  }
  return "Unknown";
}

int exit_code_for(errc c) {
  switch (c) {
    case errc::bad_config:
      return 2;
    case errc::numeric_error:
    case errc::acceptance_rate_too_low:
    case errc::degenerate_variance:
    case errc::zero_vector:
    case errc::constant_vector:
      return 4;
    case errc::io_failure:
      return 5;
    default:
      return 3;
  }
}

Error::Error(errc code, const std::string& msg)
    : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

void fail(errc code, const std::string& msg) { throw Error(code, msg); }

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x00000100000001b3ull;
  }
  return h;
}

std::string to_hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_failure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(errc::io_failure, "read error on " + path);
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io_failure, "cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      fail(errc::io_failure, "write error on " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(errc::io_failure, "rename failed for " + path);
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace floodgen
