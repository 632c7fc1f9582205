#pragma once

// SDFM container format.
//
// Matrix file (kind=1):
//   "SDFM" | u32 version=1 | u32 kind=1 | u32 modality | u64 rows | u64 cols
//   | f64 frame_rate | u8 has_mask | rows*cols f32 row-major | rows mask bytes
// Section file (kind=2), used for PCA models and checkpoints:
//   "SDFM" | u32 version=1 | u32 kind=2 | u32 section_count
//   | per section: u32 name_len | name | u32 dtype | u64 rows | u64 cols | payload
//   dtype 1 = f64 matrix (row-major), dtype 2 = raw bytes (rows = byte count).
// All integers and floats little-endian.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sdr/feature_matrix.hpp"

namespace sdr::sdfm {

inline constexpr std::uint32_t kVersion = 1;

void write_matrix(const std::filesystem::path& path, const FeatureMatrix& m);
FeatureMatrix read_matrix(const std::filesystem::path& path);

// Header-only read: validates magic/version/shape without loading the payload.
struct MatrixHeader {
  Modality modality;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  double frame_rate = 0.0;
  bool has_mask = false;
};
MatrixHeader read_matrix_header(const std::filesystem::path& path);

struct Section {
  Mat matrix;               // dtype 1
  std::vector<std::uint8_t> bytes;  // dtype 2
  bool is_raw = false;
};

using SectionMap = std::map<std::string, Section>;

void write_sections(const std::filesystem::path& path, const SectionMap& sections);
SectionMap read_sections(const std::filesystem::path& path);

// In-memory encodings, exposed so tests can byte-compare without temp files.
std::vector<std::uint8_t> encode_matrix(const FeatureMatrix& m);
FeatureMatrix decode_matrix(const std::vector<std::uint8_t>& bytes);

}  // namespace sdr::sdfm
