#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sdr {

inline constexpr int kNumClasses = 7;

// One labeled conversational segment. Feature paths are stored as written
// in the manifest; `resolved_*` hold them resolved against the manifest
// directory so records stay usable after a chdir.
struct SegmentRecord {
  std::string segment_id;
  std::string participant_id;
  int session_index = 1;  // 1..10
  std::string audio_feature_path;
  std::map<std::string, std::string> visual_feature_paths;  // family name -> path
  int score = 1;  // 1..7

  std::filesystem::path resolved_audio;
  std::map<std::string, std::filesystem::path> resolved_visual;
};

// Reads a line-delimited manifest (one JSON object per line). Validation
// errors always name the offending line. With validate_files=true every
// referenced feature file must exist and carry a well-formed SDFM header.
std::vector<SegmentRecord> load_manifest(const std::filesystem::path& path,
                                         bool validate_files = true);

void save_manifest(const std::filesystem::path& path, const std::vector<SegmentRecord>& records);

}  // namespace sdr
