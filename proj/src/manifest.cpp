#include "sdr/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sdr/sdfm.hpp"

namespace sdr {
namespace {

using nlohmann::json;

[[noreturn]] void line_error(const std::filesystem::path& path, std::size_t line_no, const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

void check_feature_file(const std::filesystem::path& path, const std::filesystem::path& manifest,
                        std::size_t line_no) {
  if (!std::filesystem::exists(path)) {
    line_error(manifest, line_no, "referenced feature file does not exist: " + path.string());
  }
  try {
    sdfm::read_matrix_header(path);
  } catch (const std::exception& e) {
    line_error(manifest, line_no, std::string("feature file failed to parse: ") + e.what());
  }
}

}  // namespace

std::vector<SegmentRecord> load_manifest(const std::filesystem::path& path, bool validate_files) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest file not found: " + path.string());
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

  std::vector<SegmentRecord> records;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      line_error(path, line_no, std::string("malformed record: ") + e.what());
    }
    SegmentRecord rec;
    try {
      rec.segment_id = obj.at("segment_id").get<std::string>();
      rec.participant_id = obj.at("participant_id").get<std::string>();
      rec.session_index = obj.at("session_index").get<int>();
      rec.audio_feature_path = obj.at("audio_feature_path").get<std::string>();
      for (const auto& [family, p] : obj.at("visual_feature_paths").items()) {
        rec.visual_feature_paths[family] = p.get<std::string>();
      }
      rec.score = obj.at("score").get<int>();
    } catch (const json::exception& e) {
      line_error(path, line_no, std::string("malformed record: ") + e.what());
    }
    if (rec.score < 1 || rec.score > kNumClasses) {
      line_error(path, line_no, "score " + std::to_string(rec.score) + " outside 1..7");
    }
    if (rec.session_index < 1 || rec.session_index > 10) {
      line_error(path, line_no, "session_index " + std::to_string(rec.session_index) + " outside 1..10");
    }
    if (rec.segment_id.empty()) line_error(path, line_no, "empty segment_id");
    if (!seen_ids.insert(rec.segment_id).second) {
      line_error(path, line_no, "duplicate segment_id: " + rec.segment_id);
    }
    rec.resolved_audio = base / rec.audio_feature_path;
    for (const auto& [family, p] : rec.visual_feature_paths) rec.resolved_visual[family] = base / p;
    if (validate_files) {
      check_feature_file(rec.resolved_audio, path, line_no);
      for (const auto& [family, p] : rec.resolved_visual) check_feature_file(p, path, line_no);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void save_manifest(const std::filesystem::path& path, const std::vector<SegmentRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
  for (const auto& rec : records) {
    json obj;
    obj["segment_id"] = rec.segment_id;
    obj["participant_id"] = rec.participant_id;
    obj["session_index"] = rec.session_index;
    obj["audio_feature_path"] = rec.audio_feature_path;
    obj["visual_feature_paths"] = json::object();
    for (const auto& [family, p] : rec.visual_feature_paths) obj["visual_feature_paths"][family] = p;
    obj["score"] = rec.score;
    out << obj.dump() << "\n";
  }
  if (!out) throw std::runtime_error("short write: " + path.string());
}

}  // namespace sdr
