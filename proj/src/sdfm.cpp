#include "sdr/sdfm.hpp"

#include <cstring>
#include <fstream>

namespace sdr::sdfm {
namespace {

constexpr char kMagic[4] = {'S', 'D', 'F', 'M'};
constexpr std::uint32_t kKindMatrix = 1;
constexpr std::uint32_t kKindSections = 2;

// Little-endian byte appenders. The host is assumed LE for the float
// payloads (x86/arm64); integers are written byte-by-byte regardless.
template <typename T>
void put_int(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_int(out, bits);
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_int(out, bits);
}

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size, std::string origin)
      : data_(data), size_(size), origin_(std::move(origin)) {}

  template <typename T>
  T get_int() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(data_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return v;
  }

  double get_f64() {
    auto bits = get_int<std::uint64_t>();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  float get_f32() {
    auto bits = get_int<std::uint32_t>();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  const std::uint8_t* raw(std::size_t n) {
    need(n);
    const std::uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
  }

  void need(std::size_t n) const {
    if (pos_ + n > size_) throw std::runtime_error(origin_ + ": truncated SDFM file");
  }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
  std::string origin_;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write: " + path.string());
}

std::uint32_t check_preamble(Reader& r, const std::string& origin) {
  const std::uint8_t* magic = r.raw(4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error(origin + ": bad SDFM magic");
  auto version = r.get_int<std::uint32_t>();
  if (version != kVersion) {
    throw std::runtime_error(origin + ": unsupported SDFM version " + std::to_string(version));
  }
  return r.get_int<std::uint32_t>();
}

}  // namespace

std::vector<std::uint8_t> encode_matrix(const FeatureMatrix& m) {
  m.validate();
  std::vector<std::uint8_t> out;
  out.reserve(40 + static_cast<std::size_t>(m.data.size()) * 4);
  out.insert(out.end(), kMagic, kMagic + 4);
  put_int(out, kVersion);
  put_int(out, kKindMatrix);
  put_int(out, static_cast<std::uint32_t>(m.modality));
  put_int(out, static_cast<std::uint64_t>(m.data.rows()));
  put_int(out, static_cast<std::uint64_t>(m.data.cols()));
  put_f64(out, m.frame_rate);
  out.push_back(m.mask ? 1 : 0);
  for (Eigen::Index r = 0; r < m.data.rows(); ++r)
    for (Eigen::Index c = 0; c < m.data.cols(); ++c) put_f32(out, static_cast<float>(m.data(r, c)));
  if (m.mask)
    for (bool b : *m.mask) out.push_back(b ? 1 : 0);
  return out;
}

FeatureMatrix decode_matrix(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes.data(), bytes.size(), "<memory>");
  auto kind = check_preamble(r, "<memory>");
  if (kind != kKindMatrix) throw std::runtime_error("SDFM: expected matrix file, got kind " + std::to_string(kind));
  FeatureMatrix m;
  m.modality = static_cast<Modality>(r.get_int<std::uint32_t>());
  auto rows = r.get_int<std::uint64_t>();
  auto cols = r.get_int<std::uint64_t>();
  m.frame_rate = r.get_f64();
  bool has_mask = r.get_int<std::uint8_t>() != 0;
  if (rows < 1 || cols < 1) throw std::runtime_error("SDFM matrix with empty shape");
  m.data.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::uint64_t i = 0; i < rows; ++i)
    for (std::uint64_t j = 0; j < cols; ++j)
      m.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r.get_f32();
  if (has_mask) {
    std::vector<bool> mask(rows);
    for (std::uint64_t i = 0; i < rows; ++i) mask[i] = r.get_int<std::uint8_t>() != 0;
    m.mask = std::move(mask);
  }
  m.validate();
  return m;
}

void write_matrix(const std::filesystem::path& path, const FeatureMatrix& m) {
  write_file(path, encode_matrix(m));
}

FeatureMatrix read_matrix(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  try {
    return decode_matrix(bytes);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

MatrixHeader read_matrix_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  std::vector<std::uint8_t> head(41);
  in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
  if (in.gcount() < static_cast<std::streamsize>(head.size()))
    throw std::runtime_error(path.string() + ": truncated SDFM header");
  Reader r(head.data(), head.size(), path.string());
  auto kind = check_preamble(r, path.string());
  if (kind != kKindMatrix)
    throw std::runtime_error(path.string() + ": expected matrix file, got kind " + std::to_string(kind));
  MatrixHeader h;
  h.modality = static_cast<Modality>(r.get_int<std::uint32_t>());
  h.rows = r.get_int<std::uint64_t>();
  h.cols = r.get_int<std::uint64_t>();
  h.frame_rate = r.get_f64();
  h.has_mask = r.get_int<std::uint8_t>() != 0;
  if (h.rows < 1 || h.cols < 1) throw std::runtime_error(path.string() + ": SDFM matrix with empty shape");
  return h;
}

void write_sections(const std::filesystem::path& path, const SectionMap& sections) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_int(out, kVersion);
  put_int(out, kKindSections);
  put_int(out, static_cast<std::uint32_t>(sections.size()));
  for (const auto& [name, sec] : sections) {
    put_int(out, static_cast<std::uint32_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    if (sec.is_raw) {
      put_int(out, std::uint32_t{2});
      put_int(out, static_cast<std::uint64_t>(sec.bytes.size()));
      put_int(out, std::uint64_t{1});
      out.insert(out.end(), sec.bytes.begin(), sec.bytes.end());
    } else {
      put_int(out, std::uint32_t{1});
      put_int(out, static_cast<std::uint64_t>(sec.matrix.rows()));
      put_int(out, static_cast<std::uint64_t>(sec.matrix.cols()));
      for (Eigen::Index r = 0; r < sec.matrix.rows(); ++r)
        for (Eigen::Index c = 0; c < sec.matrix.cols(); ++c) put_f64(out, sec.matrix(r, c));
    }
  }
  write_file(path, out);
}

SectionMap read_sections(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  Reader r(bytes.data(), bytes.size(), path.string());
  auto kind = check_preamble(r, path.string());
  if (kind != kKindSections)
    throw std::runtime_error(path.string() + ": expected section file, got kind " + std::to_string(kind));
  auto count = r.get_int<std::uint32_t>();
  SectionMap sections;
  for (std::uint32_t i = 0; i < count; ++i) {
    auto name_len = r.get_int<std::uint32_t>();
    const std::uint8_t* name_bytes = r.raw(name_len);
    std::string name(reinterpret_cast<const char*>(name_bytes), name_len);
    auto dtype = r.get_int<std::uint32_t>();
    auto rows = r.get_int<std::uint64_t>();
    auto cols = r.get_int<std::uint64_t>();
    Section sec;
    if (dtype == 2) {
      sec.is_raw = true;
      const std::uint8_t* p = r.raw(rows);
      sec.bytes.assign(p, p + rows);
    } else if (dtype == 1) {
      sec.matrix.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      for (std::uint64_t a = 0; a < rows; ++a)
        for (std::uint64_t b = 0; b < cols; ++b)
          sec.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = r.get_f64();
    } else {
      throw std::runtime_error(path.string() + ": unknown section dtype " + std::to_string(dtype));
    }
    sections.emplace(std::move(name), std::move(sec));
  }
  return sections;
}

}  // namespace sdr::sdfm
