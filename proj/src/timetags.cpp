#include "photonkit/timetags.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "photonkit/errors.hpp"

namespace photonkit {

namespace {

constexpr char kMagic[4] = {'P', 'T', 'T', '1'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 2 + 4 + 8 + 8 + 32;

template <typename T>
void put(std::uint8_t*& p, T v) {
  std::memcpy(p, &v, sizeof(T));  // little-endian host assumed (x86/ARM LE)
  p += sizeof(T);
}

template <typename T>
T get(const std::uint8_t*& p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  p += sizeof(T);
  return v;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

TimeTagFileInfo parse_header(std::FILE* f, const std::filesystem::path& path) {
  std::uint8_t hdr[kHeaderBytes];
  if (std::fread(hdr, 1, kHeaderBytes, f) != kHeaderBytes)
    throw IoError("timetag file too short: " + path.string());
  const std::uint8_t* p = hdr;
  if (std::memcmp(p, kMagic, 4) != 0)
    throw IoError("bad magic (not a PTT1 timetag file): " + path.string());
  p += 4;
  const auto version = get<std::uint32_t>(p);
  if (version != timetag_format_version)
    throw IoError("unsupported timetag format version " + std::to_string(version));
  TimeTagFileInfo info;
  info.channel = get<std::uint16_t>(p);
  const auto resolution = get<std::uint32_t>(p);
  if (resolution != 1) throw IoError("unsupported timetag resolution (expected 1 ps)");
  info.count = get<std::uint64_t>(p);
  info.seed = get<std::uint64_t>(p);
  std::memcpy(info.config_hash.data(), p, 32);
  return info;
}

}  // namespace

void write_timetags(const std::filesystem::path& path, const TimeTagStream& stream) {
  FilePtr f(std::fopen(path.string().c_str(), "wb"));
  if (!f) throw IoError("cannot open for writing: " + path.string());

  std::uint8_t hdr[kHeaderBytes];
  std::uint8_t* p = hdr;
  std::memcpy(p, kMagic, 4);
  p += 4;
  put<std::uint32_t>(p, timetag_format_version);
  put<std::uint16_t>(p, stream.channel);
  put<std::uint32_t>(p, 1);  // resolution_ps
  put<std::uint64_t>(p, stream.tags_ps.size());
  put<std::uint64_t>(p, stream.seed);
  std::memcpy(p, stream.config_hash.data(), 32);

  if (std::fwrite(hdr, 1, kHeaderBytes, f.get()) != kHeaderBytes)
    throw IoError("short write: " + path.string());
  if (!stream.tags_ps.empty() &&
      std::fwrite(stream.tags_ps.data(), sizeof(std::uint64_t), stream.tags_ps.size(),
                  f.get()) != stream.tags_ps.size())
    throw IoError("short write: " + path.string());
}

TimeTagStream read_timetags(const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "rb"));
  if (!f) throw IoError("cannot open: " + path.string());
  const TimeTagFileInfo info = parse_header(f.get(), path);

  TimeTagStream s;
  s.channel = info.channel;
  s.seed = info.seed;
  s.config_hash = info.config_hash;
  s.tags_ps.resize(info.count);
  if (info.count &&
      std::fread(s.tags_ps.data(), sizeof(std::uint64_t), info.count, f.get()) != info.count)
    throw IoError("truncated payload: " + path.string());
  if (!std::is_sorted(s.tags_ps.begin(), s.tags_ps.end()))
    throw IoError("timetag payload not sorted: " + path.string());
  if (!s.tags_ps.empty()) s.duration_ps = s.tags_ps.back();
  return s;
}

TimeTagFileInfo read_timetag_info(const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "rb"));
  if (!f) throw IoError("cannot open: " + path.string());
  return parse_header(f.get(), path);
}

struct TimeTagFileReader::Impl {
  FilePtr file;
};

TimeTagFileReader::TimeTagFileReader(const std::filesystem::path& path)
    : impl_(new Impl{FilePtr(std::fopen(path.string().c_str(), "rb"))}) {
  if (!impl_->file) {
    delete impl_;
    throw IoError("cannot open: " + path.string());
  }
  info_ = parse_header(impl_->file.get(), path);
  remaining_ = info_.count;
}

TimeTagFileReader::~TimeTagFileReader() { delete impl_; }

std::size_t TimeTagFileReader::read_chunk(std::vector<std::uint64_t>& out,
                                          std::size_t max_tags) {
  const std::size_t want =
      static_cast<std::size_t>(std::min<std::uint64_t>(max_tags, remaining_));
  out.resize(want);
  if (want == 0) return 0;
  const std::size_t got =
      std::fread(out.data(), sizeof(std::uint64_t), want, impl_->file.get());
  if (got != want) throw IoError("truncated timetag payload");
  remaining_ -= got;
  return got;
}

std::vector<std::uint64_t> quantize_sorted(std::span<const double> times_ps,
                                           std::uint64_t* collisions) {
  std::vector<std::uint64_t> tags;
  tags.reserve(times_ps.size());
  for (double t : times_ps) {
    if (t < 0.0) t = 0.0;
    tags.push_back(static_cast<std::uint64_t>(std::llround(t)));
  }
  std::sort(tags.begin(), tags.end());
  const auto last = std::unique(tags.begin(), tags.end());
  if (collisions) *collisions += static_cast<std::uint64_t>(tags.end() - last);
  tags.erase(last, tags.end());
  return tags;
}

}  // namespace photonkit
