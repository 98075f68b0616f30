#include "terrain/wav_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace terrain {

namespace {

struct ChunkHeader {
  char id[4];
  std::uint32_t size;
};

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t read_u16(std::istream& is) {
  unsigned char b[2];
  is.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

void write_u16(std::ostream& os, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

struct ParsedWav {
  WavInfo info;
  std::streampos data_pos;
  std::uint32_t data_bytes = 0;
  std::uint16_t bits = 0;
};

ParsedWav parse_header(std::ifstream& is, const std::string& path) {
  char tag[4];
  is.read(tag, 4);
  if (!is || std::memcmp(tag, "RIFF", 4) != 0)
    throw std::runtime_error("not a RIFF file: " + path);
  read_u32(is);
  is.read(tag, 4);
  if (!is || std::memcmp(tag, "WAVE", 4) != 0)
    throw std::runtime_error("not a WAVE file: " + path);

  ParsedWav w;
  bool have_fmt = false;
  while (is) {
    char cid[4];
    is.read(cid, 4);
    if (!is) break;
    const std::uint32_t size = read_u32(is);
    if (std::memcmp(cid, "fmt ", 4) == 0) {
      const std::uint16_t format = read_u16(is);
      w.info.channels = read_u16(is);
      w.info.sample_rate = static_cast<double>(read_u32(is));
      read_u32(is);  // byte rate
      read_u16(is);  // block align
      w.bits = read_u16(is);
      if (size > 16) is.seekg(size - 16, std::ios::cur);
      if (format != 1) throw std::runtime_error("only PCM WAV supported: " + path);
      if (w.bits != 16) throw std::runtime_error("only 16-bit PCM WAV supported: " + path);
      have_fmt = true;
    } else if (std::memcmp(cid, "data", 4) == 0) {
      w.data_pos = is.tellg();
      w.data_bytes = size;
      is.seekg(size + (size & 1), std::ios::cur);
    } else {
      is.seekg(size + (size & 1), std::ios::cur);
    }
  }
  if (!have_fmt || w.data_bytes == 0)
    throw std::runtime_error("missing fmt/data chunk: " + path);
  if (w.info.channels == 0) throw std::runtime_error("zero channels: " + path);
  w.info.frame_count = w.data_bytes / (2u * w.info.channels);
  return w;
}

}  // namespace

WavInfo read_wav_info(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open audio file: " + path);
  return parse_header(is, path).info;
}

Vec read_wav_mono(const std::string& path, WavInfo* info) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open audio file: " + path);
  const ParsedWav w = parse_header(is, path);
  if (info) *info = w.info;

  is.clear();
  is.seekg(w.data_pos);
  std::vector<char> raw(w.data_bytes);
  is.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (is.gcount() != static_cast<std::streamsize>(raw.size()))
    throw std::runtime_error("truncated WAV data: " + path);

  const std::size_t ch = w.info.channels;
  Vec out(w.info.frame_count);
  for (std::size_t f = 0; f < w.info.frame_count; ++f) {
    double acc = 0.0;
    for (std::size_t c = 0; c < ch; ++c) {
      const std::size_t off = (f * ch + c) * 2;
      const std::int16_t s = static_cast<std::int16_t>(
          static_cast<unsigned char>(raw[off]) |
          (static_cast<unsigned char>(raw[off + 1]) << 8));
      acc += static_cast<double>(s);
    }
    out[f] = acc / (32768.0 * static_cast<double>(ch));
  }
  return out;
}

void write_wav_mono16(const std::string& path, const std::vector<std::int16_t>& samples,
                      double sample_rate) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write audio file: " + path);
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  const std::uint32_t rate = static_cast<std::uint32_t>(sample_rate);
  os.write("RIFF", 4);
  write_u32(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  write_u32(os, 16);
  write_u16(os, 1);  // PCM
  write_u16(os, 1);  // mono
  write_u32(os, rate);
  write_u32(os, rate * 2);
  write_u16(os, 2);
  write_u16(os, 16);
  os.write("data", 4);
  write_u32(os, data_bytes);
  for (std::int16_t s : samples) {
    const char b[2] = {static_cast<char>(s & 0xff), static_cast<char>((s >> 8) & 0xff)};
    os.write(b, 2);
  }
  if (!os) throw std::runtime_error("short write: " + path);
}

}  // namespace terrain
