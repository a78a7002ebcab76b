#include "echoforge/audio.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "echoforge/errors.h"

namespace echoforge {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t ReadU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t ReadU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutU16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace

bool AllFinite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

void ValidateAudio(const AudioBuffer& buffer, const char* what) {
  if (buffer.sample_rate <= 0) {
    throw InputError(std::string(what) + ": sample rate must be positive");
  }
  if (!AllFinite(buffer.samples)) {
    throw InputError(std::string(what) + ": contains non-finite samples");
  }
}

double Energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

AudioBuffer ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string(), path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  const auto fail = [&](const std::string& why) -> IoError {
    return IoError(path.string() + ": " + why, path.string());
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw fail("not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = ReadU32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || available < 16) throw fail("truncated fmt chunk");
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
      if (format == kFormatExtensible) {
        if (size < 40 || available < 40) throw fail("truncated extensible fmt chunk");
        format = ReadU16(chunk + 8 + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      // Some writers leave the size unset when streaming; clamp to the file.
      data_size = std::min<std::size_t>(size, available);
    }
    pos = body + size + (size & 1u);
  }
  if (format == 0) throw fail("missing fmt chunk");
  if (data == nullptr) throw fail("missing data chunk");
  if (channels != 1) throw fail("only mono files are supported");
  if (rate == 0) throw fail("zero sample rate");

  AudioBuffer out;
  out.sample_rate = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    const std::size_t n = data_size / 2;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = static_cast<std::int16_t>(ReadU16(data + 2 * i));
      out.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    const std::size_t n = data_size / 4;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.samples[i] = static_cast<double>(std::bit_cast<float>(ReadU32(data + 4 * i)));
    }
    if (!AllFinite(out.samples)) throw fail("non-finite float samples");
  } else {
    throw fail("unsupported sample format (need 16-bit PCM or 32-bit float)");
  }
  return out;
}

void WriteWav(const std::filesystem::path& path, const AudioBuffer& buffer,
              SampleFormat format) {
  ValidateAudio(buffer, "WriteWav");
  const bool is_float = format == SampleFormat::kFloat32;
  const std::uint16_t bits = is_float ? 32 : 16;
  const std::uint16_t block_align = bits / 8;
  const auto data_size = static_cast<std::uint32_t>(buffer.size() * block_align);

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  PutU32(out, 36 + data_size);
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, is_float ? kFormatFloat : kFormatPcm);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(buffer.sample_rate));
  PutU32(out, static_cast<std::uint32_t>(buffer.sample_rate) * block_align);
  PutU16(out, block_align);
  PutU16(out, bits);
  out += "data";
  PutU32(out, data_size);
  for (double v : buffer.samples) {
    if (is_float) {
      PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    } else {
      const double scaled = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
      PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path.string(), path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for " + path.string(), path.string());
}

}  // namespace echoforge
