#include "arshoe/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "arshoe/error.hpp"

namespace arshoe {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::format, "cannot open tensor file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

[[noreturn]] void fail(const std::string& what, std::size_t offset) {
  throw Error(Errc::format, what + " at byte offset " + std::to_string(offset));
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  std::vector<std::uint8_t> out;
  out.reserve(kTensorHeaderBytes + 4 * t.size());
  for (char c : {'A', 'R', 'S', 'T'}) out.push_back(static_cast<std::uint8_t>(c));
  out.push_back(kTensorFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(t.channels()));
  put_u32(out, static_cast<std::uint32_t>(t.height()));
  put_u32(out, static_cast<std::uint32_t>(t.width()));
  for (float f : t.data()) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

Tensor decode_tensor(const std::vector<std::uint8_t>& bytes, std::size_t& offset) {
  const std::size_t start = offset;
  if (bytes.size() - start < 4 || std::memcmp(bytes.data() + start, "ARST", 4) != 0) {
    if (bytes.size() - start < 4) fail("truncated tensor magic", bytes.size());
    fail("bad tensor magic", start);
  }
  if (bytes.size() - start < kTensorHeaderBytes) fail("truncated tensor header", bytes.size());
  if (bytes[start + 4] != kTensorFormatVersion) fail("unsupported tensor version", start + 4);
  const std::uint32_t c = get_u32(&bytes[start + 5]);
  const std::uint32_t h = get_u32(&bytes[start + 9]);
  const std::uint32_t w = get_u32(&bytes[start + 13]);
  const std::uint64_t count = static_cast<std::uint64_t>(c) * h * w;
  const std::size_t payload = start + kTensorHeaderBytes;
  if ((bytes.size() - payload) / 4 < count) {
    fail("truncated tensor payload (expected " + std::to_string(count) + " floats)", bytes.size());
  }
  Tensor t(static_cast<int>(c), static_cast<int>(h), static_cast<int>(w));
  for (std::uint64_t i = 0; i < count; ++i) t.data()[i] = std::bit_cast<float>(get_u32(&bytes[payload + 4 * i]));
  offset = payload + 4 * count;
  return t;
}

void write_tensors(const std::filesystem::path& path, const std::vector<Tensor>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::format, "cannot write tensor file " + path.string());
  for (const Tensor& t : tensors) {
    const auto bytes = encode_tensor(t);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) { write_tensors(path, {t}); }

Tensor read_tensor(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  std::size_t offset = 0;
  return decode_tensor(bytes, offset);
}

std::vector<Tensor> read_tensors(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  std::vector<Tensor> out;
  std::size_t offset = 0;
  do {
    out.push_back(decode_tensor(bytes, offset));
  } while (offset < bytes.size());
  return out;
}

}  // namespace arshoe
