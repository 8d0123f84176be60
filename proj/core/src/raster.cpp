#include "arshoe/raster.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "arshoe/error.hpp"

namespace arshoe {

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw Error(Errc::invalid_argument, "negative mask size");
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count_if(bits_.begin(), bits_.end(), [](auto b) { return b != 0; }));
}

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(const std::string& data, std::size_t& pos) {
  for (;;) {
    while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    if (pos < data.size() && data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  return data.substr(start, pos - start);
}

int parse_header_int(const std::string& data, std::size_t& pos, const std::filesystem::path& path) {
  const std::size_t at = pos;
  const std::string tok = next_token(data, pos);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::format, path.string() + ": bad PGM header field at byte " + std::to_string(at));
  }
}

}  // namespace

FrameImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::format, "cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::size_t pos = 0;
  if (next_token(data, pos) != "P5") throw Error(Errc::format, path.string() + ": not a binary PGM (P5)");
  const int w = parse_header_int(data, pos, path);
  const int h = parse_header_int(data, pos, path);
  const int maxval = parse_header_int(data, pos, path);
  if (maxval <= 0 || maxval > 255) {
    throw Error(Errc::format, path.string() + ": only 8-bit PGM is supported");
  }
  ++pos;  // single whitespace byte after maxval
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (pos > data.size() || data.size() - pos < need) {
    throw Error(Errc::format, path.string() + ": truncated pixel data at byte " + std::to_string(data.size()));
  }
  FrameImage img(w, h);
  std::copy_n(reinterpret_cast<const std::uint8_t*>(data.data() + pos), need, img.intensities.begin());
  return img;
}

void write_pgm(const std::filesystem::path& path, const FrameImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::format, "cannot write " + path.string());
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.intensities.data()),
            static_cast<std::streamsize>(image.intensities.size()));
}

BinaryMask read_mask_pgm(const std::filesystem::path& path) {
  const FrameImage img = read_pgm(path);
  BinaryMask mask(img.width, img.height);
  std::transform(img.intensities.begin(), img.intensities.end(), mask.bits().begin(),
                 [](std::uint8_t v) -> std::uint8_t { return v != 0 ? 1 : 0; });
  return mask;
}

void write_mask_pgm(const std::filesystem::path& path, const BinaryMask& mask) {
  FrameImage img(mask.width(), mask.height());
  std::transform(mask.bits().begin(), mask.bits().end(), img.intensities.begin(),
                 [](std::uint8_t v) -> std::uint8_t { return v != 0 ? 255 : 0; });
  write_pgm(path, img);
}

}  // namespace arshoe
