#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace arshoe {

/// Row-major boolean grid. Stored as bytes (0/1) so rows can be addressed
/// contiguously.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  /// Out-of-bounds reads are background.
  bool get(int x, int y) const { return in_bounds(x, y) && at(x, y); }
  void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }

  std::size_t count() const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::vector<std::uint8_t>& bits() { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// 8-bit grayscale frame, row-major.
struct FrameImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> intensities;

  FrameImage() = default;
  FrameImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), intensities(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int x, int y) const { return intensities[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return intensities[static_cast<std::size_t>(y) * width + x]; }
  bool valid() const { return static_cast<std::size_t>(width) * height == intensities.size(); }
};

// Binary PGM (P5, maxval 255). Masks write 0/255 and read any nonzero
// sample as foreground. Errors are Errc::format.
FrameImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const FrameImage& image);
BinaryMask read_mask_pgm(const std::filesystem::path& path);
void write_mask_pgm(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace arshoe
