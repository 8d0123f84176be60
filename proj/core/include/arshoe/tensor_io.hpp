#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "arshoe/tensor.hpp"

namespace arshoe {

// Tensor file: "ARST", one version byte (1), then channels, height and
// width as little-endian u32, then c*h*w little-endian IEEE float32 values
// in row-major order. A file may hold several tensors back to back.
inline constexpr std::uint8_t kTensorFormatVersion = 1;
inline constexpr std::size_t kTensorHeaderBytes = 17;

std::vector<std::uint8_t> encode_tensor(const Tensor& t);

/// Decodes one tensor starting at `offset`, advancing it. Errors are
/// Errc::format and name the byte offset where decoding failed.
Tensor decode_tensor(const std::vector<std::uint8_t>& bytes, std::size_t& offset);

void write_tensor(const std::filesystem::path& path, const Tensor& t);
void write_tensors(const std::filesystem::path& path, const std::vector<Tensor>& tensors);
Tensor read_tensor(const std::filesystem::path& path);
std::vector<Tensor> read_tensors(const std::filesystem::path& path);

}  // namespace arshoe
