#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "padpipe/capture.hpp"

namespace pad {

// Lossless 8-bit RGB PNG I/O. Throws pad::Error on unreadable or
// non-8-bit input.
Frame read_frame(const std::filesystem::path& path, std::int64_t timestamp_ms = 0);
void write_frame(const std::filesystem::path& path, const Frame& frame);
void write_mask(const std::filesystem::path& path, const Mask& mask);

// `<capture_id>_f<k>.png`
std::string frame_file_name(const std::string& capture_id, std::size_t k);

}  // namespace pad
