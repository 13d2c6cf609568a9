#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace pad {

enum class Channel : int { red = 0, green = 1, blue = 2 };

inline constexpr std::array<Channel, 3> kChannels{Channel::red, Channel::green, Channel::blue};

std::string_view channel_name(Channel c);

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
};

// Row-major single-plane raster.
template <typename T>
class Plane {
 public:
  using value_type = T;

  Plane() = default;
  Plane(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  std::span<const T> row(int y) const {
    return std::span<const T>(data_).subspan(static_cast<std::size_t>(y) * width_, width_);
  }

  bool same_shape(const auto& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  bool operator==(const Plane&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using GrayFrame = Plane<std::uint8_t>;
using RealImage = Plane<double>;

// Boolean pixel mask; stored as 0/1 bytes.
class Mask : public Plane<std::uint8_t> {
 public:
  using Plane::Plane;

  bool test(int x, int y) const { return (*this)(x, y) != 0; }
  std::size_t count() const;
  std::size_t complement_count() const { return size() - count(); }
};

Mask mask_and(const Mask& a, const Mask& b);
Mask mask_or(const Mask& a, const Mask& b);
std::size_t mask_xor_count(const Mask& a, const Mask& b);
bool mask_subset(const Mask& inner, const Mask& outer);

// 8-bit RGB frame held as three planes plus its capture time.
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, std::int64_t timestamp_ms = 0);
  // Throws std::invalid_argument when the planes disagree in shape.
  Frame(std::array<GrayFrame, 3> planes, std::int64_t timestamp_ms);

  int width() const { return planes_[0].width(); }
  int height() const { return planes_[0].height(); }
  std::int64_t timestamp_ms() const { return timestamp_ms_; }
  void set_timestamp_ms(std::int64_t t) { timestamp_ms_ = t; }

  const GrayFrame& plane(Channel c) const { return planes_[static_cast<int>(c)]; }
  GrayFrame& plane(Channel c) { return planes_[static_cast<int>(c)]; }

  std::uint8_t at(Channel c, int x, int y) const { return plane(c)(x, y); }
  void set_rgb(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);

  bool operator==(const Frame&) const = default;

 private:
  std::array<GrayFrame, 3> planes_;
  std::int64_t timestamp_ms_ = 0;
};

// Luma with weights 0.299/0.587/0.114, rounded half up. Integer arithmetic
// so equal channels always map to themselves.
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);
GrayFrame to_grayscale(const Frame& frame);

// Values of `plane` at every set pixel of `mask`, in scan order.
std::vector<double> masked_values(const GrayFrame& plane, const Mask& mask);
double masked_mean(const GrayFrame& plane, const Mask& mask);

// Bilinear sample with edge clamping.
double sample_bilinear(const GrayFrame& plane, double x, double y);

}  // namespace pad
