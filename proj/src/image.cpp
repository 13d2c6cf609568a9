#include "padpipe/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pad {

std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::red: return "R";
    case Channel::green: return "G";
    case Channel::blue: return "B";
  }
  return "?";
}

std::size_t Mask::count() const {
  std::size_t n = 0;
  for (auto v : data()) n += v != 0;
  return n;
}

namespace {

void require_same_shape(const Mask& a, const Mask& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mask shapes differ");
}

}  // namespace

Mask mask_and(const Mask& a, const Mask& b) {
  require_same_shape(a, b);
  Mask out(a.width(), a.height());
  auto o = out.data();
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = (da[i] && db[i]) ? 1 : 0;
  return out;
}

Mask mask_or(const Mask& a, const Mask& b) {
  require_same_shape(a, b);
  Mask out(a.width(), a.height());
  auto o = out.data();
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = (da[i] || db[i]) ? 1 : 0;
  return out;
}

std::size_t mask_xor_count(const Mask& a, const Mask& b) {
  require_same_shape(a, b);
  auto da = a.data();
  auto db = b.data();
  std::size_t n = 0;
  for (std::size_t i = 0; i < da.size(); ++i) n += (da[i] != 0) != (db[i] != 0);
  return n;
}

bool mask_subset(const Mask& inner, const Mask& outer) {
  require_same_shape(inner, outer);
  auto di = inner.data();
  auto dout = outer.data();
  for (std::size_t i = 0; i < di.size(); ++i) {
    if (di[i] && !dout[i]) return false;
  }
  return true;
}

Frame::Frame(int width, int height, std::int64_t timestamp_ms)
    : planes_{GrayFrame(width, height), GrayFrame(width, height), GrayFrame(width, height)},
      timestamp_ms_(timestamp_ms) {}

Frame::Frame(std::array<GrayFrame, 3> planes, std::int64_t timestamp_ms)
    : planes_(std::move(planes)), timestamp_ms_(timestamp_ms) {
  if (!planes_[0].same_shape(planes_[1]) || !planes_[0].same_shape(planes_[2])) {
    throw std::invalid_argument("frame channel planes differ in shape");
  }
}

void Frame::set_rgb(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  planes_[0](x, y) = r;
  planes_[1](x, y) = g;
  planes_[2](x, y) = b;
}

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const unsigned v = 299u * r + 587u * g + 114u * b + 500u;
  return static_cast<std::uint8_t>(std::min(255u, v / 1000u));
}

GrayFrame to_grayscale(const Frame& frame) {
  GrayFrame out(frame.width(), frame.height());
  auto r = frame.plane(Channel::red).data();
  auto g = frame.plane(Channel::green).data();
  auto b = frame.plane(Channel::blue).data();
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = luma(r[i], g[i], b[i]);
  return out;
}

std::vector<double> masked_values(const GrayFrame& plane, const Mask& mask) {
  if (!plane.same_shape(mask)) throw std::invalid_argument("plane and mask shapes differ");
  std::vector<double> out;
  out.reserve(mask.count());
  auto p = plane.data();
  auto m = mask.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (m[i]) out.push_back(p[i]);
  }
  return out;
}

double masked_mean(const GrayFrame& plane, const Mask& mask) {
  if (!plane.same_shape(mask)) throw std::invalid_argument("plane and mask shapes differ");
  auto p = plane.data();
  auto m = mask.data();
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (m[i]) {
      sum += p[i];
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

double sample_bilinear(const GrayFrame& plane, double x, double y) {
  const double cx = std::clamp(x, 0.0, static_cast<double>(plane.width() - 1));
  const double cy = std::clamp(y, 0.0, static_cast<double>(plane.height() - 1));
  const int x0 = static_cast<int>(std::floor(cx));
  const int y0 = static_cast<int>(std::floor(cy));
  const int x1 = std::min(x0 + 1, plane.width() - 1);
  const int y1 = std::min(y0 + 1, plane.height() - 1);
  const double fx = cx - x0;
  const double fy = cy - y0;
  const double top = plane(x0, y0) + fx * (plane(x1, y0) - plane(x0, y0));
  const double bottom = plane(x0, y1) + fx * (plane(x1, y1) - plane(x0, y1));
  return top + fy * (bottom - top);
}

}  // namespace pad
