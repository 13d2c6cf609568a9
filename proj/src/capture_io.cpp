#include "padpipe/capture_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "padpipe/errors.hpp"

namespace pad {

Frame read_frame(const std::filesystem::path& path, std::int64_t timestamp_ms) {
  const cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (img.empty()) throw Error("cannot read image " + path.string());
  if (img.depth() != CV_8U) throw Error("not an 8-bit image: " + path.string());

  Frame frame(img.cols, img.rows, timestamp_ms);
  const int ch = img.channels();
  for (int y = 0; y < img.rows; ++y) {
    const auto* row = img.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.cols; ++x) {
      const auto* px = row + static_cast<std::ptrdiff_t>(x) * ch;
      if (ch == 1) {
        frame.set_rgb(x, y, px[0], px[0], px[0]);
      } else {
        // OpenCV stores BGR(A).
        frame.set_rgb(x, y, px[2], px[1], px[0]);
      }
    }
  }
  return frame;
}

void write_frame(const std::filesystem::path& path, const Frame& frame) {
  cv::Mat img(frame.height(), frame.width(), CV_8UC3);
  for (int y = 0; y < frame.height(); ++y) {
    auto* row = img.ptr<std::uint8_t>(y);
    for (int x = 0; x < frame.width(); ++x) {
      row[3 * x + 0] = frame.at(Channel::blue, x, y);
      row[3 * x + 1] = frame.at(Channel::green, x, y);
      row[3 * x + 2] = frame.at(Channel::red, x, y);
    }
  }
  if (!cv::imwrite(path.string(), img, {cv::IMWRITE_PNG_COMPRESSION, 6})) {
    throw Error("cannot write image " + path.string());
  }
}

void write_mask(const std::filesystem::path& path, const Mask& mask) {
  cv::Mat img(mask.height(), mask.width(), CV_8UC1);
  for (int y = 0; y < mask.height(); ++y) {
    auto* row = img.ptr<std::uint8_t>(y);
    for (int x = 0; x < mask.width(); ++x) row[x] = mask.test(x, y) ? 255 : 0;
  }
  if (!cv::imwrite(path.string(), img, {cv::IMWRITE_PNG_BILEVEL, 1})) {
    throw Error("cannot write mask " + path.string());
  }
}

std::string frame_file_name(const std::string& capture_id, std::size_t k) {
  return capture_id + "_f" + std::to_string(k) + ".png";
}

}  // namespace pad
