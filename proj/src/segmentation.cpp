#include "padpipe/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_set>

#include "padpipe/errors.hpp"

namespace pad {

namespace {

constexpr double kDefaultRidgePeriod = 8.0;
constexpr double kMinRidgePeriod = 3.0;
constexpr double kMaxRidgePeriod = 25.0;

template <typename Pred>
Mask neighbourhood_op(const Mask& m, Pred keep) {
  Mask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      int set = 0;
      int total = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (!m.contains(x + dx, y + dy)) continue;
          ++total;
          set += m.test(x + dx, y + dy);
        }
      }
      out(x, y) = keep(set, total) ? 1 : 0;
    }
  }
  return out;
}

GrayFrame box_blur3(const GrayFrame& g) {
  GrayFrame out(g.width(), g.height());
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      int sum = 0;
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (!g.contains(x + dx, y + dy)) continue;
          sum += g(x + dx, y + dy);
          ++n;
        }
      }
      out(x, y) = static_cast<std::uint8_t>((sum + n / 2) / n);
    }
  }
  return out;
}

}  // namespace

Mask dilate3(const Mask& m) {
  return neighbourhood_op(m, [](int set, int) { return set > 0; });
}

Mask erode3(const Mask& m) {
  return neighbourhood_op(m, [](int set, int total) { return set == total; });
}

Mask largest_component(const Mask& m) {
  const int w = m.width();
  const int h = m.height();
  std::vector<int> label(m.size(), -1);
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto start = m.index(x, y);
      if (!m.test(x, y) || label[start] >= 0) continue;
      const int id = static_cast<int>(sizes.size());
      std::size_t size = 0;
      label[start] = id;
      stack.push_back(start);
      while (!stack.empty()) {
        const auto i = stack.back();
        stack.pop_back();
        ++size;
        const int cx = static_cast<int>(i % w);
        const int cy = static_cast<int>(i / w);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (!m.contains(nx, ny) || !m.test(nx, ny)) continue;
            const auto j = m.index(nx, ny);
            if (label[j] >= 0) continue;
            label[j] = id;
            stack.push_back(j);
          }
        }
      }
      sizes.push_back(size);
    }
  }
  Mask out(w, h);
  if (sizes.empty()) return out;
  const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = label[i] == best ? 1 : 0;
  return out;
}

Mask compute_foreground(const GrayFrame& gray, const ForegroundConfig& cfg) {
  const int w = gray.width();
  const int h = gray.height();
  const int b = std::max(1, cfg.block);
  Mask raw(w, h);
  for (int y0 = 0; y0 < h; y0 += b) {
    for (int x0 = 0; x0 < w; x0 += b) {
      const int x1 = std::min(x0 + b, w);
      const int y1 = std::min(y0 + b, h);
      double sum = 0.0;
      double sq = 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          sum += gray(x, y);
          sq += static_cast<double>(gray(x, y)) * gray(x, y);
        }
      }
      const double n = static_cast<double>((x1 - x0) * (y1 - y0));
      const double mean = sum / n;
      const double var = std::max(0.0, sq / n - mean * mean);
      if (var < cfg.var_threshold) continue;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) raw(x, y) = 1;
      }
    }
  }
  const Mask closed = erode3(dilate3(raw));
  const Mask opened = dilate3(erode3(closed));
  return largest_component(opened);
}

RidgeGeometry estimate_ridge_geometry(const GrayFrame& gray, const Mask& foreground, int block) {
  const int w = gray.width();
  const int h = gray.height();
  RidgeGeometry geo;
  geo.block = std::max(4, block);
  geo.blocks_x = std::max(1, (w + geo.block - 1) / geo.block);
  geo.blocks_y = std::max(1, (h + geo.block - 1) / geo.block);
  const std::size_t nb = static_cast<std::size_t>(geo.blocks_x) * geo.blocks_y;

  auto px = [&](int x, int y) -> double {
    return gray(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  };

  // Doubled-angle gradient covariance per block.
  std::vector<double> c2(nb, 0.0);
  std::vector<double> s2(nb, 0.0);
  for (int by = 0; by < geo.blocks_y; ++by) {
    for (int bx = 0; bx < geo.blocks_x; ++bx) {
      double gxx = 0.0, gyy = 0.0, gxy = 0.0;
      const int x0 = bx * geo.block;
      const int y0 = by * geo.block;
      for (int y = y0; y < std::min(y0 + geo.block, h); ++y) {
        for (int x = x0; x < std::min(x0 + geo.block, w); ++x) {
          const double gx = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) -
                            (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
          const double gy = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) -
                            (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
          gxx += gx * gx;
          gyy += gy * gy;
          gxy += gx * gy;
        }
      }
      const auto i = static_cast<std::size_t>(by) * geo.blocks_x + bx;
      c2[i] = gxx - gyy;
      s2[i] = 2.0 * gxy;
    }
  }

  geo.normal_angle.assign(nb, 0.0);
  for (int by = 0; by < geo.blocks_y; ++by) {
    for (int bx = 0; bx < geo.blocks_x; ++bx) {
      double c = 0.0, s = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = bx + dx;
          const int ny = by + dy;
          if (nx < 0 || ny < 0 || nx >= geo.blocks_x || ny >= geo.blocks_y) continue;
          const auto j = static_cast<std::size_t>(ny) * geo.blocks_x + nx;
          const double wgt = (dx == 0 && dy == 0) ? 2.0 : 1.0;
          c += wgt * c2[j];
          s += wgt * s2[j];
        }
      }
      geo.normal_angle[static_cast<std::size_t>(by) * geo.blocks_x + bx] = 0.5 * std::atan2(s, c);
    }
  }

  // Period from the spacing of extrema in the grey-level signature taken
  // across the ridges.
  geo.period.assign(nb, 0.0);
  std::vector<bool> valid(nb, false);
  const int half = geo.block;
  for (int by = 0; by < geo.blocks_y; ++by) {
    for (int bx = 0; bx < geo.blocks_x; ++bx) {
      const auto i = static_cast<std::size_t>(by) * geo.blocks_x + bx;
      const double cx = bx * geo.block + geo.block / 2.0;
      const double cy = by * geo.block + geo.block / 2.0;
      const double nxv = std::cos(geo.normal_angle[i]);
      const double nyv = std::sin(geo.normal_angle[i]);
      std::vector<double> sig(2 * half + 1, 0.0);
      for (int t = -half; t <= half; ++t) {
        double acc = 0.0;
        int cnt = 0;
        for (int s = -geo.block / 2; s <= geo.block / 2; ++s) {
          const double sx = cx + t * nxv - s * nyv;
          const double sy = cy + t * nyv + s * nxv;
          acc += sample_bilinear(gray, sx, sy);
          ++cnt;
        }
        sig[t + half] = acc / cnt;
      }
      std::vector<double> gaps;
      for (int sign : {1, -1}) {
        int prev = -1;
        for (std::size_t k = 1; k + 1 < sig.size(); ++k) {
          const double a = sign * sig[k - 1], b = sign * sig[k], c = sign * sig[k + 1];
          if (b > a && b >= c) {
            if (prev >= 0) gaps.push_back(static_cast<double>(k) - prev);
            prev = static_cast<int>(k);
          }
        }
      }
      if (gaps.empty()) continue;
      const double p = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
      if (p >= kMinRidgePeriod && p <= kMaxRidgePeriod) {
        geo.period[i] = p;
        valid[i] = true;
      }
    }
  }
  std::vector<double> good;
  for (std::size_t i = 0; i < nb; ++i) {
    const int bx = static_cast<int>(i % geo.blocks_x);
    const int by = static_cast<int>(i / geo.blocks_x);
    const int mx = std::min(bx * geo.block + geo.block / 2, w - 1);
    const int my = std::min(by * geo.block + geo.block / 2, h - 1);
    if (valid[i] && (foreground.empty() || foreground.test(mx, my))) good.push_back(geo.period[i]);
  }
  double fallback = kDefaultRidgePeriod;
  if (!good.empty()) {
    std::nth_element(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(good.size() / 2), good.end());
    fallback = good[good.size() / 2];
  }
  for (std::size_t i = 0; i < nb; ++i) {
    if (!valid[i]) geo.period[i] = fallback;
  }
  return geo;
}

Mask binarize_ridges(const GrayFrame& gray, const Mask& foreground, int window, RidgePolarity polarity) {
  const int w = gray.width();
  const int h = gray.height();
  const GrayFrame smooth = box_blur3(gray);
  // Summed-area table for the local mean.
  std::vector<double> sat(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
  auto at = [&](int x, int y) -> double& { return sat[static_cast<std::size_t>(y) * (w + 1) + x]; };
  for (int y = 0; y < h; ++y) {
    double row = 0.0;
    for (int x = 0; x < w; ++x) {
      row += smooth(x, y);
      at(x + 1, y + 1) = at(x + 1, y) + row;
    }
  }
  const int r = std::max(1, window / 2);
  Mask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!foreground.test(x, y)) continue;
      const int x0 = std::max(0, x - r), x1 = std::min(w, x + r + 1);
      const int y0 = std::max(0, y - r), y1 = std::min(h, y + r + 1);
      const double mean =
          (at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0)) / static_cast<double>((x1 - x0) * (y1 - y0));
      const double v = smooth(x, y);
      const bool ridge = polarity == RidgePolarity::dark ? v < mean : v > mean;
      out(x, y) = ridge ? 1 : 0;
    }
  }
  return out;
}

Mask thin(const Mask& binary) {
  Mask img = binary;
  const int w = img.width();
  const int h = img.height();
  auto get = [&](int x, int y) -> int { return img.contains(x, y) && img.test(x, y) ? 1 : 0; };
  std::vector<std::size_t> marked;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      marked.clear();
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!img.test(x, y)) continue;
          const int p2 = get(x, y - 1), p3 = get(x + 1, y - 1), p4 = get(x + 1, y), p5 = get(x + 1, y + 1);
          const int p6 = get(x, y + 1), p7 = get(x - 1, y + 1), p8 = get(x - 1, y), p9 = get(x - 1, y - 1);
          const int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
          if (b < 2 || b > 6) continue;
          const int seq[9] = {p2, p3, p4, p5, p6, p7, p8, p9, p2};
          int a = 0;
          for (int k = 0; k < 8; ++k) a += (seq[k] == 0 && seq[k + 1] == 1);
          if (a != 1) continue;
          if (pass == 0) {
            if (p2 * p4 * p6 != 0 || p4 * p6 * p8 != 0) continue;
          } else {
            if (p2 * p4 * p8 != 0 || p2 * p6 * p8 != 0) continue;
          }
          marked.push_back(img.index(x, y));
        }
      }
      for (auto i : marked) img.data()[i] = 0;
      changed = changed || !marked.empty();
    }
  }
  return img;
}

namespace {

// Skeleton adjacency: 4-neighbours always, diagonals only when neither
// shared 4-neighbour is set. Avoids false junctions at staircase corners.
std::vector<std::size_t> skeleton_neighbours(const Mask& s, std::size_t i) {
  const int w = s.width();
  const int x = static_cast<int>(i % w);
  const int y = static_cast<int>(i / w);
  auto on = [&](int xx, int yy) { return s.contains(xx, yy) && s.test(xx, yy); };
  std::vector<std::size_t> out;
  constexpr int d4[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (const auto& d : d4) {
    if (on(x + d[0], y + d[1])) out.push_back(s.index(x + d[0], y + d[1]));
  }
  constexpr int dd[4][2] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  for (const auto& d : dd) {
    if (on(x + d[0], y + d[1]) && !on(x + d[0], y) && !on(x, y + d[1])) out.push_back(s.index(x + d[0], y + d[1]));
  }
  return out;
}

}  // namespace

std::vector<std::vector<Point>> trace_skeleton(const Mask& skeleton) {
  const int w = skeleton.width();
  const std::size_t n = skeleton.size();
  std::vector<std::vector<std::size_t>> nbrs(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (skeleton.data()[i]) nbrs[i] = skeleton_neighbours(skeleton, i);
  }
  auto edge_key = [n](std::size_t a, std::size_t b) { return std::min(a, b) * n + std::max(a, b); };
  std::unordered_set<std::size_t> used;
  std::vector<bool> visited(n, false);
  auto to_point = [w](std::size_t i) { return Point{static_cast<int>(i % w), static_cast<int>(i / w)}; };

  std::vector<std::vector<Point>> paths;
  for (std::size_t p = 0; p < n; ++p) {
    if (!skeleton.data()[p] || nbrs[p].size() == 2 || nbrs[p].empty()) continue;
    for (auto q : nbrs[p]) {
      if (used.contains(edge_key(p, q))) continue;
      used.insert(edge_key(p, q));
      std::vector<Point> path{to_point(p)};
      std::size_t prev = p;
      std::size_t cur = q;
      while (true) {
        path.push_back(to_point(cur));
        if (nbrs[cur].size() != 2) break;
        visited[cur] = true;
        const std::size_t next = nbrs[cur][0] == prev ? nbrs[cur][1] : nbrs[cur][0];
        if (used.contains(edge_key(cur, next))) break;
        used.insert(edge_key(cur, next));
        prev = cur;
        cur = next;
      }
      paths.push_back(std::move(path));
    }
  }
  // Closed loops have no end or junction pixel.
  for (std::size_t p = 0; p < n; ++p) {
    if (!skeleton.data()[p] || nbrs[p].size() != 2 || visited[p]) continue;
    std::vector<Point> path{to_point(p)};
    visited[p] = true;
    std::size_t prev = p;
    std::size_t cur = nbrs[p][0];
    while (cur != p && !visited[cur]) {
      path.push_back(to_point(cur));
      visited[cur] = true;
      const std::size_t next = nbrs[cur][0] == prev ? nbrs[cur][1] : nbrs[cur][0];
      prev = cur;
      cur = next;
    }
    paths.push_back(std::move(path));
  }
  return paths;
}

RidgeExtraction extract_ridges(const GrayFrame& gray, const Mask& foreground, const RidgeConfig& cfg) {
  RidgeExtraction out;
  out.geometry = estimate_ridge_geometry(gray, foreground, cfg.block);
  out.ridge_pixels = binarize_ridges(gray, foreground, cfg.block, cfg.polarity);
  out.skeleton = thin(out.ridge_pixels);
  for (auto& path : trace_skeleton(out.skeleton)) {
    if (path.size() < cfg.min_length) continue;
    RidgeSignal sig;
    sig.samples = sample_path(gray, path);
    sig.path = std::move(path);
    out.signals.push_back(std::move(sig));
  }
  if (out.signals.empty()) throw EmptyRidgeSet("no ridge of at least " + std::to_string(cfg.min_length) + " pixels");
  return out;
}

RegionSet compute_regions(const GrayFrame& gray, const ForegroundConfig& fg, const RidgeConfig& rc) {
  RegionSet regions;
  regions.foreground = compute_foreground(gray, fg);
  auto ridges = extract_ridges(gray, regions.foreground, rc);
  regions.ridge_pixels = std::move(ridges.ridge_pixels);
  regions.ridge_signals = std::move(ridges.signals);
  regions.geometry = std::move(ridges.geometry);
  return regions;
}

namespace {

// Pearson correlation; nullopt when either side is constant.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<double>(a.size());
  if (a.empty()) return std::nullopt;
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

bool constant(std::span<const double> s) {
  return std::adjacent_find(s.begin(), s.end(), std::not_equal_to<>()) == s.end();
}

std::pair<std::size_t, std::size_t> overlap(std::size_t n1, std::size_t n2, int lag, std::size_t& len) {
  const std::size_t o1 = lag < 0 ? static_cast<std::size_t>(-lag) : 0;
  const std::size_t o2 = lag > 0 ? static_cast<std::size_t>(lag) : 0;
  len = (o1 >= n1 || o2 >= n2) ? 0 : std::min(n1 - o1, n2 - o2);
  return {o1, o2};
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> apply_lag(std::span<const double> s1, std::span<const double> s2,
                                                              int lag) {
  std::size_t len = 0;
  const auto [o1, o2] = overlap(s1.size(), s2.size(), lag, len);
  return {std::vector<double>(s1.begin() + static_cast<std::ptrdiff_t>(o1),
                              s1.begin() + static_cast<std::ptrdiff_t>(o1 + len)),
          std::vector<double>(s2.begin() + static_cast<std::ptrdiff_t>(o2),
                              s2.begin() + static_cast<std::ptrdiff_t>(o2 + len))};
}

Alignment realign_signals(std::span<const double> s1, std::span<const double> s2, int max_lag) {
  if (max_lag < 0) throw AlignmentError("negative max_lag");
  const auto need = static_cast<std::size_t>(2 * max_lag);
  if (s1.size() < need || s2.size() < need || s1.empty() || s2.empty()) {
    throw AlignmentError("signals shorter than 2 * max_lag (" + std::to_string(s1.size()) + ", " +
                         std::to_string(s2.size()) + ")");
  }
  Alignment out;
  if (constant(s1) || constant(s2)) {
    out.degenerate = true;
  } else {
    double best = -2.0;
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
      std::size_t len = 0;
      const auto [o1, o2] = overlap(s1.size(), s2.size(), lag, len);
      if (len < 2) continue;
      const auto r = pearson(s1.subspan(o1, len), s2.subspan(o2, len));
      if (!r) continue;
      // Ties keep the lag nearest zero.
      if (*r > best || (*r == best && std::abs(lag) < std::abs(out.lag))) {
        best = *r;
        out.lag = lag;
      }
    }
    if (best == -2.0) out.degenerate = true;
  }
  std::tie(out.first, out.second) = apply_lag(s1, s2, out.lag);
  return out;
}

std::vector<Point> top_ridge_path(std::span<const RidgeSignal> signals, std::size_t top_n) {
  std::vector<std::size_t> order(signals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return signals[a].path.size() > signals[b].path.size(); });
  std::vector<Point> path;
  for (std::size_t k = 0; k < std::min(top_n, order.size()); ++k) {
    const auto& p = signals[order[k]].path;
    path.insert(path.end(), p.begin(), p.end());
  }
  return path;
}

std::vector<double> sample_path(const GrayFrame& plane, std::span<const Point> path) {
  std::vector<double> out;
  out.reserve(path.size());
  for (const auto& p : path) out.push_back(plane(p.x, p.y));
  return out;
}

}  // namespace pad
