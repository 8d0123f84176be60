#include "arshoe/track.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

namespace arshoe {

namespace {

constexpr std::array<std::array<int, 2>, 16> kCircle = {{
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3},
}};

// Longest circular run of `flags` and its summed weight; ties keep the
// heavier run.
std::pair<int, int> longest_arc(const std::array<bool, 16>& flags, const std::array<int, 16>& weight) {
  int best_len = 0, best_sum = 0;
  for (int start = 0; start < 16; ++start) {
    if (!flags[start] || flags[(start + 15) % 16]) continue;
    int len = 0, sum = 0;
    while (len < 16 && flags[(start + len) % 16]) {
      sum += weight[(start + len) % 16];
      ++len;
    }
    if (len > best_len || (len == best_len && sum > best_sum)) {
      best_len = len;
      best_sum = sum;
    }
  }
  if (std::all_of(flags.begin(), flags.end(), [](bool f) { return f; })) {
    best_len = 16;
    best_sum = 0;
    for (int w : weight) best_sum += w;
  }
  return {best_len, best_sum};
}

struct FloatImage {
  int w = 0, h = 0;
  std::vector<float> v;
  float at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
  float sample(double x, double y) const {
    x = std::clamp(x, 0.0, w - 1.0);
    y = std::clamp(y, 0.0, h - 1.0);
    const int x0 = std::min(static_cast<int>(x), std::max(w - 2, 0));
    const int y0 = std::min(static_cast<int>(y), std::max(h - 2, 0));
    const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0, fy = y - y0;
    return static_cast<float>((1 - fy) * ((1 - fx) * at(x0, y0) + fx * at(x1, y0)) +
                              fy * ((1 - fx) * at(x0, y1) + fx * at(x1, y1)));
  }
};

struct Level {
  FloatImage img, gx, gy;
};

std::vector<Level> build_pyramid(const FrameImage& image, int levels) {
  std::vector<Level> pyr;
  FloatImage base{image.width, image.height, std::vector<float>(image.intensities.begin(), image.intensities.end())};
  for (int l = 0; l < levels; ++l) {
    Level lv;
    if (l == 0) {
      lv.img = base;
    } else {
      const FloatImage& src = pyr.back().img;
      FloatImage dst{std::max(1, src.w / 2), std::max(1, src.h / 2), {}};
      dst.v.resize(static_cast<std::size_t>(dst.w) * dst.h);
      for (int y = 0; y < dst.h; ++y) {
        for (int x = 0; x < dst.w; ++x) {
          const int sx = std::min(2 * x + 1, src.w - 1), sy = std::min(2 * y + 1, src.h - 1);
          dst.v[static_cast<std::size_t>(y) * dst.w + x] =
              0.25f * (src.at(2 * x, 2 * y) + src.at(sx, 2 * y) + src.at(2 * x, sy) + src.at(sx, sy));
        }
      }
      lv.img = std::move(dst);
    }
    const FloatImage& im = lv.img;
    lv.gx = {im.w, im.h, std::vector<float>(im.v.size())};
    lv.gy = {im.w, im.h, std::vector<float>(im.v.size())};
    for (int y = 0; y < im.h; ++y) {
      for (int x = 0; x < im.w; ++x) {
        const int xl = std::max(x - 1, 0), xr = std::min(x + 1, im.w - 1);
        const int yu = std::max(y - 1, 0), yd = std::min(y + 1, im.h - 1);
        const std::size_t i = static_cast<std::size_t>(y) * im.w + x;
        lv.gx.v[i] = (im.at(xr, y) - im.at(xl, y)) / static_cast<float>(std::max(xr - xl, 1));
        lv.gy.v[i] = (im.at(x, yd) - im.at(x, yu)) / static_cast<float>(std::max(yd - yu, 1));
      }
    }
    pyr.push_back(std::move(lv));
  }
  return pyr;
}

std::optional<Vec2> lk_track(const std::vector<Level>& from, const std::vector<Level>& to, const Vec2& p, int window,
                             int iterations) {
  const int r = window / 2;
  const int levels = static_cast<int>(from.size());
  Vec2 guess = Vec2::Zero();
  const int npx = (2 * r + 1) * (2 * r + 1);
  std::vector<float> ti(npx), tx(npx), ty(npx);

  for (int l = levels - 1; l >= 0; --l) {
    const Level& a = from[l];
    const Level& b = to[l];
    const double scale = std::ldexp(1.0, -l);
    const Vec2 pl = p * scale;
    double gxx = 0, gxy = 0, gyy = 0;
    int k = 0;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx, ++k) {
        const double x = pl.x() + dx, y = pl.y() + dy;
        ti[k] = a.img.sample(x, y);
        tx[k] = a.gx.sample(x, y);
        ty[k] = a.gy.sample(x, y);
        gxx += tx[k] * tx[k];
        gxy += tx[k] * ty[k];
        gyy += ty[k] * ty[k];
      }
    }
    const double det = gxx * gyy - gxy * gxy;
    const double min_eig = 0.5 * (gxx + gyy - std::sqrt((gxx - gyy) * (gxx - gyy) + 4 * gxy * gxy));
    if (det <= 0 || min_eig / npx < 1e-3) return std::nullopt;

    Vec2 v = Vec2::Zero();
    for (int it = 0; it < iterations; ++it) {
      double bx = 0, by = 0;
      k = 0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx, ++k) {
          const double diff = ti[k] - b.img.sample(pl.x() + guess.x() + v.x() + dx, pl.y() + guess.y() + v.y() + dy);
          bx += diff * tx[k];
          by += diff * ty[k];
        }
      }
      const Vec2 eta((gyy * bx - gxy * by) / det, (gxx * by - gxy * bx) / det);
      v += eta;
      if (eta.norm() < 0.01) break;
    }
    guess = l > 0 ? Vec2(2.0 * (guess + v)) : Vec2(guess + v);
  }
  const Vec2 out = p + guess;
  const Level& base = to.front();
  if (!std::isfinite(out.x()) || !std::isfinite(out.y()) || out.x() < 0 || out.y() < 0 || out.x() > base.img.w - 1 ||
      out.y() > base.img.h - 1) {
    return std::nullopt;
  }
  return out;
}

}  // namespace

int fast9_score(const FrameImage& image, int x, int y, int threshold) {
  const int c = image.at(x, y);
  std::array<bool, 16> bright{}, dark{};
  std::array<int, 16> diff{};
  for (int i = 0; i < 16; ++i) {
    const int p = image.at(x + kCircle[i][0], y + kCircle[i][1]);
    bright[i] = p > c + threshold;
    dark[i] = p < c - threshold;
    diff[i] = std::abs(p - c);
  }
  const auto [lb, sb] = longest_arc(bright, diff);
  const auto [ld, sd] = longest_arc(dark, diff);
  int score = 0;
  if (lb >= 9) score = std::max(score, sb);
  if (ld >= 9) score = std::max(score, sd);
  return score;
}

std::vector<Vec2> detect_fast(const FrameImage& image, const BinaryMask& mask, int threshold, int max_corners) {
  if (mask.width() != image.width || mask.height() != image.height) {
    throw Error(Errc::invalid_argument, "FAST mask size differs from image size");
  }
  if (threshold <= 0) throw Error(Errc::invalid_argument, "FAST threshold must be positive");
  const int w = image.width, h = image.height;
  std::vector<int> score(static_cast<std::size_t>(w) * h, 0);
  for (int y = 3; y < h - 3; ++y) {
    for (int x = 3; x < w - 3; ++x) {
      if (mask.at(x, y)) score[static_cast<std::size_t>(y) * w + x] = fast9_score(image, x, y, threshold);
    }
  }
  struct Corner {
    int x, y, s;
  };
  std::vector<Corner> corners;
  for (int y = 3; y < h - 3; ++y) {
    for (int x = 3; x < w - 3; ++x) {
      const int s = score[static_cast<std::size_t>(y) * w + x];
      if (s == 0) continue;
      bool keep = true;
      for (int dy = -1; dy <= 1 && keep; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int ns = score[static_cast<std::size_t>(y + dy) * w + x + dx];
          // Ties go to the earlier pixel in raster order.
          const bool earlier = dy < 0 || (dy == 0 && dx < 0);
          if (ns > s || (ns == s && earlier)) {
            keep = false;
            break;
          }
        }
      }
      if (keep) corners.push_back({x, y, s});
    }
  }
  std::stable_sort(corners.begin(), corners.end(), [](const Corner& a, const Corner& b) { return a.s > b.s; });
  if (max_corners >= 0 && corners.size() > static_cast<std::size_t>(max_corners)) corners.resize(max_corners);
  std::vector<Vec2> out;
  out.reserve(corners.size());
  for (const Corner& c : corners) out.emplace_back(c.x, c.y);
  return out;
}

MatchedPairs match_corners(const FrameImage& prev, const FrameImage& cur, const std::vector<Vec2>& corners, int window,
                           double fb_tolerance, int pyramid_levels, int iterations) {
  if (prev.width != cur.width || prev.height != cur.height) {
    throw Error(Errc::invalid_argument, "frames differ in size");
  }
  if (window < 5 || window % 2 == 0) throw Error(Errc::invalid_argument, "LK window must be odd and >= 5");
  const auto pa = build_pyramid(prev, pyramid_levels);
  const auto pb = build_pyramid(cur, pyramid_levels);
  MatchedPairs out;
  for (const Vec2& c : corners) {
    const auto fwd = lk_track(pa, pb, c, window, iterations);
    if (!fwd) continue;
    const auto back = lk_track(pb, pa, *fwd, window, iterations);
    if (!back || (*back - c).norm() > fb_tolerance) continue;
    out.prev.push_back(c);
    out.cur.push_back(*fwd);
  }
  return out;
}

MatchedPairs track_pairs(const FrameImage& prev, const FrameImage& cur, const BinaryMask& foot_mask,
                         const TrackerConfig& cfg) {
  const auto corners = detect_fast(prev, foot_mask, cfg.fast_threshold, cfg.max_corners);
  return match_corners(prev, cur, corners, cfg.window, cfg.fb_tolerance, cfg.pyramid_levels, cfg.iterations);
}

}  // namespace arshoe
