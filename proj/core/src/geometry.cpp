// Copyright 2026 The SMS Preprocessing Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sms/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sms/error.hpp"

namespace sms {

double Box7::component(std::size_t i) const {
  switch (i) {
    case 0: return cx;
    case 1: return cy;
    case 2: return cz;
    case 3: return l;
    case 4: return w;
    case 5: return h;
    case 6: return yaw;
  }
  throw std::out_of_range("Box7 component index");
}

bool Box7::valid() const noexcept {
  return std::isfinite(cx) && std::isfinite(cy) && std::isfinite(cz) &&
         std::isfinite(yaw) && l > 0 && w > 0 && h > 0 && std::isfinite(l) &&
         std::isfinite(w) && std::isfinite(h);
}

Box7 Box7::enlarged(double margin) const noexcept {
  Box7 b = *this;
  b.l += 2 * margin;
  b.w += 2 * margin;
  b.h += 2 * margin;
  return b;
}

double normalize_yaw(double yaw) noexcept {
  constexpr double kTwoPi = 2 * std::numbers::pi;
  double a = std::fmod(yaw, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

std::array<Vec2, 4> bev_corners(const Box7& box) noexcept {
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  const double hl = box.l / 2, hw = box.w / 2;
  const double local[4][2] = {{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}};
  std::array<Vec2, 4> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = {box.cx + c * local[i][0] - s * local[i][1],
              box.cy + s * local[i][0] + c * local[i][1]};
  }
  return out;
}

bool bev_contains(const Box7& box, double x, double y) noexcept {
  const double dx = x - box.cx, dy = y - box.cy;
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  const double lx = c * dx + s * dy;
  const double ly = -s * dx + c * dy;
  return std::abs(lx) <= box.l / 2 && std::abs(ly) <= box.w / 2;
}

bool point_in_box(const Point& p, const Box7& box) noexcept {
  return std::abs(p.z - box.cz) <= box.h / 2 && bev_contains(box, p.x, p.y);
}

bool point_in_any_box(const Point& p, const std::vector<Box7>& boxes) noexcept {
  return std::any_of(boxes.begin(), boxes.end(),
                     [&](const Box7& b) { return point_in_box(p, b); });
}

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Inside-or-on test for a convex CCW quad, with a small tolerance so shared
// edges of coincident boxes count as contained.
bool quad_contains(const std::array<Vec2, 4>& q, const Vec2& p) {
  constexpr double kEps = 1e-9;
  for (int i = 0; i < 4; ++i) {
    if (cross(q[i], q[(i + 1) % 4], p) < -kEps) return false;
  }
  return true;
}

}  // namespace

// Vertex-collection method: the intersection of two convex quads is the
// convex hull of (edge/edge crossings) + (corners of one inside the other).
double bev_intersection_area(const Box7& a, const Box7& b) noexcept {
  const auto qa = bev_corners(a);
  const auto qb = bev_corners(b);
  std::vector<Vec2> pts;
  pts.reserve(24);

  for (const auto& p : qa) {
    if (quad_contains(qb, p)) pts.push_back(p);
  }
  for (const auto& p : qb) {
    if (quad_contains(qa, p)) pts.push_back(p);
  }
  for (int i = 0; i < 4; ++i) {
    const Vec2 a0 = qa[i], a1 = qa[(i + 1) % 4];
    for (int j = 0; j < 4; ++j) {
      const Vec2 b0 = qb[j], b1 = qb[(j + 1) % 4];
      const double rx = a1.x - a0.x, ry = a1.y - a0.y;
      const double sx = b1.x - b0.x, sy = b1.y - b0.y;
      const double denom = rx * sy - ry * sx;
      if (std::abs(denom) < 1e-14) continue;
      const double qx = b0.x - a0.x, qy = b0.y - a0.y;
      const double t = (qx * sy - qy * sx) / denom;
      const double u = (qx * ry - qy * rx) / denom;
      if (t >= 0 && t <= 1 && u >= 0 && u <= 1) {
        pts.push_back({a0.x + t * rx, a0.y + t * ry});
      }
    }
  }
  if (pts.size() < 3) return 0.0;

  Vec2 center{0, 0};
  for (const auto& p : pts) {
    center.x += p.x;
    center.y += p.y;
  }
  center.x /= static_cast<double>(pts.size());
  center.y /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Vec2& p, const Vec2& q) {
    return std::atan2(p.y - center.y, p.x - center.x) <
           std::atan2(q.y - center.y, q.x - center.x);
  });
  double area2 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto& q = pts[(i + 1) % pts.size()];
    area2 += p.x * q.y - q.x * p.y;
  }
  return std::abs(area2) / 2;
}

double bev_iou(const Box7& a, const Box7& b) noexcept {
  const double area_a = a.l * a.w;
  const double area_b = b.l * b.w;
  const double inter = bev_intersection_area(a, b);
  const double uni = area_a + area_b - inter;
  if (uni <= 0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

namespace {

double parse_double(std::string_view tok, std::size_t line) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line) +
                                            ": bad number '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

std::vector<LabeledBox> parse_labels(std::string_view text) {
  std::vector<LabeledBox> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      const std::size_t start = pos;
      while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos > start) tokens.push_back(line.substr(start, pos - start));
    }
    if (tokens.empty() || tokens[0].front() == '#') continue;
    if (tokens.size() != 8 && tokens.size() != 9) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": expected 8 or 9 fields, got " +
                      std::to_string(tokens.size()));
    }
    LabeledBox lb;
    lb.class_name = std::string(tokens[0]);
    double v[8];
    for (std::size_t i = 1; i < tokens.size(); ++i) v[i - 1] = parse_double(tokens[i], line_no);
    lb.box = Box7{v[0], v[1], v[2], v[3], v[4], v[5], normalize_yaw(v[6])};
    if (tokens.size() == 9) lb.score = v[7];
    if (!lb.box.valid()) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": box sizes must be positive");
    }
    out.push_back(std::move(lb));
  }
  return out;
}

std::string format_labels(const std::vector<LabeledBox>& labels) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& lb : labels) {
    os << lb.class_name << ' ' << lb.box.cx << ' ' << lb.box.cy << ' ' << lb.box.cz << ' '
       << lb.box.l << ' ' << lb.box.w << ' ' << lb.box.h << ' ' << lb.box.yaw << ' '
       << lb.score << '\n';
  }
  return os.str();
}

std::vector<Box7> boxes_of(const std::vector<LabeledBox>& labels) {
  std::vector<Box7> out;
  out.reserve(labels.size());
  for (const auto& lb : labels) out.push_back(lb.box);
  return out;
}

}  // namespace sms
