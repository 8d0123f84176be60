#include "arshoe/pnp.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/SVD>

namespace arshoe {

void FootModel::validate() const {
  if (cloud.points.empty()) throw Error(Errc::invalid_geometry, "foot model cloud is empty");
  Eigen::Matrix<double, kNumKeypoints, 3> centered;
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : keypoints3d) mean += p;
  mean /= kNumKeypoints;
  for (int i = 0; i < kNumKeypoints; ++i) centered.row(i) = (keypoints3d[i] - mean).transpose();
  const Vec3 sv = Eigen::JacobiSVD<Eigen::Matrix<double, kNumKeypoints, 3>>(centered).singularValues();
  if (!(sv(2) > 1e-3 * sv(0))) {
    throw Error(Errc::invalid_geometry, "foot model keypoints are (nearly) coplanar");
  }
}

FootModel default_foot_model() {
  FootModel m;
  m.scale_length = 0.26;
  m.keypoints3d = {
      Vec3(-0.120, 0.022, 0.060),   // 0 heel, left
      Vec3(0.130, 0.000, 0.030),    // 1 toe
      Vec3(-0.120, -0.022, 0.060),  // 2 heel, right
      Vec3(0.060, 0.045, 0.020),    // 3 forefoot side, left
      Vec3(0.060, -0.045, 0.020),   // 4 forefoot side, right
      Vec3(-0.040, 0.038, 0.030),   // 5 rear side, left
      Vec3(-0.040, -0.038, 0.030),  // 6 rear side, right
      Vec3(0.020, 0.000, 0.080),    // 7 instep
  };

  // Shell of half-ellipse cross sections along the foot, plus the sole rim.
  const auto half_width = [](double s) { return 0.047 * std::sqrt(std::sin(std::numbers::pi * (0.08 + 0.84 * s))); };
  const auto height = [](double s) { return 0.085 - 0.055 * s; };
  constexpr int kStations = 27;
  constexpr int kArc = 9;
  for (int i = 0; i < kStations; ++i) {
    const double s = static_cast<double>(i) / (kStations - 1);  // 0 heel .. 1 toe
    const double x = -0.13 + 0.26 * s;
    for (int j = 0; j < kArc; ++j) {
      const double th = std::numbers::pi * j / (kArc - 1);
      m.cloud.points.emplace_back(x, half_width(s) * std::cos(th), height(s) * std::sin(th));
    }
  }

  // Opening: an ellipse in plan view, draped on the upper surface.
  constexpr int kRing = 24;
  for (int j = 0; j < kRing; ++j) {
    const double th = 2.0 * std::numbers::pi * j / kRing;
    const double x = -0.045 + 0.034 * std::cos(th);
    const double y = 0.02 * std::sin(th);
    const double s = (x + 0.13) / 0.26;
    const double c = y / half_width(s);
    m.opening.emplace_back(x, y, height(s) * std::sqrt(1.0 - c * c));
  }
  return m;
}

FootModel read_foot_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::format, "cannot open foot model " + path.string());
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> std::string {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return line;
    }
    throw Error(Errc::format, path.string() + ": unexpected end of file after line " + std::to_string(line_no));
  };
  auto read_point = [&]() {
    std::istringstream ss(next_line());
    double x, y, z;
    if (!(ss >> x >> y >> z)) throw Error(Errc::format, path.string() + ": bad point on line " + std::to_string(line_no));
    return Vec3(x, y, z);
  };

  if (next_line() != "footmodel v1") throw Error(Errc::format, path.string() + ": missing 'footmodel v1' header");
  std::istringstream counts(next_line());
  int nk = 0, nc = 0;
  if (!(counts >> nk >> nc) || nk != kNumKeypoints || nc < 1) {
    throw Error(Errc::format, path.string() + ": expected '8 <cloud count>' on line " + std::to_string(line_no));
  }
  FootModel m;
  for (auto& k : m.keypoints3d) k = read_point();
  for (int i = 0; i < nc; ++i) m.cloud.points.push_back(read_point());

  m.scale_length = 0.0;
  double xmin = 1e300, xmax = -1e300;
  for (const Vec3& p : m.cloud.points) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
  }
  m.scale_length = xmax - xmin;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    int n = 0;
    if (!(ss >> tag)) continue;
    if (tag != "opening" || !(ss >> n) || n < 3) {
      throw Error(Errc::format, path.string() + ": unexpected content on line " + std::to_string(line_no));
    }
    for (int i = 0; i < n; ++i) m.opening.push_back(read_point());
  }
  m.validate();
  return m;
}

void write_foot_model(const std::filesystem::path& path, const FootModel& model) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::format, "cannot write foot model " + path.string());
  out.precision(17);
  out << "footmodel v1\n" << kNumKeypoints << ' ' << model.cloud.points.size() << '\n';
  auto put = [&](const Vec3& p) { out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n'; };
  for (const Vec3& p : model.keypoints3d) put(p);
  for (const Vec3& p : model.cloud.points) put(p);
  if (!model.opening.empty()) {
    out << "opening " << model.opening.size() << '\n';
    for (const Vec3& p : model.opening) put(p);
  }
}

}  // namespace arshoe
