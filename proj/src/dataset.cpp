#include "forkhull/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace forkhull {

namespace {

constexpr double kCoordLimit = 33554432.0;  // 2^25
constexpr std::int64_t kR = 1 << 24;

double clamp_int(double v) {
  double r = std::nearbyint(v);
  if (r > kCoordLimit) r = kCoordLimit;
  if (r < -kCoordLimit) r = -kCoordLimit;
  return r;
}

}  // namespace

bool parse_dataset_kind(const std::string& name, DatasetKind& out) {
  if (name == "uniform_disk") out = DatasetKind::uniform_disk;
  else if (name == "on_circle") out = DatasetKind::on_circle;
  else if (name == "parabola") out = DatasetKind::parabola;
  else if (name == "collinear") out = DatasetKind::collinear;
  else if (name == "clustered") out = DatasetKind::clustered;
  else if (name == "presorted_uniform") out = DatasetKind::presorted_uniform;
  else return false;
  return true;
}

std::string dataset_kind_name(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::uniform_disk: return "uniform_disk";
    case DatasetKind::on_circle: return "on_circle";
    case DatasetKind::parabola: return "parabola";
    case DatasetKind::collinear: return "collinear";
    case DatasetKind::clustered: return "clustered";
    case DatasetKind::presorted_uniform: return "presorted_uniform";
  }
  return "?";
}

std::vector<Point2> generate(const DatasetSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("n must be >= 1");
  SplitMix64 rng(spec.seed * 0x9E3779B97F4A7C15ULL + spec.n +
                 static_cast<std::uint64_t>(spec.kind) * 0x1000193ULL);
  std::vector<Point2> pts;
  pts.reserve(spec.n);
  switch (spec.kind) {
    case DatasetKind::uniform_disk: {
      while (pts.size() < spec.n) {
        double x = static_cast<double>(rng.range(-kR, kR));
        double y = static_cast<double>(rng.range(-kR, kR));
        if (x * x + y * y <= double(kR) * double(kR)) pts.push_back({x, y});
      }
      break;
    }
    case DatasetKind::on_circle: {
      const double radius = 33554400.0;
      for (std::size_t i = 0; i < spec.n; ++i) {
        double theta = 2.0 * std::numbers::pi *
                       (static_cast<double>(i) + 0.25 + 0.5 * rng.unit()) /
                       static_cast<double>(spec.n);
        pts.push_back({clamp_int(radius * std::cos(theta)),
                       clamp_int(radius * std::sin(theta))});
      }
      break;
    }
    case DatasetKind::parabola: {
      const std::int64_t spread = 5792;  // spread^2 < 2^25
      for (std::size_t i = 0; i < spec.n; ++i) {
        std::int64_t x =
            static_cast<std::int64_t>(i % (2 * spread + 1)) - spread;
        pts.push_back({static_cast<double>(x), static_cast<double>(-x * x)});
      }
      break;
    }
    case DatasetKind::collinear: {
      std::int64_t b = rng.range(-1024, 1024);
      for (std::size_t i = 0; i < spec.n; ++i) {
        std::int64_t x = rng.range(-kR, kR);
        pts.push_back({static_cast<double>(x), static_cast<double>(x + b)});
      }
      break;
    }
    case DatasetKind::clustered: {
      std::size_t k = std::max<std::size_t>(1, spec.n / 64);
      std::vector<Point2> centers(k);
      for (auto& c : centers)
        c = {static_cast<double>(rng.range(-kR / 2, kR / 2)),
             static_cast<double>(rng.range(-kR / 2, kR / 2))};
      for (std::size_t i = 0; i < spec.n; ++i) {
        const Point2& c = centers[rng.next() % k];
        pts.push_back({c.x + static_cast<double>(rng.range(-1024, 1024)),
                       c.y + static_cast<double>(rng.range(-1024, 1024))});
      }
      break;
    }
    case DatasetKind::presorted_uniform: {
      for (std::size_t i = 0; i < spec.n; ++i)
        pts.push_back({static_cast<double>(rng.range(-kR, kR)),
                       static_cast<double>(rng.range(-kR, kR))});
      std::sort(pts.begin(), pts.end());
      break;
    }
  }
  return pts;
}

void write_points(const std::string& path, const std::vector<Point2>& points) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "# " << points.size() << " points\n";
  for (const Point2& p : points) {
    std::ostringstream line;
    line.precision(17);
    line << p.x << ' ' << p.y << '\n';
    out << line.str();
  }
}

std::vector<Point2> read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Point2> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Point2 p;
    if (!(ss >> p.x >> p.y)) throw std::runtime_error("bad point line: " + line);
    pts.push_back(p);
  }
  return pts;
}

}  // namespace forkhull
