#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forkhull/geom.hpp"

namespace forkhull {

// splitmix64; constants from the reference stream.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  // uniform in [lo, hi] inclusive
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double unit() { return (next() >> 11) * 0x1.0p-53; }
};

enum class DatasetKind {
  uniform_disk,
  on_circle,
  parabola,
  collinear,
  clustered,
  presorted_uniform,
};

struct DatasetSpec {
  DatasetKind kind = DatasetKind::uniform_disk;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

bool parse_dataset_kind(const std::string& name, DatasetKind& out);
std::string dataset_kind_name(DatasetKind kind);

// Deterministic integer-valued points, |x|,|y| <= 2^25. presorted_uniform is
// sorted by (x, y); other kinds are emitted unsorted.
std::vector<Point2> generate(const DatasetSpec& spec);

// Point file format: one "x y" per line, '#' starts a comment line.
void write_points(const std::string& path, const std::vector<Point2>& points);
std::vector<Point2> read_points(const std::string& path);

}  // namespace forkhull
