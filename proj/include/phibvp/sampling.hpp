#pragma once

#include "phibvp/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace phibvp {

/// count values spaced evenly on [a, b], endpoints included.
std::vector<double> linspace(double a, double b, int count);

/// count values spaced geometrically on [a, b]; requires a, b > 0.
std::vector<double> geomspace(double a, double b, int count);

/// Quasi-uniform unit directions in R^n. n=1 gives {+1,-1}; n=2 equally
/// spaced angles starting at e_1; n=3 a Fibonacci sphere; higher dimensions
/// fall back to seeded normalized Gaussians (deterministic for a fixed seed).
std::vector<Vec> unit_directions(int n, int count, std::uint64_t seed = 0x5eed5eedULL);

/// Directions plus their negations, deduplicated for n=1.
std::vector<Vec> signed_directions(int n, int count, std::uint64_t seed = 0x5eed5eedULL);

inline Vec normalized(const Vec& v) { return v / v.norm(); }

/// Deterministic point cloud in an axis-aligned box.
std::vector<Vec> uniform_points_in_box(const Vec& lo, const Vec& hi, int count,
                                       std::uint64_t seed);

}  // namespace phibvp
