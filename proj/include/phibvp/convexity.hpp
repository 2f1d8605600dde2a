#pragma once

#include "phibvp/bounding.hpp"
#include "phibvp/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace phibvp {

// Empirical two-route convexity testing for sublevel sets D = [V <= c]:
// the tangential-Hessian route (condition (C) at sampled boundary points)
// against an independent chord oracle, plus a sampled connectedness probe.
// A nonconvex verdict is conclusive (certified by evaluation at the witness);
// a convex verdict is sample-scoped.

enum class ConvexityStatus { ConvexAtSamples, Nonconvex, Inconclusive };

const char* to_string(ConvexityStatus s);

struct ConvexityVerdict {
  ConvexityStatus status = ConvexityStatus::Inconclusive;
  std::optional<Vec> witness;        // boundary point or chord midpoint
  double min_tangent_eig = 0.0;      // condition-(C) route only
  bool precondition_ok = true;       // cond-V' held at the sampled boundary
  std::string note;
};

/// Condition-(C) route: checks the projected Hessian at every sampled
/// boundary point. Reports precondition failure (lemma inapplicable) when
/// V' vanishes on the sampled level set.
ConvexityVerdict convexity_via_condition_C(const BoundingFn& V, const Vec& P0, int n_dirs,
                                           double tol, double root_tol = 1e-10);

struct ChordOracleOptions {
  int n_pairs = 2000;
  int chord_points = 9;
  double oracle_tol = 1e-9;
  std::uint64_t seed = 0x0bacULL;
  int max_attempts_factor = 10000;  // rejection budget per accepted point
  // sampling box; derived from the star-sampled boundary when absent (which
  // only sees the component of P0)
  std::optional<std::pair<Vec, Vec>> box;
};

/// Brute-force route: random pairs in D, chord points checked against
/// V <= c + oracle_tol. Rejection sampling over a bounding box derived from
/// the sampled boundary; throws SamplingError when the acceptance rate decays
/// below 1e-4.
ConvexityVerdict convexity_oracle(const BoundingFn& V, const Vec& P0,
                                  const ChordOracleOptions& opt);

enum class Connectedness { ConnectedAtSamples, Disconnected, Inconclusive };

struct ConnectednessResult {
  Connectedness status = Connectedness::Inconclusive;
  int components = 0;
  int samples_used = 0;
};

/// Graph probe: joins sampled points of D whose segment stays in D; returns
/// the component count. Disconnection is certified (segment exits are
/// evaluated); connection is not.
ConnectednessResult connectedness_probe(const BoundingFn& V, const Vec& P0, int n_points,
                                        int segment_checks,
                                        std::uint64_t seed = 0x0bacULL,
                                        std::optional<std::pair<Vec, Vec>> box = {});

// ---------------------------------------------------------------------------
// Implicit-graph curvature at a boundary point u0: with w = V'(u0)/||V'(u0)||
// and a tangent direction v, the level set is locally the graph
// alpha = theta(beta) in V(u0 + alpha w + beta v) = c, and differentiating
// twice along the chart gives
//   theta''(beta) = - <V''(u) y, y> / <V'(u), w>,   y = theta'(beta) w + v.
// Each chart point carries the finite-difference second derivative alongside
// the formula value; points where the root solve fails are marked out of
// chart.
// ---------------------------------------------------------------------------
struct ChartPoint {
  double beta = 0.0;
  bool in_chart = false;
  double theta = 0.0;
  double theta2_fd = 0.0;
  double theta2_formula = 0.0;
};

std::vector<ChartPoint> implicit_graph_curvature(const BoundingFn& V, const Vec& u0,
                                                 const Vec& v,
                                                 const std::vector<double>& beta_grid,
                                                 double fd_step);

/// Adaptive chart radius: halves beta_max until the symmetric grid of `count`
/// points solves everywhere, and returns that grid. The implicit-function
/// neighborhood is not constructive, so it is discovered by shrinking.
std::vector<double> adaptive_chart_grid(const BoundingFn& V, const Vec& u0, const Vec& v,
                                        double beta_max, int count,
                                        double fd_step = 1e-4, int max_halvings = 40);

}  // namespace phibvp
