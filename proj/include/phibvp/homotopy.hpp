#pragma once

#include "phibvp/types.hpp"

#include <functional>
#include <utility>

namespace phibvp {

// ---------------------------------------------------------------------------
// The deformation F(t, x, y; lambda) of the target field, with F(.,.,.;1) the
// problem of interest and F(.,.,.;0) an autonomous field whose algebraic part
// carries the degree condition. `y` is the velocity slot x'.
// ---------------------------------------------------------------------------
struct HomotopyFamily {
  enum class Style {
    ConvexCombination,    // F = lambda f + (1 - lambda) f0
    ScalarMultiplication  // F = lambda F1
  };

  using FieldFn = std::function<Vec(double t, const Vec& x, const Vec& y, double lambda)>;

  int n = 0;
  double T = 1.0;
  Style style = Style::ConvexCombination;
  FieldFn F;

  Vec eval(double t, const Vec& x, const Vec& y, double lambda) const {
    return F(t, x, y, lambda);
  }

  /// The autonomous field at lambda = 0 (identically zero for the
  /// scalar-multiplication style).
  Vec f0(const Vec& x, const Vec& y) const { return F(0.0, x, y, 0.0); }

  static HomotopyFamily convex(int n, double T,
                               std::function<Vec(double, const Vec&, const Vec&)> target,
                               std::function<Vec(const Vec&, const Vec&)> autonomous) {
    HomotopyFamily fam;
    fam.n = n;
    fam.T = T;
    fam.style = Style::ConvexCombination;
    fam.F = [target = std::move(target), autonomous = std::move(autonomous)](
                double t, const Vec& x, const Vec& y, double lambda) -> Vec {
      return lambda * target(t, x, y) + (1.0 - lambda) * autonomous(x, y);
    };
    return fam;
  }

  static HomotopyFamily scalar(int n, double T,
                               std::function<Vec(double, const Vec&, const Vec&)> F1) {
    HomotopyFamily fam;
    fam.n = n;
    fam.T = T;
    fam.style = Style::ScalarMultiplication;
    fam.F = [F1 = std::move(F1)](double t, const Vec& x, const Vec& y,
                                 double lambda) -> Vec { return lambda * F1(t, x, y); };
    return fam;
  }
};

}  // namespace phibvp
