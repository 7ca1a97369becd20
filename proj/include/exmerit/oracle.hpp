#pragma once

#include <Eigen/Core>

#include <functional>
#include <stdexcept>
#include <vector>

#include "exmerit/ext_real.hpp"

namespace exmerit {

using Evaluator = std::function<ExtReal(const Eigen::VectorXd&)>;

/// Axis-aligned box given by per-coordinate intervals.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Eigen::Index dims() const { return lo.size(); }

  static Box cube(Eigen::Index dims, double radius) {
    Box b;
    b.lo = Eigen::VectorXd::Constant(dims, -radius);
    b.hi = Eigen::VectorXd::Constant(dims, radius);
    return b;
  }

  static Box around(const Eigen::VectorXd& center, double halfwidth) {
    Box b;
    b.lo = center.array() - halfwidth;
    b.hi = center.array() + halfwidth;
    return b;
  }
};

struct GridResult {
  Eigen::VectorXd argmin;
  ExtReal value;
};

/// Exhaustive minimization over a regular grid with `resolution` points per
/// axis (box endpoints included). Ties keep the earlier point in lexicographic
/// grid-index order, so the result is deterministic. Budget guard: at most
/// 1e7 grid points.
inline GridResult grid_min(const Evaluator& evaluate, const Box& box,
                           int resolution) {
  const Eigen::Index dims = box.dims();
  if (dims < 1 || box.hi.size() != dims) {
    throw std::invalid_argument("grid_min: malformed box");
  }
  if (resolution < 1) {
    throw std::invalid_argument("grid_min: resolution must be >= 1");
  }
  double budget = 1.0;
  for (Eigen::Index i = 0; i < dims; ++i) {
    budget *= resolution;
    if (budget > 1e7) {
      throw std::invalid_argument("grid_min: grid exceeds the 1e7 budget");
    }
  }

  std::vector<int> index(static_cast<std::size_t>(dims), 0);
  Eigen::VectorXd point(dims);
  const auto coordinate = [&box, resolution](Eigen::Index axis, int idx) {
    if (resolution == 1) return box.lo(axis);
    return box.lo(axis) + (box.hi(axis) - box.lo(axis)) * idx / (resolution - 1);
  };

  GridResult best;
  bool first = true;
  while (true) {
    for (Eigen::Index i = 0; i < dims; ++i) {
      point(i) = coordinate(i, index[static_cast<std::size_t>(i)]);
    }
    const ExtReal value = evaluate(point);
    if (first || value < best.value) {
      best.argmin = point;
      best.value = value;
      first = false;
    }
    // Odometer, last axis fastest (lexicographic order of the index tuple).
    Eigen::Index axis = dims - 1;
    while (axis >= 0 && ++index[static_cast<std::size_t>(axis)] == resolution) {
      index[static_cast<std::size_t>(axis)] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return best;
}

struct RefineResult {
  Eigen::VectorXd argmin;
  ExtReal value;
  /// True when no finite value was observed anywhere (seed returned as is).
  bool vacuous = false;
};

/// Iterated local grid refinement around a seed point: each round lays a grid
/// of halfwidth shrinking by `shrink` around the current best point. Values
/// are monotone nonincreasing across rounds.
inline RefineResult refine_min(const Evaluator& evaluate,
                               const Eigen::VectorXd& seed, double shrink,
                               int rounds, double initial_halfwidth = 0.5,
                               int resolution = 11) {
  if (rounds < 1) {
    throw std::invalid_argument("refine_min: rounds must be >= 1");
  }
  if (!(shrink > 0.0 && shrink < 1.0)) {
    throw std::invalid_argument("refine_min: shrink must lie in (0, 1)");
  }
  RefineResult best;
  best.argmin = seed;
  best.value = evaluate(seed);

  double halfwidth = initial_halfwidth;
  for (int round = 0; round < rounds; ++round) {
    const GridResult local =
        grid_min(evaluate, Box::around(best.argmin, halfwidth), resolution);
    if (local.value < best.value) {
      best.argmin = local.argmin;
      best.value = local.value;
    }
    halfwidth *= shrink;
  }
  best.vacuous = !best.value.is_finite();
  return best;
}

}  // namespace exmerit
