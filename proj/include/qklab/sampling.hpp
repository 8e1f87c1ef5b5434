#pragma once

// Seeded random points in the chart boxes: r in [0.5, 2], phi in (-pi, pi),
// b in [-1, 1]^m, t in the model box, p in [-1, 1]^{2n}, s in [0, 2 pi).

#include <random>
#include <vector>

#include "qklab/model.hpp"

namespace qklab::sampling {

using Rng = std::mt19937_64;

std::vector<double> cask_chart(const CubicModel& model, Rng& rng);
std::vector<double> fiber(int n, Rng& rng);
/// (r, phi, b, t, p)
std::vector<double> n_chart(const CubicModel& model, Rng& rng);
/// (r, b, t, p, s) with f_Z^c > 0; throws OutsideOneLoopDomain after max_tries rejections.
std::vector<double> qk_chart(const CubicModel& model, Rng& rng, double c, int max_tries = 1000);
/// (r, phi, b, t, p, s) with f_Z^c > 0.
std::vector<double> p_chart(const CubicModel& model, Rng& rng, double c, int max_tries = 1000);

/// Kaehler potential f at a CASK chart point.
double kahler_potential(const CubicModel& model, std::span<const double> cask_chart);

}  // namespace qklab::sampling
