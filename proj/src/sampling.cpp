#include "qklab/sampling.hpp"

#include "qklab/special_geometry.hpp"

namespace qklab::sampling {

namespace {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

}  // namespace

std::vector<double> cask_chart(const CubicModel& model, Rng& rng) {
  std::vector<double> u{uniform(rng, 0.5, 2.0), uniform(rng, -sg::kPi, sg::kPi)};
  for (int a = 0; a < model.m; ++a) u.push_back(uniform(rng, -1.0, 1.0));
  for (int a = 0; a < model.m; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    u.push_back(uniform(rng, model.t_lo[ua], model.t_hi[ua]));
  }
  return u;
}

std::vector<double> fiber(int n, Rng& rng) {
  std::vector<double> p;
  for (int i = 0; i < 2 * n; ++i) p.push_back(uniform(rng, -1.0, 1.0));
  return p;
}

std::vector<double> n_chart(const CubicModel& model, Rng& rng) {
  std::vector<double> v = cask_chart(model, rng);
  std::vector<double> p = fiber(model.n(), rng);
  v.insert(v.end(), p.begin(), p.end());
  return v;
}

double kahler_potential(const CubicModel& model, std::span<const double> u) {
  return sg::cask_state<double>(model, u).f;
}

std::vector<double> p_chart(const CubicModel& model, Rng& rng, double c, int max_tries) {
  for (int k = 0; k < max_tries; ++k) {
    std::vector<double> v = n_chart(model, rng);
    v.push_back(uniform(rng, 0.0, 2.0 * sg::kPi));
    const double f = kahler_potential(model, std::span<const double>(v).subspan(0, static_cast<std::size_t>(2 * model.n())));
    if (-f - 0.5 * c > 0.0) return v;
  }
  throw Error(ErrorKind::OutsideOneLoopDomain, "no point with f_Z > 0 found in the sampling box");
}

std::vector<double> qk_chart(const CubicModel& model, Rng& rng, double c, int max_tries) {
  std::vector<double> v = p_chart(model, rng, c, max_tries);
  v.erase(v.begin() + 1);
  return v;
}

}  // namespace qklab::sampling
