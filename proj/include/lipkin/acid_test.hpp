#pragma once

// The fit chain: crossing x_c from the merged spectrum, one-sided fits of the
// logarithmic model to a sector's scaled spectrum, and the comparison of the
// model derivative with the finite-difference slope of the data.

#include "lipkin/analysis/spectrum.hpp"
#include "lipkin/logfit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace lipkin {

struct AcidTestRow {
  double x_mid = 0.0;
  double fd_slope = 0.0;
  double fit_slope = 0.0;
  double rel_dev = 0.0;
};

struct AcidTest {
  SingularityFit fit;
  std::vector<AcidTestRow> rows;
  double max_rel_dev = 0.0;
};

struct AcidTestOptions {
  Selector data = Selector::even; // per-sector data: merged levels form doublet steps below x_c
  int n_terms = 3;
  FitWindow fit_window{};
  FitWindow compare_window{0.02, 0.1};
  FitOptions fit_options{};
};

/// (x, eps + 1) of the selected levels, whole spectrum.
inline std::vector<FitPoint> shifted_points(const Spectrum& s, Selector sel) {
  std::vector<FitPoint> pts;
  for (const auto& p : scaled_spectrum(s, sel, false).points) pts.push_back({p.x, p.eps + 1.0});
  return pts;
}

inline AcidTest acid_test(const Spectrum& s, double x_c, Side side, const AcidTestOptions& opt = {}) {
  const auto pts = shifted_points(s, opt.data);
  const auto window = window_points(pts, x_c, side, opt.fit_window, 2.0 / s.n_particles);
  AcidTest t;
  t.fit = fit_singularity(window, x_c, side, opt.n_terms, opt.fit_options);
  for (const auto& d : spectral_derivative(scaled_spectrum(s, opt.data, false))) {
    const double u = d.x_mid - x_c;
    if ((side == Side::left) != (u < 0)) continue;
    if (std::abs(u) < opt.compare_window.near || std::abs(u) > opt.compare_window.far) continue;
    const double model = fit_derivative(t.fit, d.x_mid);
    const double dev = std::abs(model - d.slope) / std::abs(d.slope);
    t.rows.push_back({d.x_mid, d.slope, model, dev});
    t.max_rel_dev = std::max(t.max_rel_dev, dev);
  }
  return t;
}

} // namespace lipkin
