#include "core/nodal.hpp"

#include <algorithm>
#include <cmath>

namespace ncx::nodal {

NodalGrid build_grid(const geo::ManifoldModel& model, int resolution) {
  if (resolution < 4) throw Error(errc::invalid_argument, "build_grid: resolution >= 4 required");
  NodalGrid g;
  g.model = model;
  g.resolution = resolution;
  if (model.kind == geo::ManifoldKind::Torus2) {
    g.rows = resolution;
    g.cols = resolution;
    g.vertices.reserve(static_cast<std::size_t>(g.rows) * g.cols);
    const double h = 1.0 / resolution;
    for (int i = 0; i < g.rows; ++i)
      for (int j = 0; j < g.cols; ++j) g.vertices.push_back({i * h, j * h});
  } else {
    g.rows = resolution + 1;
    g.cols = resolution;
    g.vertices.reserve(static_cast<std::size_t>(g.rows) * g.cols);
    g.embedded.reserve(g.vertices.capacity());
    for (int i = 0; i < g.rows; ++i) {
      // Clamp the polar rows just inside the excluded caps.
      const double colat =
          std::clamp(kPi * i / resolution, geo::kPoleEps, kPi - geo::kPoleEps);
      for (int j = 0; j < g.cols; ++j) {
        const geo::ChartPoint p{colat, 2.0 * kPi * j / resolution};
        g.vertices.push_back(p);
        g.embedded.push_back(geo::sphere_embed(p));
      }
    }
  }
  return g;
}

NodalExtractor::NodalExtractor(const field::SpectralFieldSpec& spec, NodalGrid grid)
    : spec_(spec), grid_(std::move(grid)), evaluator_(spec, grid_.vertices, /*values_only=*/true) {}

namespace {

// Interpolated crossing parameter of level t on the edge (fa, fb).
inline double cross_at(double fa, double fb, double t) { return (t - fa) / (fb - fa); }

struct SegmentAccum {
  double total = 0;
  void add(double x0, double y0, double x1, double y1, double scale) {
    total += scale * std::hypot(x1 - x0, y1 - y0);
  }
};

}  // namespace

NodalResult NodalExtractor::extract(const field::FieldSample& sample, double level) const {
  Eigen::VectorXd f;
  evaluator_.values(sample, f);

  NodalResult res;
  res.level = level;
  res.resolution = grid_.resolution;
  res.seed = sample.seed;

  // Exact vertex hits are measure-zero; nudge them off deterministically.
  const double scale = 1e-12 * std::max(1.0, f.cwiseAbs().maxCoeff());
  for (int i = 0; i < f.size(); ++i)
    if (f[i] == level) {
      f[i] += scale;
      ++res.degenerate_vertices;
    }

  const int n = grid_.resolution;
  if (grid_.model.kind == geo::ManifoldKind::Torus2) {
    const double h = 1.0 / n;
    SegmentAccum acc;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double f00 = f[grid_.vidx(i, j)];
        const double f10 = f[grid_.vidx((i + 1) % n, j)];
        const double f01 = f[grid_.vidx(i, j + 1)];
        const double f11 = f[grid_.vidx((i + 1) % n, j + 1)];
        const int code = (f00 > level ? 1 : 0) | (f10 > level ? 2 : 0) | (f11 > level ? 4 : 0) |
                         (f01 > level ? 8 : 0);
        if (code == 0 || code == 15) continue;
        // Edge crossings in cell-local coordinates (xi along i, eta along j).
        const double xb = cross_at(f00, f10, level);  // bottom: eta = 0
        const double xt = cross_at(f01, f11, level);  // top:    eta = 1
        const double yl = cross_at(f00, f01, level);  // left:   xi = 0
        const double yr = cross_at(f10, f11, level);  // right:  xi = 1
        switch (code) {
          case 1: case 14: acc.add(0, yl, xb, 0, h); break;
          case 2: case 13: acc.add(xb, 0, 1, yr, h); break;
          case 4: case 11: acc.add(1, yr, xt, 1, h); break;
          case 8: case 7:  acc.add(xt, 1, 0, yl, h); break;
          case 3: case 12: acc.add(0, yl, 1, yr, h); break;
          case 6: case 9:  acc.add(xb, 0, xt, 1, h); break;
          case 5: case 10: {
            // Saddle: connect according to the sign at the cell center.
            const geo::ChartPoint center{(i + 0.5) * h, (j + 0.5) * h};
            double fc = eval_jet(spec_, sample, center).value;
            if (fc == level) {
              fc += scale;
              ++res.degenerate_vertices;
            }
            const bool center_above = fc > level;
            const bool diag00 = code == 5;  // f00 and f11 above
            if (center_above == diag00) {
              // Contour hugs the below-level corners 10 and 01.
              acc.add(xb, 0, 1, yr, h);
              acc.add(xt, 1, 0, yl, h);
            } else {
              acc.add(0, yl, xb, 0, h);
              acc.add(1, yr, xt, 1, h);
            }
            break;
          }
          default: break;
        }
      }
    }
    res.length = acc.total;
    return res;
  }

  // Sphere: split each lat-lon quad along a fixed diagonal; a triangle with
  // mixed signs carries exactly one chordal segment.
  double total = 0;
  const auto& P = grid_.embedded;
  const auto tri_segment = [&](int a, int b, int c) {
    const double fa = f[a], fb = f[b], fc = f[c];
    const bool sa = fa > level, sb = fb > level, sc = fc > level;
    if (sa == sb && sb == sc) return;
    int odd, e0, e1;  // odd vertex against the other two
    if (sa != sb && sa != sc) {
      odd = a; e0 = b; e1 = c;
    } else if (sb != sa && sb != sc) {
      odd = b; e0 = a; e1 = c;
    } else {
      odd = c; e0 = a; e1 = b;
    }
    const double s0 = cross_at(f[odd], f[e0], level);
    const double s1 = cross_at(f[odd], f[e1], level);
    const Eigen::Vector3d p0 = P[odd] + s0 * (P[e0] - P[odd]);
    const Eigen::Vector3d p1 = P[odd] + s1 * (P[e1] - P[odd]);
    total += (p1 - p0).norm();
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int v00 = grid_.vidx(i, j);
      const int v10 = grid_.vidx(i + 1, j);
      const int v01 = grid_.vidx(i, j + 1);
      const int v11 = grid_.vidx(i + 1, j + 1);
      tri_segment(v00, v10, v11);
      tri_segment(v00, v11, v01);
    }
  }
  res.length = total;
  return res;
}

NodalResult nodal_length(const field::SpectralFieldSpec& spec, const field::FieldSample& sample,
                         const NodalGrid& grid, double level) {
  return NodalExtractor(spec, grid).extract(sample, level);
}

}  // namespace ncx::nodal
