// Level-set extraction on discretized manifolds: marching squares with
// periodic wrap on the torus, per-triangle crossings on a latitude-longitude
// sphere grid. The measured lengths are the Monte Carlo ground truth the
// closed-form predictions are validated against.
#pragma once

#include "core/field.hpp"

namespace ncx::nodal {

struct NodalGrid {
  geo::ManifoldModel model;
  int resolution = 0;
  std::vector<geo::ChartPoint> vertices;
  std::vector<Eigen::Vector3d> embedded;  // sphere only
  int rows = 0, cols = 0;                 // vertex lattice; cols wrap on both manifolds

  int vidx(int i, int j) const { return i * cols + (j % cols + cols) % cols; }
};

NodalGrid build_grid(const geo::ManifoldModel& model, int resolution);

struct NodalResult {
  double length = 0;
  double level = 0;
  int resolution = 0;
  uint64_t seed = 0;
  int degenerate_vertices = 0;
};

// Caches the mode tables on the grid vertices; extraction per sample is one
// matrix-vector product plus the cell walk.
class NodalExtractor {
public:
  NodalExtractor(const field::SpectralFieldSpec& spec, NodalGrid grid);

  const NodalGrid& grid() const { return grid_; }
  NodalResult extract(const field::FieldSample& sample, double level) const;

private:
  field::SpectralFieldSpec spec_;
  NodalGrid grid_;
  field::FieldEvaluator evaluator_;
};

// One-shot convenience wrapper.
NodalResult nodal_length(const field::SpectralFieldSpec& spec, const field::FieldSample& sample,
                         const NodalGrid& grid, double level);

}  // namespace ncx::nodal
