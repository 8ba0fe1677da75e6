// Spectral Gaussian field models: random spherical harmonics, arithmetic
// random waves, band and anisotropic torus fields. Sampling, analytic jet
// evaluation, first-jet covariances, the gradient-covariance metric and its
// square root, and the global parameters (sigma, lambda, eps).
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "core/geometry.hpp"
#include "vendor_json.hpp"

namespace ncx::field {

struct Mode {
  // Sphere: {ell, m, 0}. Torus: {trig (0 = cos, 1 = sin), k1, k2}.
  std::array<int, 3> id{0, 0, 0};
  double eigenvalue = 0;  // Laplace eigenvalue lambda_i^2
  double std = 0;
};

struct SpectralFieldSpec {
  geo::ManifoldModel manifold;
  std::vector<Mode> modes;
  bool unit_variance = false;

  int n_modes() const { return static_cast<int>(modes.size()); }
};

// Gaussian spherical harmonics of degree ell: 2*ell+1 orthonormal modes,
// scaled so the covariance is the Legendre polynomial of the angle.
SpectralFieldSpec make_rsh(int ell);

// Arithmetic random wave with lattice set {k : |k|^2 = m}; throws if m is
// not a sum of two squares.
SpectralFieldSpec make_arw(int m);

// Riemannian random wave over a list of eigenspaces: sphere degrees or
// torus lattice norms. Raw normalization (unit std per orthonormal mode).
SpectralFieldSpec make_band_sphere(const std::vector<int>& ells);
SpectralFieldSpec make_band_torus(const std::vector<int>& ms);

// Stationary torus field with per-frequency stds; unit variance enforced.
// Throws if the frequency set does not span R^2.
SpectralFieldSpec make_anisotropic(const std::vector<std::pair<Eigen::Vector2i, double>>& freqs);

// Rescales stds to pointwise unit variance. Requires constant pointwise
// variance (checked on a probe grid).
SpectralFieldSpec normalized(const SpectralFieldSpec& spec);

// Lattice points with |k|^2 = m.
std::vector<Eigen::Vector2i> lattice_points(int m);

bool is_stationary(const SpectralFieldSpec& spec);
// Sphere specs built from whole eigenspaces with equal stds.
bool is_isotropic(const SpectralFieldSpec& spec);

// sum c_i^2 lambda_i^2 / sum c_i^2: the average frequency squared for
// orthonormal-mode specs (equals the quadrature definition).
double lambda2_spectral(const SpectralFieldSpec& spec);

struct FieldSample {
  uint64_t seed = 0;
  std::vector<double> coeffs;  // std_i * gamma_i
};

// Deterministic: coefficient i depends only on (seed, i).
FieldSample sample_field(const SpectralFieldSpec& spec, uint64_t seed);

struct Jet1 {
  double value = 0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
};

// Mode value and frame gradient at a chart point.
void eval_mode(const SpectralFieldSpec& spec, int mode_index, const geo::ChartPoint& x,
               double& value, Eigen::Vector2d& grad);

Jet1 eval_jet(const SpectralFieldSpec& spec, const FieldSample& sample, const geo::ChartPoint& x);

// Exact spectral Laplacian: -sum a_i lambda_i^2 phi_i(x).
double eval_laplacian(const SpectralFieldSpec& spec, const FieldSample& sample,
                      const geo::ChartPoint& x);

struct JetCovariance {
  double c = 0;                                        // C(x,y)
  Eigen::Vector2d cpx = Eigen::Vector2d::Zero();       // C'_{y,x}: x-gradient, frame at x
  Eigen::Vector2d cpy = Eigen::Vector2d::Zero();       // C'_{x,y}: y-gradient, frame at y
  Eigen::Matrix2d cpp = Eigen::Matrix2d::Zero();       // C''_{x,y} in the frame pair
};

JetCovariance cov_jet(const SpectralFieldSpec& spec, const geo::ChartPoint& x,
                      const geo::ChartPoint& y);

struct MetricData {
  Eigen::Matrix2d gf;        // gradient covariance at x (frame coordinates)
  Eigen::Matrix2d gf_isqrt;  // gf^{-1/2}
  Eigen::Matrix2d lam;       // Lambda = sqrt(n gf)
  Eigen::Matrix2d lam_inv;
  double det_lam = 0;
  double lambda_x = 0;       // pointwise frequency sqrt(tr gf)
};

// Throws errc::domain when the gradient covariance is not positive definite
// (degenerate differential: the unit-variance / non-degeneracy assumption on
// the field fails at x).
MetricData metric_data(const SpectralFieldSpec& spec, const geo::ChartPoint& x);

struct GlobalParams {
  double sigma = 0;
  double lambda = 0;
  double eps = 0;
};

// sigma^2 and lambda^2 as quadrature means; eps as the sum of the three
// distortion maxima, maximized over quadrature nodes with the direction
// extremes resolved exactly through the metric eigenvalues.
GlobalParams global_params(const SpectralFieldSpec& spec, int resolution, int K);

// Norm of the first-jet covariance adapted to the field: max of |C| and the
// gf-normalized gradient blocks; <= 1 for unit-variance specs.
double jet_norm(const JetCovariance& jc, const MetricData& mx, const MetricData& my);

nlohmann::json spec_to_json(const SpectralFieldSpec& spec);
SpectralFieldSpec spec_from_json(const nlohmann::json& j);

// Cached mode tables over a fixed node set; evaluation per sample is a
// matrix-vector product. values_only skips the gradient and Laplacian
// tables (large grids that never need jets).
class FieldEvaluator {
public:
  FieldEvaluator(const SpectralFieldSpec& spec, const std::vector<geo::ChartPoint>& points,
                 bool values_only = false);

  int n_points() const { return static_cast<int>(val_.rows()); }
  void values(const FieldSample& s, Eigen::VectorXd& out) const;
  void jets(const FieldSample& s, Eigen::VectorXd& f, Eigen::VectorXd& g1,
            Eigen::VectorXd& g2) const;
  // Exact spectral Laplacian at the node set.
  void laplacians(const FieldSample& s, Eigen::VectorXd& out) const;

private:
  Eigen::MatrixXd val_, g1_, g2_, lap_;
};

}  // namespace ncx::field
