// Per-sample chaos components of the nodal measure: the general nested
// quadrature, its frequency-endomorphism variants, the homothetic surrogate,
// closed forms for the second and fourth components, chi partial sums and
// level factors.
#pragma once

#include <string>

#include "core/field.hpp"

namespace ncx::chaos {

enum class Form { general, lambda_form, inverse_form, tilde, closed2, closed4 };

std::string to_string(Form f);
Form form_from_string(const std::string& s);

struct ChaosStatistic {
  int q = 0;
  double value = 0;
  Form form = Form::general;
  int resolution = 0;
  int K = 0;
  double level = 0;
};

// Precomputed per-(spec, resolution, K) state: quadrature nodes, metric data,
// fiber directions and mode tables, so that per-sample evaluation reduces to
// matrix-vector products plus the fiber sums.
class ChaosContext {
public:
  ChaosContext(const field::SpectralFieldSpec& spec, int resolution, int K);

  const field::SpectralFieldSpec& spec() const { return spec_; }
  int resolution() const { return resolution_; }
  int fiber_size() const { return K_; }
  const field::GlobalParams& params() const { return params_; }

  // q-th chaos component; q even, q <= 12. q = 0 gives the deterministic
  // expectation term. Level t rescales each (a,b) term by
  // exp(-t^2/2) H_{2a}(t)/H_{2a}(0).
  ChaosStatistic chaos_q(const field::FieldSample& s, int q, Form form, double level = 0) const;

  // Homothetic surrogate built from the global sigma and lambda.
  ChaosStatistic tilde_q(const field::FieldSample& s, int q) const;

  // Second component closed form: L2-norm difference of the field and its
  // rescaled gradient. Requires a closed homothetic spec.
  ChaosStatistic closed2(const field::FieldSample& s) const;
  // Same value from the coefficient vector alone (exact spectral route).
  double closed2_spectral(const field::FieldSample& s) const;

  // Fourth component, Hermite representation with the exact fiber average.
  ChaosStatistic closed4(const field::FieldSample& s) const;

private:
  struct NodeData {
    double weight = 0;
    field::MetricData metric;
    std::vector<Eigen::Vector2d> dirs;
    double fiber_weight = 0;
    std::vector<double> u_gf;         // |u|_{g^f} per direction
    std::vector<double> inv_density;  // |Lam^{-1}v|^{-(n+1)} / det(Lam)
  };

  double homothetic_lambda_or_throw(const char* who) const;

  field::SpectralFieldSpec spec_;
  int resolution_ = 0;
  int K_ = 0;
  double sigma2_spectral_ = 0;
  double lambda2_spectral_ = 0;
  field::GlobalParams params_;
  std::vector<geo::ChartPoint> points_;
  std::vector<NodeData> nodes_;
  field::FieldEvaluator evaluator_;
};

// Partial chaos sum of the norm of a Gaussian vector xi ~ N(0, G):
// sum_{q <= Q even} A(n,q) \int_{S^{n-1}} H_q(<xi,v>/sqrt(v^T G v))
// sqrt(v^T G v) dv by fiber quadrature (n = 1 uses the two-point sphere).
double chi_partial(const Eigen::VectorXd& xi, const Eigen::MatrixXd& G, int Q, int K);

// exp(-t^2/2) H_{2a}(t) / H_{2a}(0): converts a level-0 bi-chaotic term to
// level t.
double level_factor(double t, int a);

}  // namespace ncx::chaos
