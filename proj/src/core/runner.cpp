#include "core/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "core/chaos.hpp"
#include "core/nodal.hpp"
#include "core/specfun.hpp"
#include "core/variance.hpp"
#include "core/verify.hpp"

namespace ncx::runner {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------- config --

void check_keys(const json& cfg, const std::set<std::string>& allowed, const char* who) {
  if (!cfg.is_object()) throw Error(errc::parse, std::string(who) + ": config must be an object");
  for (const auto& [key, _] : cfg.items())
    if (!allowed.count(key))
      throw Error(errc::parse, std::string(who) + ": unknown config key '" + key + "'");
  if (!cfg.contains("schema_version") || cfg.at("schema_version") != 1)
    throw Error(errc::parse, std::string(who) + ": missing or unsupported schema_version");
}

template <typename T>
T get_or(const json& cfg, const char* key, T fallback) {
  return cfg.contains(key) ? cfg.at(key).get<T>() : fallback;
}

// ------------------------------------------------------------------- csv --

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class Csv {
public:
  explicit Csv(const std::vector<std::string>& header) : ncols_(header.size()) {
    append_row(header);
  }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != ncols_) throw Error(errc::internal, "csv row width mismatch");
    append_row(cells);
  }
  const std::string& str() const { return buf_; }

private:
  void append_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) buf_ += ',';
      buf_ += csv_escape(cells[i]);
    }
    buf_ += "\r\n";
  }
  std::string buf_;
  std::size_t ncols_;
};

std::string cell(double v) { return format_double(v); }
std::string cell(int v) { return std::to_string(v); }
std::string cell(uint64_t v) { return std::to_string(v); }

void write_text_file(const std::string& dir, const std::string& name,
                     const std::string& content) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path p = fs::path(dir) / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(errc::io, "cannot open " + p.string() + " for writing");
  out << content;
  if (!out) throw Error(errc::io, "write failed: " + p.string());
}

// ------------------------------------------------------------------- svg --

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> pts;
  bool line = false;
  std::string color = "#1f6fb2";
};

// Minimal static plot; never on the critical path of a numeric run.
std::string render_svg(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel, std::vector<PlotSeries> series, bool logy) {
  const double W = 640, H = 440, L = 70, R = 20, T = 40, B = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (auto& s : series)
    for (auto& [x, y] : s.pts) {
      if (logy) y = std::log10(std::max(y, 1e-300));
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!(xmin < xmax)) {
    xmin -= 1;
    xmax += 1;
  }
  if (!(ymin < ymax)) {
    ymin -= 1;
    ymax += 1;
  }
  const double xpad = 0.05 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;
  auto X = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto Y = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
  auto tick = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return std::string(buf);
  };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"440\">\n";
  svg += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + title +
         "</text>\n";
  svg += "<rect x=\"70\" y=\"40\" width=\"550\" height=\"350\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    svg += "<text x=\"" + format_double(X(fx)) + "\" y=\"" + format_double(H - B + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + tick(fx) + "</text>\n";
    const std::string ylab = logy ? ("1e" + tick(fy)) : tick(fy);
    svg += "<text x=\"" + format_double(L - 6) + "\" y=\"" + format_double(Y(fy) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + ylab + "</text>\n";
  }
  svg += "<text x=\"320\" y=\"" + format_double(H - 12) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + xlabel + "</text>\n";
  svg += "<text x=\"16\" y=\"215\" font-size=\"12\" transform=\"rotate(-90 16 215)\" "
         "text-anchor=\"middle\">" +
         ylabel + "</text>\n";
  int legend_y = 56;
  for (const auto& s : series) {
    if (s.line && s.pts.size() > 1) {
      std::string path = "M";
      for (const auto& [x, y] : s.pts)
        path += " " + format_double(X(x)) + " " + format_double(Y(y));
      svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + s.color +
             "\" stroke-width=\"1.5\"/>\n";
    }
    for (const auto& [x, y] : s.pts)
      svg += "<circle cx=\"" + format_double(X(x)) + "\" cy=\"" + format_double(Y(y)) +
             "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
    svg += "<circle cx=\"590\" cy=\"" + format_double(legend_y - 4) + "\" r=\"3\" fill=\"" +
           s.color + "\"/>\n";
    svg += "<text x=\"584\" y=\"" + format_double(legend_y) +
           "\" text-anchor=\"end\" font-size=\"11\">" + s.label + "</text>\n";
    legend_y += 16;
  }
  svg += "</svg>\n";
  return svg;
}

void try_write_plot(const std::string& dir, const std::string& name, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series, bool logy, json& summary) {
  try {
    write_text_file(dir, name, render_svg(title, xlabel, ylabel, series, logy));
    summary["plot"] = name;
  } catch (const std::exception& e) {
    summary["plot_error"] = e.what();  // plotting failure never fails the run
  }
}

// --------------------------------------------------------------- moments --

struct Moments {
  double mean = 0, se_mean = 0, var = 0, se_var = 0;
};

Moments moments_of(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  Moments m;
  m.mean = pairwise_sum(v) / n;
  std::vector<double> d2(v.size()), d4(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - m.mean;
    d2[i] = d * d;
    d4[i] = d * d * d * d;
  }
  const double m2 = pairwise_sum(d2) / n;
  const double m4 = pairwise_sum(d4) / n;
  m.var = m2 * n / (n - 1.0);
  m.se_mean = std::sqrt(m2 / n);
  m.se_var = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  return m;
}

struct Covariance {
  double cov = 0, se = 0;
};

Covariance covariance_of(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = pairwise_sum(a) / n, mb = pairwise_sum(b) / n;
  std::vector<double> prod(a.size()), prod2(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = (a[i] - ma) * (b[i] - mb);
    prod[i] = d;
    prod2[i] = d * d;
  }
  Covariance c;
  c.cov = pairwise_sum(prod) / n;
  c.se = std::sqrt(std::max(0.0, pairwise_sum(prod2) / n - c.cov * c.cov) / n);
  return c;
}

uint64_t spec_hash(const field::SpectralFieldSpec& spec) {
  return fnv1a(field::spec_to_json(spec).dump());
}

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

namespace {

void check_field_keys(const json& j, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw Error(errc::parse, "field config: unknown key '" + key + "'");
}

}  // namespace

field::SpectralFieldSpec spec_from_config(const json& j) {
  if (!j.is_object()) throw Error(errc::parse, "field config must be an object");
  if (j.contains("file")) {
    check_field_keys(j, {"file"});
    std::ifstream in(j.at("file").get<std::string>());
    if (!in) throw Error(errc::io, "cannot read field file " + j.at("file").get<std::string>());
    json inner;
    in >> inner;
    return field::spec_from_json(inner);
  }
  if (j.contains("builtin")) {
    const std::string b = j.at("builtin").get<std::string>();
    if (b == "rsh") {
      check_field_keys(j, {"builtin", "ell"});
      return field::make_rsh(j.at("ell").get<int>());
    }
    if (b == "arw") {
      check_field_keys(j, {"builtin", "m"});
      return field::make_arw(j.at("m").get<int>());
    }
    if (b == "band_torus") {
      check_field_keys(j, {"builtin", "ms", "normalized"});
      auto spec = field::make_band_torus(j.at("ms").get<std::vector<int>>());
      return get_or(j, "normalized", true) ? field::normalized(spec) : spec;
    }
    if (b == "band_sphere") {
      check_field_keys(j, {"builtin", "ells", "normalized"});
      auto spec = field::make_band_sphere(j.at("ells").get<std::vector<int>>());
      return get_or(j, "normalized", true) ? field::normalized(spec) : spec;
    }
    if (b == "anisotropic") {
      check_field_keys(j, {"builtin", "freqs", "stds"});
      const auto freqs = j.at("freqs").get<std::vector<std::vector<int>>>();
      const auto stds = j.at("stds").get<std::vector<double>>();
      if (freqs.size() != stds.size())
        throw Error(errc::parse, "anisotropic: freqs and stds lengths differ");
      std::vector<std::pair<Eigen::Vector2i, double>> fs;
      for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (freqs[i].size() != 2) throw Error(errc::parse, "anisotropic: frequency must be 2-d");
        fs.push_back({{freqs[i][0], freqs[i][1]}, stds[i]});
      }
      return field::make_anisotropic(fs);
    }
    throw Error(errc::parse, "unknown builtin field '" + b + "'");
  }
  return field::spec_from_json(j);
}

json run_constants(const json& cfg, const std::string& out_dir) {
  check_keys(cfg, {"schema_version", "n_max", "q_max"}, "constants");
  const int n_max = get_or(cfg, "n_max", 6);
  const int q_max = get_or(cfg, "q_max", 8);
  if (n_max < 1 || n_max > 50 || q_max < 0 || q_max > 50)
    throw Error(errc::invalid_argument, "constants: ranges must stay within 50");

  using namespace specfun;
  Csv csv({"kind", "i", "j", "closed_form", "oracle", "deviation"});
  double maxdev = 0;
  int rows = 0;
  auto push = [&](const std::string& kind, int i, int j, double closed, double oracle) {
    const double dev = std::abs(closed - oracle) / std::max(1.0, std::abs(oracle));
    maxdev = std::max(maxdev, dev);
    csv.row({kind, cell(i), cell(j), cell(closed), cell(oracle), cell(dev)});
    ++rows;
  };

  const auto gauss_pr = [&](const std::function<double(double)>& f) {
    const auto& gl = gauss_legendre(200);
    std::vector<double> terms;
    for (int side = 0; side < 2; ++side) {
      const double a = side == 0 ? -12.0 : 0.0;
      for (std::size_t i = 0; i < gl.x.size(); ++i) {
        const double x = a + 6.0 * (gl.x[i] + 1.0);
        terms.push_back(6.0 * gl.w[i] * f(x) * std::exp(-0.5 * x * x) /
                        std::sqrt(2.0 * kPi));
      }
    }
    return pairwise_sum(terms);
  };

  for (int n = 0; n <= n_max; ++n)
    push("s_n", n, 0, sphere_area(n),
         n == 0 ? 2.0 : geo::zonal_integral(n + 1, [](double) { return 1.0; }, 128));
  {
    // |cos|^q kinks at the equator: integrate the two halves separately.
    const auto& gl = gauss_legendre(200);
    for (int n = 2; n <= std::max(2, n_max); ++n)
      for (int q = 0; q <= q_max; ++q) {
        double acc = 0;
        for (int half = 0; half < 2; ++half) {
          const double a = half * 0.5 * kPi;
          for (std::size_t i = 0; i < gl.x.size(); ++i) {
            const double t = a + 0.25 * kPi * (gl.x[i] + 1.0);
            acc += 0.25 * kPi * gl.w[i] * std::pow(std::abs(std::cos(t)), q) *
                   std::pow(std::sin(t), n - 2);
          }
        }
        push("beta", n, q, beta_const(n, q), sphere_area(n - 2) * acc);
      }
  }
  std::vector<double> cchi_oracle(q_max / 2 + 1);
  for (int b = 0; 2 * b <= q_max; ++b) {
    cchi_oracle[b] =
        gauss_pr([&](double x) { return std::abs(x) * hermite(2 * b, x); }) / factorial(2 * b);
    push("c_chi", b, 0, c_chi(b), cchi_oracle[b]);
  }
  for (int n = 1; n <= n_max; ++n)
    for (int b = 0; 2 * b <= q_max; ++b)
      push("A", n, 2 * b, a_coeff(n, b), kPi / sphere_area(n) * cchi_oracle[b]);
  for (int a = 0; 2 * a <= q_max; ++a)
    for (int b = 0; 2 * (a + b) <= q_max; ++b) {
      // Composition oracle: Theta(a,b)/s_n is the delta-expansion weight
      // times the chi-expansion weight, here evaluated at n = 2.
      const double delta_coeff =
          (a % 2 == 0 ? 1.0 : -1.0) / (std::pow(2.0, a) * factorial(a) * std::sqrt(2.0 * kPi));
      push("theta", a, b, theta(a, b),
           sphere_area(2) * delta_coeff * kPi / sphere_area(2) * cchi_oracle[b]);
    }
  for (int d = 2; d <= std::min(4, std::max(2, n_max)); ++d)
    for (int q = 0; q <= q_max; q += 2) {
      const double xn = 1.3;
      const double S = geo::zonal_integral(
          d, [&](double c) { return hermite(q, xn * c); }, 400);
      const double oracle = laguerre(q / 2, 0.5 * d - 1.0, 0.5 * xn * xn) / S;
      push("c_dq", d, q, c_dq(d, q), oracle);
    }

  write_text_file(out_dir, "constants.csv", csv.str());
  json summary;
  summary["rows"] = rows;
  summary["max_deviation"] = maxdev;
  summary["csv"] = "constants.csv";
  summary["pass"] = maxdev <= 1e-8;
  return summary;
}

json run_verify(const json& cfg) {
  check_keys(cfg, {"schema_version", "suite", "seed"}, "verify");
  const std::string suite = get_or<std::string>(cfg, "suite", "all");
  const uint64_t seed = get_or<uint64_t>(cfg, "seed", 1);
  std::vector<std::string> names;
  if (suite == "all")
    names = verify::suite_names();
  else
    names = {suite};
  json out;
  out["schema_version"] = 1;
  out["suite"] = suite;
  out["seed"] = seed;
  bool pass = true;
  json suites = json::array();
  for (const auto& name : names) {
    const auto rep = verify::run_suite(name, seed);
    json js;
    js["suite"] = rep.suite;
    js["pass"] = rep.pass;
    json checks = json::array();
    for (const auto& c : rep.checks)
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    js["checks"] = checks;
    suites.push_back(js);
    pass = pass && rep.pass;
  }
  out["suites"] = suites;
  out["pass"] = pass;
  return out;
}

json run_simulate(const json& cfg, const std::string& out_dir) {
  check_keys(cfg,
             {"schema_version", "field", "seed", "samples", "resolution", "fiber", "q", "forms",
              "level", "workers"},
             "simulate");
  const auto spec = spec_from_config(cfg.at("field"));
  const uint64_t seed = get_or<uint64_t>(cfg, "seed", 1);
  const int nsamples = get_or(cfg, "samples", 100);
  const int resolution = get_or(cfg, "resolution", 32);
  const int K = get_or(cfg, "fiber", 32);
  const double level = get_or(cfg, "level", 0.0);
  const int workers = get_or(cfg, "workers", 0);
  const auto qs = get_or<std::vector<int>>(cfg, "q", {0, 2, 4});
  const auto form_names = get_or<std::vector<std::string>>(cfg, "forms", {"general"});
  if (nsamples < 1) throw Error(errc::invalid_argument, "simulate: samples >= 1");

  std::vector<chaos::Form> forms;
  for (const auto& f : form_names) forms.push_back(chaos::form_from_string(f));
  const chaos::ChaosContext ctx(spec, resolution, K);

  const std::size_t per = qs.size() * forms.size();
  std::vector<double> values(static_cast<std::size_t>(nsamples) * per);
  parallel_for(nsamples, workers, [&](std::size_t i) {
    const auto s = field::sample_field(spec, seed + i);
    std::size_t k = i * per;
    for (int q : qs)
      for (const auto form : forms) {
        double v = 0;
        switch (form) {
          case chaos::Form::tilde: v = ctx.tilde_q(s, q).value; break;
          case chaos::Form::closed2: v = ctx.closed2(s).value; break;
          case chaos::Form::closed4: v = ctx.closed4(s).value; break;
          default: v = ctx.chaos_q(s, q, form, level).value;
        }
        values[k++] = v;
      }
  });

  Csv csv({"seed", "q", "form", "value", "resolution", "K", "t"});
  for (int i = 0; i < nsamples; ++i) {
    std::size_t k = static_cast<std::size_t>(i) * per;
    for (int q : qs)
      for (const auto& fname : form_names)
        csv.row({cell(seed + i), cell(q), fname, cell(values[k++]), cell(resolution), cell(K),
                 cell(level)});
  }
  write_text_file(out_dir, "chaos.csv", csv.str());

  json summary;
  summary["schema_version"] = 1;
  summary["csv"] = "chaos.csv";
  summary["seed"] = seed;
  summary["samples"] = nsamples;
  summary["spec_hash"] = hash_hex(spec_hash(spec));
  json stats = json::array();
  std::size_t col = 0;
  for (int q : qs)
    for (const auto& fname : form_names) {
      std::vector<double> colv(nsamples);
      for (int i = 0; i < nsamples; ++i) colv[i] = values[i * per + col];
      const auto m = moments_of(colv);
      stats.push_back({{"q", q},
                       {"form", fname},
                       {"mean", m.mean},
                       {"se_mean", m.se_mean},
                       {"var", m.var},
                       {"se_var", m.se_var}});
      ++col;
    }
  summary["stats"] = stats;
  return summary;
}

json run_variance(const json& cfg, const std::string& out_dir) {
  check_keys(cfg,
             {"schema_version", "field", "seed", "samples", "resolution", "fiber", "q",
              "workers"},
             "variance");
  const auto spec = spec_from_config(cfg.at("field"));
  const uint64_t seed = get_or<uint64_t>(cfg, "seed", 1);
  const int nsamples = get_or(cfg, "samples", 2000);
  const int resolution = get_or(cfg, "resolution", 32);
  const int K = get_or(cfg, "fiber", 16);
  const int workers = get_or(cfg, "workers", 0);
  const auto qs = get_or<std::vector<int>>(cfg, "q", {2, 4});

  const std::string hh = hash_hex(spec_hash(spec));
  Csv csv({"spec_hash", "q", "var_exact", "var_bound", "var_closed", "var_mc", "var_mc_se",
           "resolution", "fiber", "samples", "notes"});
  json rows = json::array();
  std::vector<PlotSeries> series;
  PlotSeries exact_pts{"exact", {}, false, "#1f6fb2"};
  PlotSeries bound_pts{"2^q bound", {}, true, "#b23a1f"};
  bool all_bounded = true;

  const chaos::ChaosContext ctx(spec, std::min(resolution, 32), std::min(K, 16));
  for (int q : qs) {
    const double ve = variance::var_exact(spec, q, resolution, K);
    const double vb = variance::var_bound(spec, q, resolution, K);
    all_bounded = all_bounded && ve <= vb + 1e-8;
    std::string notes;
    double vc = std::nan("");
    if (q == 2 || q == 4) {
      try {
        vc = q == 2 ? variance::var2_closed(spec, resolution)
                    : variance::var4_closed(spec, resolution);
      } catch (const Error& e) {
        notes = e.what();
      }
    } else {
      notes = "closed form only available for q in {2, 4}";
    }
    // Monte Carlo column: per-sample chaos statistic on the same seeds; the
    // cheap closed evaluations apply exactly when the closed variance does.
    const bool use_closed = notes.empty() && (q == 2 || q == 4);
    std::vector<double> vals(nsamples);
    parallel_for(nsamples, workers, [&](std::size_t i) {
      const auto s = field::sample_field(spec, seed + i);
      if (use_closed)
        vals[i] = q == 2 ? ctx.closed2_spectral(s) : ctx.closed4(s).value;
      else
        vals[i] = ctx.chaos_q(s, q, chaos::Form::general).value;
    });
    const auto m = moments_of(vals);
    csv.row({hh, cell(q), cell(ve), cell(vb), cell(vc), cell(m.var), cell(m.se_var),
             cell(resolution), cell(K), cell(nsamples), notes});
    rows.push_back({{"q", q},
                    {"var_exact", ve},
                    {"var_bound", vb},
                    {"var_closed", vc},
                    {"var_mc", m.var},
                    {"var_mc_se", m.se_var},
                    {"notes", notes}});
    exact_pts.pts.push_back({static_cast<double>(q), std::max(ve, 1e-300)});
    bound_pts.pts.push_back({static_cast<double>(q), std::max(vb, 1e-300)});
  }
  write_text_file(out_dir, "variance.csv", csv.str());
  json summary;
  summary["schema_version"] = 1;
  summary["csv"] = "variance.csv";
  summary["seed"] = seed;
  summary["spec_hash"] = hh;
  summary["rows"] = rows;
  summary["bound_dominates"] = all_bounded;
  write_text_file(out_dir, "variance.json", summary.dump(2) + "\n");
  try_write_plot(out_dir, "variance.svg", "chaos component variance vs q", "q", "variance",
                 {exact_pts, bound_pts}, true, summary);
  return summary;
}

json run_berry(const json& cfg, const std::string& out_dir) {
  check_keys(cfg, {"schema_version", "manifold", "bands", "resolution"}, "berry");
  const std::string manifold = get_or<std::string>(cfg, "manifold", "torus2");
  const int resolution = get_or(cfg, "resolution", 32);
  if (!cfg.contains("bands") || cfg.at("bands").empty())
    throw Error(errc::invalid_argument, "berry: nonempty band list required");
  const auto bands = cfg.at("bands").get<std::vector<std::vector<int>>>();

  Csv csv({"band", "sigma2", "lambda2", "var_mu", "lhs", "spectral_term", "ratio", "prefactor",
           "eps", "wmrw_diagnostic"});
  json rows = json::array();
  PlotSeries pts{"bands", {}, false, "#1f6fb2"};
  PlotSeries diag{"y = x", {}, true, "#999999"};
  double lo = 1e300, hi = 0;
  for (const auto& band : bands) {
    const auto raw = manifold == "torus2" ? field::make_band_torus(band)
                                          : field::make_band_sphere(band);
    const auto rep = variance::berry_report(raw, resolution);
    const auto gp = field::global_params(
        field::normalized(raw),
        raw.manifold.kind == geo::ManifoldKind::Sphere2 ? 48 : 16, 8);
    std::string band_name;
    for (std::size_t i = 0; i < band.size(); ++i)
      band_name += (i ? "+" : "") + std::to_string(band[i]);
    // Weakly-monochromatic diagnostic: lhs * l^{n-1} / (alpha * eps); the
    // constants are not pinned anywhere, so this column is informational.
    std::string wmrw = "";
    if (manifold == "sphere2" && band.size() >= 1) {
      const double ell = band.front();
      const double alpha = band.size() > 1 ? band.back() - band.front() : 1.0;
      const double denom = alpha * gp.eps;
      wmrw = denom > 1e-14 ? format_double(rep.lhs * ell / denom) : "inf";
    }
    csv.row({band_name, cell(rep.sigma2), cell(rep.lambda2), cell(rep.var_mu), cell(rep.lhs),
             cell(rep.spectral_term), cell(rep.ratio), cell(rep.prefactor), cell(gp.eps), wmrw});
    rows.push_back({{"band", band_name},
                    {"sigma2", rep.sigma2},
                    {"lambda2", rep.lambda2},
                    {"var_mu", rep.var_mu},
                    {"lhs", rep.lhs},
                    {"spectral_term", rep.spectral_term},
                    {"ratio", rep.ratio},
                    {"eps", gp.eps}});
    if (rep.spectral_term > 0) {
      pts.pts.push_back({rep.spectral_term, rep.lhs});
      lo = std::min(lo, rep.spectral_term);
      hi = std::max(hi, rep.spectral_term);
    }
  }
  if (hi > 0) diag.pts = {{lo, lo}, {hi, hi}};
  write_text_file(out_dir, "berry.csv", csv.str());
  json summary;
  summary["schema_version"] = 1;
  summary["csv"] = "berry.csv";
  summary["rows"] = rows;
  write_text_file(out_dir, "berry.json", summary.dump(2) + "\n");
  try_write_plot(out_dir, "berry.svg", "second-chaos variance vs spectral term",
                 "spectral term", "Var(L[2])/lambda^2", {pts, diag}, false, summary);
  return summary;
}

json run_nodal(const json& cfg, const std::string& out_dir) {
  check_keys(cfg,
             {"schema_version", "field", "seed", "samples", "resolution", "level", "workers",
              "chaos_resolution", "chaos_fiber"},
             "nodal");
  const auto spec = spec_from_config(cfg.at("field"));
  const uint64_t seed = get_or<uint64_t>(cfg, "seed", 1);
  const int nsamples = get_or(cfg, "samples", 200);
  const int resolution = get_or(cfg, "resolution", 128);
  const double level = get_or(cfg, "level", 0.0);
  const int workers = get_or(cfg, "workers", 0);
  const int cres = get_or(cfg, "chaos_resolution", 24);
  const int cK = get_or(cfg, "chaos_fiber", 8);
  if (nsamples < 2) throw Error(errc::invalid_argument, "nodal: samples >= 2 required");

  const nodal::NodalExtractor extractor(spec, nodal::build_grid(spec.manifold, resolution));
  const chaos::ChaosContext ctx(spec, cres, cK);
  const bool homothetic = ctx.params().eps <= 1e-8 && spec.unit_variance;

  std::vector<double> lengths(nsamples), c2(nsamples), c4(nsamples);
  std::vector<int> degenerate(nsamples);
  parallel_for(nsamples, workers, [&](std::size_t i) {
    const auto s = field::sample_field(spec, seed + i);
    const auto r = extractor.extract(s, level);
    lengths[i] = r.length;
    degenerate[i] = r.degenerate_vertices;
    if (homothetic) {
      c2[i] = ctx.closed2_spectral(s);
      c4[i] = ctx.closed4(s).value;
    } else {
      c2[i] = ctx.chaos_q(s, 2, chaos::Form::general, level).value;
      c4[i] = ctx.chaos_q(s, 4, chaos::Form::general, level).value;
    }
  });

  Csv csv({"seed", "length", "t", "resolution", "degenerate"});
  for (int i = 0; i < nsamples; ++i)
    csv.row({cell(seed + i), cell(lengths[i]), cell(level), cell(resolution),
             cell(degenerate[i])});
  write_text_file(out_dir, "nodal.csv", csv.str());

  const auto mL = moments_of(lengths);
  const auto m2 = moments_of(c2);
  const auto m4 = moments_of(c4);
  const auto cov2 = covariance_of(lengths, c2);
  const auto cov4 = covariance_of(lengths, c4);
  json summary;
  summary["schema_version"] = 1;
  summary["csv"] = "nodal.csv";
  summary["seed"] = seed;
  summary["spec_hash"] = hash_hex(spec_hash(spec));
  summary["samples"] = nsamples;
  summary["resolution"] = resolution;
  summary["level"] = level;
  summary["mean"] = mL.mean;
  summary["se_mean"] = mL.se_mean;
  summary["var"] = mL.var;
  summary["se_var"] = mL.se_var;
  summary["chaos2"] = {{"var", m2.var}, {"se_var", m2.se_var}, {"cov_with_length", cov2.cov},
                       {"cov_se", cov2.se}};
  summary["chaos4"] = {{"var", m4.var}, {"se_var", m4.se_var}, {"cov_with_length", cov4.cov},
                       {"cov_se", cov4.se}};
  write_text_file(out_dir, "nodal_moments.json", summary.dump(2) + "\n");
  return summary;
}

}  // namespace ncx::runner
