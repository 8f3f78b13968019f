#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rbml/dataset.hpp"
#include "rbml/dataset_io.hpp"

namespace rbml {

// Two-component PCA of a feature matrix.
struct Pca2 {
  std::vector<double> mean;                 // D
  std::array<std::vector<double>, 2> components;  // each unit-norm, length D
  std::array<double, 2> explained_variance{0.0, 0.0};  // descending
};

namespace detail {

// Power iteration on a symmetric PSD matrix; all-ones start, tolerance on the
// successive-vector change.
struct PowerResult {
  std::vector<double> vec;
  double value = 0.0;
  bool degenerate = false;  // matrix is (numerically) zero on this subspace
};

inline PowerResult power_iteration(const std::vector<double>& m, std::size_t d,
                                   double tol = 1e-10, std::size_t max_iter = 10000) {
  std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<double> av(d);
  PowerResult res;
  for (std::size_t it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += m[i * d + j] * v[j];
      av[i] = s;
    }
    double norm = 0.0;
    for (double x : av) norm += x * x;
    norm = std::sqrt(norm);
    if (norm <= 1e-300) {
      res.degenerate = true;
      res.vec = v;
      res.value = 0.0;
      return res;
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      av[i] /= norm;
      diff = std::max(diff, std::abs(av[i] - v[i]));
    }
    v.swap(av);
    if (diff <= tol) break;
  }
  // Rayleigh quotient
  double lambda = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += m[i * d + j] * v[j];
    lambda += v[i] * s;
  }
  res.vec = std::move(v);
  res.value = lambda;
  return res;
}

// Largest-magnitude entry made positive, first index on ties.
inline void fix_sign(std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  if (v[best] < 0.0)
    for (auto& x : v) x = -x;
}

// Deterministic unit vector orthogonal to v: basis vector with the smallest
// |v| component, Gram-Schmidt against v.
inline std::vector<double> orthogonal_unit(const std::vector<double>& v) {
  std::size_t pick = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) < std::abs(v[pick])) pick = i;
  std::vector<double> u(v.size(), 0.0);
  u[pick] = 1.0;
  double dot = v[pick];
  double norm = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    u[i] -= dot * v[i];
    norm += u[i] * u[i];
  }
  norm = std::sqrt(norm);
  for (auto& x : u) x /= norm;
  return u;
}

}  // namespace detail

// Mean-centered covariance (divisor N-1) of the dataset rows, row-major D x D.
inline std::vector<double> covariance_matrix(const FeatureDataset& ds,
                                             std::vector<double>* mean_out = nullptr) {
  const std::size_t n = ds.size();
  const std::size_t d = ds.dim();
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = ds.row(i);
    for (std::size_t j = 0; j < d; ++j) mean[j] += x[j];
  }
  for (auto& v : mean) v /= static_cast<double>(n);

  std::vector<double> cov(d * d, 0.0);
  std::vector<double> centered(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = ds.row(i);
    for (std::size_t j = 0; j < d; ++j) centered[j] = x[j] - mean[j];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) cov[a * d + b] += centered[a] * centered[b];
  }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      cov[a * d + b] /= static_cast<double>(n - 1);
      cov[b * d + a] = cov[a * d + b];
    }
  if (mean_out) *mean_out = std::move(mean);
  return cov;
}

// Top two eigenpairs of the covariance by deflated power iteration.
inline Pca2 pca2_fit(const FeatureDataset& ds) {
  if (ds.size() < 3) throw data_error("pca2_fit: need at least 3 rows");
  if (ds.dim() < 2) throw data_error("pca2_fit: need at least 2 feature dimensions");
  const std::size_t d = ds.dim();

  Pca2 model;
  auto cov = covariance_matrix(ds, &model.mean);

  double trace = 0.0, mean_sq = 0.0;
  for (std::size_t j = 0; j < d; ++j) trace += cov[j * d + j];
  for (double v : model.mean) mean_sq += v * v;
  if (trace <= 1e-12 * (1.0 + mean_sq))
    throw data_error("pca2_fit: data has no variance (all rows identical)");

  auto first = detail::power_iteration(cov, d);
  model.components[0] = first.vec;
  model.explained_variance[0] = std::max(first.value, 0.0);
  detail::fix_sign(model.components[0]);

  // deflate: cov' = cov - lambda1 * v1 v1^T
  const auto& v1 = model.components[0];
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      cov[a * d + b] -= model.explained_variance[0] * v1[a] * v1[b];

  auto second = detail::power_iteration(cov, d);
  bool rank_one = second.degenerate ||
                  second.value <= 1e-12 * model.explained_variance[0];
  if (!rank_one) {
    model.components[1] = second.vec;
    // strip any residual v1 component so the pair stays orthogonal
    double dot = 0.0;
    for (std::size_t j = 0; j < d; ++j) dot += model.components[1][j] * v1[j];
    double norm = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      model.components[1][j] -= dot * v1[j];
      norm += model.components[1][j] * model.components[1][j];
    }
    norm = std::sqrt(norm);
    // a collapse here means the deflated matrix was pure rounding residue and
    // the iteration re-converged onto v1; the subtraction is then all noise
    if (norm <= 1e-6) {
      rank_one = true;
    } else {
      for (auto& x : model.components[1]) x /= norm;
      model.explained_variance[1] =
          std::clamp(second.value, 0.0, model.explained_variance[0]);
    }
  }
  if (rank_one) {
    model.components[1] = detail::orthogonal_unit(v1);
    model.explained_variance[1] = 0.0;
  }
  detail::fix_sign(model.components[1]);
  return model;
}

// (x - mean) projected onto the two components; N x 2, row order preserved.
inline std::vector<std::array<double, 2>> pca2_project(const Pca2& model,
                                                       const FeatureDataset& ds) {
  if (ds.dim() != model.mean.size())
    throw data_error("pca2_project: feature dimension mismatch");
  std::vector<std::array<double, 2>> out(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto x = ds.row(i);
    for (std::size_t c = 0; c < 2; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j)
        s += (x[j] - model.mean[j]) * model.components[c][j];
      out[i][c] = s;
    }
  }
  return out;
}

// Fixed palette used by the scatter plots, in class-index order.
inline constexpr std::array<const char*, 16> kScatterPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
    "#98df8a", "#ff9896", "#c5b0d5", "#c49c94"};

// CSV: pc1,pc2,label,is_synthetic
inline void write_scatter_csv(const std::filesystem::path& path,
                              const std::vector<std::array<double, 2>>& pts,
                              const FeatureDataset& ds) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw data_error("cannot write file: " + path.string());
  out << "pc1,pc2,label,is_synthetic\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out << detail::format_double(pts[i][0]) << ','
        << detail::format_double(pts[i][1]) << ','
        << ds.class_names()[ds.label(i)] << ','
        << (ds.tag(i) == kSyntheticTag ? 1 : 0) << '\n';
  }
}

// Static SVG scatter with a per-class legend; synthetic rows are hollow.
inline void write_scatter_svg(const std::filesystem::path& path,
                              const std::vector<std::array<double, 2>>& pts,
                              const FeatureDataset& ds, const std::string& title) {
  const double w = 640, h = 480, margin = 40, legend_w = 130;
  double xmin = pts.empty() ? -1 : pts[0][0], xmax = xmin;
  double ymin = pts.empty() ? -1 : pts[0][1], ymax = ymin;
  for (const auto& p : pts) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  auto sx = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (w - 2 * margin - legend_w); };
  auto sy = [&](double y) { return h - margin - (y - ymin) / (ymax - ymin) * (h - 2 * margin); };

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw data_error("cannot write file: " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
      << w - 2 * margin - legend_w << "\" height=\"" << h - 2 * margin
      << "\" fill=\"none\" stroke=\"#999\"/>\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const char* color = kScatterPalette[ds.label(i) % kScatterPalette.size()];
    bool synth = ds.tag(i) == kSyntheticTag;
    out << "<circle cx=\"" << sx(pts[i][0]) << "\" cy=\"" << sy(pts[i][1])
        << "\" r=\"2\"";
    if (synth)
      out << " fill=\"none\" stroke=\"" << color << "\" stroke-width=\"0.8\"";
    else
      out << " fill=\"" << color << "\" fill-opacity=\"0.6\"";
    out << "/>\n";
  }
  for (std::size_t c = 0; c < ds.n_classes(); ++c) {
    double ly = margin + 14 + 16 * static_cast<double>(c);
    out << "<rect x=\"" << w - legend_w - 20 << "\" y=\"" << ly - 9
        << "\" width=\"10\" height=\"10\" fill=\""
        << kScatterPalette[c % kScatterPalette.size()] << "\"/>\n";
    out << "<text x=\"" << w - legend_w - 6 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << ds.class_names()[c] << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace rbml
