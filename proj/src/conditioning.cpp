#include "sdr/conditioning.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <vector>

namespace sdr {
namespace {

// Second derivatives of the not-a-knot cubic spline through (x_i, Y.row(i)).
// Y has one column per feature dimension; the solve is shared across columns.
Mat spline_second_derivatives(const std::vector<double>& x, const Mat& y) {
  const auto k = static_cast<Eigen::Index>(x.size());
  std::vector<double> h(static_cast<std::size_t>(k) - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) h[i] = x[i + 1] - x[i];

  Mat a = Mat::Zero(k, k);
  Mat rhs = Mat::Zero(k, y.cols());
  // not-a-knot: third derivative continuous across the second knot
  a(0, 0) = h[1];
  a(0, 1) = -(h[0] + h[1]);
  a(0, 2) = h[0];
  for (Eigen::Index i = 1; i < k - 1; ++i) {
    const double hl = h[static_cast<std::size_t>(i) - 1];
    const double hr = h[static_cast<std::size_t>(i)];
    a(i, i - 1) = hl / 6.0;
    a(i, i) = (hl + hr) / 3.0;
    a(i, i + 1) = hr / 6.0;
    rhs.row(i) = (y.row(i + 1) - y.row(i)) / hr - (y.row(i) - y.row(i - 1)) / hl;
  }
  // ... and across the second-to-last knot
  a(k - 1, k - 3) = h[static_cast<std::size_t>(k) - 2];
  a(k - 1, k - 2) = -(h[static_cast<std::size_t>(k) - 3] + h[static_cast<std::size_t>(k) - 2]);
  a(k - 1, k - 1) = h[static_cast<std::size_t>(k) - 3];
  return a.partialPivLu().solve(rhs);
}

}  // namespace

FeatureMatrix interpolate_missing(const FeatureMatrix& m) {
  m.validate();
  const auto t = m.data.rows();
  FeatureMatrix out = m;
  out.mask = std::vector<bool>(static_cast<std::size_t>(t), true);
  if (!m.mask) return out;  // treated as all-observed

  std::vector<Eigen::Index> observed;
  for (Eigen::Index i = 0; i < t; ++i) {
    if ((*m.mask)[static_cast<std::size_t>(i)]) observed.push_back(i);
  }
  if (observed.size() < 2) {
    throw std::invalid_argument("interpolate_missing: need at least 2 observed frames, got " +
                                std::to_string(observed.size()));
  }
  if (static_cast<Eigen::Index>(observed.size()) == t) return out;

  const auto k = static_cast<Eigen::Index>(observed.size());
  std::vector<double> x(observed.size());
  Mat y(k, m.data.cols());
  for (Eigen::Index i = 0; i < k; ++i) {
    x[static_cast<std::size_t>(i)] = static_cast<double>(observed[static_cast<std::size_t>(i)]);
    y.row(i) = m.data.row(observed[static_cast<std::size_t>(i)]);
  }

  const bool cubic = k >= 4;
  Mat m2;
  if (cubic) m2 = spline_second_derivatives(x, y);

  Eigen::Index seg = 0;
  for (Eigen::Index f = 0; f < t; ++f) {
    if ((*m.mask)[static_cast<std::size_t>(f)]) continue;
    const double xf = static_cast<double>(f);
    if (f < observed.front()) {
      out.data.row(f) = y.row(0);  // hold boundary
      continue;
    }
    if (f > observed.back()) {
      out.data.row(f) = y.row(k - 1);
      continue;
    }
    while (x[static_cast<std::size_t>(seg) + 1] < xf) ++seg;
    const double x0 = x[static_cast<std::size_t>(seg)];
    const double x1 = x[static_cast<std::size_t>(seg) + 1];
    const double h = x1 - x0;
    if (cubic) {
      const double dl = x1 - xf;
      const double dr = xf - x0;
      out.data.row(f) = m2.row(seg) * (dl * dl * dl / (6.0 * h)) +
                        m2.row(seg + 1) * (dr * dr * dr / (6.0 * h)) +
                        (y.row(seg) - m2.row(seg) * (h * h / 6.0)) * (dl / h) +
                        (y.row(seg + 1) - m2.row(seg + 1) * (h * h / 6.0)) * (dr / h);
    } else {
      const double w = (xf - x0) / h;
      out.data.row(f) = (1.0 - w) * y.row(seg) + w * y.row(seg + 1);
    }
  }
  return out;
}

Vec savgol_coefficients(int window, int order) {
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("savgol: window must be odd");
  if (order >= window) throw std::invalid_argument("savgol: order must be < window");
  const int half = window / 2;
  Mat v(window, order + 1);
  for (int i = 0; i < window; ++i) {
    double p = 1.0;
    for (int j = 0; j <= order; ++j) {
      v(i, j) = p;
      p *= static_cast<double>(i - half);
    }
  }
  // value at window center = first coefficient of the least-squares fit
  Mat gram = v.transpose() * v;
  Vec e0 = Vec::Zero(order + 1);
  e0(0) = 1.0;
  Vec z = gram.ldlt().solve(e0);
  return v * z;
}

FeatureMatrix savgol_smooth(const FeatureMatrix& m, int window, int order) {
  m.validate();
  const auto t = m.data.rows();
  if (window % 2 == 0) throw std::invalid_argument("savgol_smooth: window must be odd");
  if (order >= window) throw std::invalid_argument("savgol_smooth: order must be < window");
  if (static_cast<Eigen::Index>(window) > t) {
    throw std::invalid_argument("savgol_smooth: window " + std::to_string(window) +
                                " exceeds frame count " + std::to_string(t));
  }
  if (m.mask && !std::all_of(m.mask->begin(), m.mask->end(), [](bool b) { return b; })) {
    throw std::invalid_argument("savgol_smooth: matrix has missing frames; run interpolate_missing first");
  }

  const int half = window / 2;
  const Vec coeffs = savgol_coefficients(window, order);

  FeatureMatrix out = m;
  for (Eigen::Index i = half; i < t - half; ++i) {
    out.data.row(i) = coeffs.transpose() * m.data.middleRows(i - half, window);
  }
  // edges: least-squares polynomial over the truncated window
  for (Eigen::Index i = 0; i < t; ++i) {
    if (i >= half && i < t - half) continue;
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
    const Eigen::Index hi = std::min<Eigen::Index>(t - 1, i + half);
    const auto len = hi - lo + 1;
    const int fit_order = std::min<int>(order, static_cast<int>(len) - 1);
    Mat v(len, fit_order + 1);
    for (Eigen::Index r = 0; r < len; ++r) {
      double p = 1.0;
      for (int j = 0; j <= fit_order; ++j) {
        v(r, j) = p;
        p *= static_cast<double>(lo + r - i);  // centered at i
      }
    }
    Mat coef = v.colPivHouseholderQr().solve(m.data.middleRows(lo, len));
    out.data.row(i) = coef.row(0);  // value at the centering point
  }
  return out;
}

}  // namespace sdr
