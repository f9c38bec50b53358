#include "nfres/specfit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "nfres/constants.hpp"
#include "nfres/cavity.hpp"
#include "nfres/errors.hpp"

namespace nfres::specfit {

namespace {

using constants::pi;

double median_of(std::vector<double> v) {
  const size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.end());
  return 0.5 * (v[n / 2 - 1] + hi);
}

// Internal optimization vector: (log F, log FSR, center, amplitude, baseline).
using Vec5 = Eigen::Matrix<double, kNumParams, 1>;
using Mat5 = Eigen::Matrix<double, kNumParams, kNumParams>;

AiryParams from_internal(const Vec5& p) {
  AiryParams a;
  a.finesse = std::exp(p(0));
  a.fsr = std::exp(p(1));
  a.center = p(2);
  a.amplitude = p(3);
  a.baseline = p(4);
  return a;
}

Vec5 to_internal(const AiryParams& a) {
  Vec5 p;
  p(0) = std::log(a.finesse);
  p(1) = std::log(a.fsr);
  p(2) = a.center;
  p(3) = a.amplitude;
  p(4) = a.baseline;
  return p;
}

}  // namespace

double airy_model(const AiryParams& p, double nu) {
  const double coeff = 2.0 * p.finesse / pi;
  const double s = std::sin(pi * (nu - p.center) / p.fsr);
  return p.baseline + p.amplitude / (1.0 + coeff * coeff * s * s);
}

std::array<double, kNumParams> airy_jacobian_row(const AiryParams& p, double nu) {
  const double theta = pi * (nu - p.center) / p.fsr;
  const double s = std::sin(theta);
  const double g = (2.0 * p.finesse / pi) * (2.0 * p.finesse / pi);
  const double denom = 1.0 + g * s * s;
  const double inv = 1.0 / denom;
  const double inv2 = inv * inv;
  // d/d theta of sin^2 is sin(2 theta).
  const double dm_dtheta = -p.amplitude * g * std::sin(2.0 * theta) * inv2;
  std::array<double, kNumParams> j{};
  j[0] = -p.amplitude * s * s * (8.0 * p.finesse / (pi * pi)) * inv2;  // dF
  j[1] = dm_dtheta * (-theta / p.fsr);                                 // dFSR
  j[2] = dm_dtheta * (-pi / p.fsr);                                    // dcenter
  j[3] = inv;                                                          // damplitude
  j[4] = 1.0;                                                          // dbaseline
  return j;
}

SpectrumScan normalize_off_band(const SpectrumScan& scan, double window_lo, double window_hi) {
  scan.validate();
  if (scan.normalization != SpectrumScan::Normalization::raw) {
    throw ValidationError("normalize_off_band: scan is already normalized");
  }
  if (!(window_hi > window_lo)) {
    throw ValidationError("normalize_off_band: empty baseline window");
  }
  std::vector<double> inside;
  for (size_t i = 0; i < scan.frequency.size(); ++i) {
    if (scan.frequency[i] >= window_lo && scan.frequency[i] <= window_hi) {
      inside.push_back(scan.transmission[i]);
    }
  }
  if (inside.size() < 8) {
    std::ostringstream os;
    os << "normalize_off_band: baseline window contains " << inside.size()
       << " samples, need at least 8";
    throw ValidationError(os.str());
  }
  const double med = median_of(inside);
  if (!(med > 0.0)) {
    throw ValidationError("normalize_off_band: baseline median is not positive (degenerate baseline)");
  }
  SpectrumScan out = scan;
  for (double& t : out.transmission) t /= med;
  if (!out.sigma.empty()) {
    for (double& s : out.sigma) s /= med;
  }
  out.normalization = SpectrumScan::Normalization::off_band_normalized;
  return out;
}

std::vector<Resonance> detect_resonances(const SpectrumScan& scan, double min_prominence) {
  scan.validate();
  const auto& y = scan.transmission;
  const auto& x = scan.frequency;
  const int n = static_cast<int>(y.size());

  std::vector<Resonance> out;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;

    // Prominence: height above the higher of the two valley minima reached
    // before terrain rises back above the peak (or the trace ends).
    double left_min = y[i];
    for (int j = i - 1; j >= 0; --j) {
      left_min = std::min(left_min, y[j]);
      if (y[j] > y[i]) break;
    }
    double right_min = y[i];
    for (int j = i + 1; j < n; ++j) {
      right_min = std::min(right_min, y[j]);
      if (y[j] > y[i]) break;
    }
    const double base = std::max(left_min, right_min);
    const double prominence = y[i] - base;
    if (prominence < min_prominence) continue;

    // Half-height crossings, interpolated linearly.
    const double half = base + 0.5 * prominence;
    double lo = x[i], hi = x[i];
    for (int j = i; j > 0; --j) {
      if (y[j - 1] <= half) {
        const double t = (y[j] - half) / (y[j] - y[j - 1]);
        lo = x[j] + t * (x[j - 1] - x[j]);
        break;
      }
      lo = x[j - 1];
    }
    for (int j = i; j + 1 < n; ++j) {
      if (y[j + 1] <= half) {
        const double t = (y[j] - half) / (y[j] - y[j + 1]);
        hi = x[j] + t * (x[j + 1] - x[j]);
        break;
      }
      hi = x[j + 1];
    }

    Resonance r;
    r.center = x[i];
    r.height = y[i];
    r.fwhm = hi - lo;
    out.push_back(r);
  }
  return out;
}

AiryParams make_seed(const SpectrumScan& scan) {
  scan.validate();
  const auto [mn_it, mx_it] =
      std::minmax_element(scan.transmission.begin(), scan.transmission.end());
  const double span_y = *mx_it - *mn_it;
  const double window = scan.frequency.back() - scan.frequency.front();

  auto peaks = detect_resonances(scan, 0.5 * span_y);
  AiryParams seed;
  seed.baseline = *mn_it;
  if (peaks.empty()) {
    seed.center = scan.frequency[std::distance(scan.transmission.begin(), mx_it)];
    seed.amplitude = span_y;
    seed.fsr = window;
    seed.finesse = 10.0;
    return seed;
  }
  const auto tallest =
      std::max_element(peaks.begin(), peaks.end(),
                       [](const Resonance& a, const Resonance& b) { return a.height < b.height; });
  seed.center = tallest->center;
  seed.amplitude = tallest->height - seed.baseline;
  if (peaks.size() >= 2) {
    // Median spacing between adjacent detections.
    std::vector<double> gaps;
    for (size_t i = 1; i < peaks.size(); ++i) {
      gaps.push_back(peaks[i].center - peaks[i - 1].center);
    }
    seed.fsr = median_of(gaps);
  } else {
    seed.fsr = window;
  }
  const double fwhm = tallest->fwhm > 0.0 ? tallest->fwhm : window / 10.0;
  seed.finesse = std::max(seed.fsr / fwhm, 1.0);
  return seed;
}

AiryFit fit_airy(const SpectrumScan& scan, const AiryParams& seed) {
  scan.validate();
  if (!(seed.finesse > 0.0) || !(seed.fsr > 0.0)) {
    throw ValidationError("fit_airy: seed finesse and FSR must be positive");
  }
  const int n = static_cast<int>(scan.frequency.size());
  if (n <= kNumParams) {
    throw ValidationError("fit_airy: more parameters than samples");
  }

  std::vector<double> weight(n, 1.0);
  if (!scan.sigma.empty()) {
    for (int i = 0; i < n; ++i) {
      if (!(scan.sigma[i] > 0.0)) {
        throw ValidationError("fit_airy: non-positive sigma in weight column");
      }
      weight[i] = 1.0 / scan.sigma[i];
    }
  }

  auto chi2_of = [&](const AiryParams& p) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = weight[i] * (scan.transmission[i] - airy_model(p, scan.frequency[i]));
      acc += r * r;
    }
    return acc;
  };

  Vec5 p = to_internal(seed);
  double chi2 = chi2_of(from_internal(p));
  std::vector<double> history{std::sqrt(chi2 / n)};

  double lambda = 1e-3;
  int iterations = 0;
  bool converged = false;

  for (int iter = 0; iter < 200; ++iter) {
    const AiryParams cur = from_internal(p);

    Mat5 jtj = Mat5::Zero();
    Vec5 jtr = Vec5::Zero();
    for (int i = 0; i < n; ++i) {
      const auto row_ext = airy_jacobian_row(cur, scan.frequency[i]);
      Vec5 row;
      // Chain rule to the internal (log F, log FSR) parameterization.
      row(0) = row_ext[0] * cur.finesse;
      row(1) = row_ext[1] * cur.fsr;
      row(2) = row_ext[2];
      row(3) = row_ext[3];
      row(4) = row_ext[4];
      row *= weight[i];
      const double r = weight[i] * (scan.transmission[i] - airy_model(cur, scan.frequency[i]));
      jtj += row * row.transpose();
      jtr += row * r;
    }

    bool accepted = false;
    Vec5 step = Vec5::Zero();
    for (int inner = 0; inner < 60; ++inner) {
      Mat5 damped = jtj;
      for (int d = 0; d < kNumParams; ++d) {
        damped(d, d) += lambda * std::max(jtj(d, d), 1e-300);
      }
      step = damped.ldlt().solve(jtr);
      const Vec5 trial = p + step;
      const double trial_chi2 = chi2_of(from_internal(trial));
      if (std::isfinite(trial_chi2) && trial_chi2 <= chi2) {
        p = trial;
        chi2 = trial_chi2;
        lambda = std::max(lambda / 3.0, 1e-14);
        accepted = true;
        break;
      }
      lambda = std::min(lambda * 4.0, 1e14);
    }
    ++iterations;
    history.push_back(std::sqrt(chi2 / n));
    if (!accepted) {
      // No damping level can decrease chi^2 any further: a numerical
      // stationary point. That is convergence, not failure.
      converged = true;
      break;
    }

    double rel_step = 0.0;
    for (int d = 0; d < kNumParams; ++d) {
      rel_step = std::max(rel_step, std::abs(step(d)) / (std::abs(p(d)) + 1.0));
    }
    if (rel_step < 1e-10) {
      converged = true;
      break;
    }
  }

  const AiryParams sol = from_internal(p);
  const bool finite = std::isfinite(sol.finesse) && std::isfinite(sol.fsr) &&
                      std::isfinite(sol.center) && std::isfinite(sol.amplitude) &&
                      std::isfinite(sol.baseline);
  if (!converged || !finite) {
    std::vector<double> last = {sol.finesse, sol.fsr, sol.center, sol.amplitude, sol.baseline};
    throw FitFailure(finite ? "fit_airy: no convergence within 200 iterations"
                            : "fit_airy: iterate left the finite domain",
                     last, history);
  }

  AiryFit fit;
  fit.finesse = sol.finesse;
  fit.fsr = sol.fsr;
  fit.amplitude = sol.amplitude;
  fit.baseline = sol.baseline;
  fit.n_iterations = iterations;
  fit.residual_rms = std::sqrt(chi2 / n);

  // The model is FSR-periodic in the center; report the representative
  // closest to the middle of the scan window.
  const double mid = 0.5 * (scan.frequency.front() + scan.frequency.back());
  fit.center = sol.center + sol.fsr * std::round((mid - sol.center) / sol.fsr);

  // Covariance in external parameters: s^2 (J^T W J)^-1 with the residual
  // variance estimate s^2 = chi2 / (n - 5).
  Mat5 jtj_ext = Mat5::Zero();
  AiryParams at = fit.params();
  for (int i = 0; i < n; ++i) {
    const auto row_ext = airy_jacobian_row(at, scan.frequency[i]);
    Vec5 row;
    for (int d = 0; d < kNumParams; ++d) row(d) = row_ext[d];
    row *= weight[i];
    jtj_ext += row * row.transpose();
  }
  const double s2 = chi2 / (n - kNumParams);
  const Mat5 cov = s2 * jtj_ext.ldlt().solve(Mat5::Identity());
  for (int i = 0; i < kNumParams; ++i) {
    for (int j = 0; j < kNumParams; ++j) {
      fit.covariance[i][j] = 0.5 * (cov(i, j) + cov(j, i));
    }
  }
  return fit;
}

FinesseCurve finesse_vs_frequency(const std::vector<AiryFit>& fits, double bin_width) {
  if (!(bin_width > 0.0)) {
    throw ValidationError("finesse_vs_frequency: bin width must be positive");
  }
  FinesseCurve curve;
  if (fits.empty()) return curve;

  // Bin index -> members.
  std::vector<std::pair<long long, const AiryFit*>> keyed;
  keyed.reserve(fits.size());
  for (const auto& f : fits) {
    keyed.emplace_back(static_cast<long long>(std::floor(f.center / bin_width)), &f);
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  size_t i = 0;
  while (i < keyed.size()) {
    size_t j = i;
    while (j < keyed.size() && keyed[j].first == keyed[i].first) ++j;
    const size_t m = j - i;

    double mean_f = 0.0, mean_t = 0.0;
    for (size_t k = i; k < j; ++k) {
      mean_f += keyed[k].second->finesse;
      mean_t += keyed[k].second->amplitude + keyed[k].second->baseline;
    }
    mean_f /= m;
    mean_t /= m;

    double se = 0.0;
    if (m > 1) {
      double var = 0.0;
      for (size_t k = i; k < j; ++k) {
        const double d = keyed[k].second->finesse - mean_f;
        var += d * d;
      }
      var /= (m - 1);
      se = std::sqrt(var / m);
    }

    FinessePoint pt;
    pt.center = (keyed[i].first + 0.5) * bin_width;
    pt.mean_finesse = mean_f;
    pt.standard_error = se;
    pt.mean_peak_transmission = mean_t;
    pt.n_fits = static_cast<int>(m);
    curve.points.push_back(pt);
    i = j;
  }
  return curve;
}

PeakReport extract_peak_report(const FinesseCurve& curve, double fsr) {
  if (curve.points.empty()) {
    throw ValidationError("extract_peak_report: empty finesse curve");
  }
  if (!(fsr > 0.0)) {
    throw ValidationError("extract_peak_report: FSR must be positive");
  }
  // Maximum; ties resolved toward the lower frequency (points are ordered).
  const FinessePoint* best = &curve.points.front();
  for (const auto& p : curve.points) {
    if (p.mean_finesse > best->mean_finesse) best = &p;
  }
  PeakReport rep;
  rep.nu_c = best->center;
  rep.f_max = best->mean_finesse;
  rep.lambda_c = constants::speed_of_light / best->center;
  rep.lambda_c_uncertainty = rep.lambda_c * fsr / best->center;
  rep.q = cavity::q_factor(best->mean_finesse, fsr, best->center);
  return rep;
}

}  // namespace nfres::specfit
