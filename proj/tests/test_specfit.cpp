#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nfres/constants.hpp"
#include "nfres/errors.hpp"
#include "nfres/specfit.hpp"
#include "nfres/spectrum.hpp"

using namespace nfres;
using namespace nfres::specfit;

namespace {

const double kNuC = constants::speed_of_light / 851.8944e-9;

AiryParams paper_params() {
  AiryParams p;
  p.finesse = 29.4;
  p.fsr = 1.05e9;
  p.center = kNuC;
  p.amplitude = 0.131;
  p.baseline = 0.0004;
  return p;
}

SpectrumScan synthetic_scan(const AiryParams& p, int n, double noise_sigma, uint64_t seed,
                            double span_fsr = 2.0) {
  SpectrumScan scan;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double lo = p.center - 0.5 * span_fsr * p.fsr;
  const double hi = p.center + 0.5 * span_fsr * p.fsr;
  for (int i = 0; i < n; ++i) {
    const double nu = lo + (hi - lo) * i / (n - 1);
    double t = airy_model(p, nu);
    if (noise_sigma > 0.0) t += noise_sigma * gauss(rng);
    scan.frequency.push_back(nu);
    scan.transmission.push_back(std::max(t, 0.0));
  }
  scan.label = "synthetic";
  return scan;
}

}  // namespace

TEST_CASE("off-band normalization") {
  SUBCASE("constant trace becomes all ones") {
    SpectrumScan scan;
    for (int i = 0; i < 32; ++i) {
      scan.frequency.push_back(1e14 + i * 1e6);
      scan.transmission.push_back(2.0);
    }
    const auto out = normalize_off_band(scan, 1e14, 1e14 + 31e6);
    for (double t : out.transmission) CHECK(t == 1.0);
    CHECK(out.normalization == SpectrumScan::Normalization::off_band_normalized);
  }
  SUBCASE("peak 0.07 over baseline 0.5 normalizes to 0.14") {
    SpectrumScan scan;
    for (int i = 0; i < 64; ++i) {
      scan.frequency.push_back(1e14 + i * 1e6);
      scan.transmission.push_back(i == 40 ? 0.07 : 0.5);
    }
    const auto out = normalize_off_band(scan, 1e14, 1e14 + 20e6);
    CHECK(out.transmission[40] == doctest::Approx(0.14).epsilon(1e-12));
  }
  SUBCASE("degenerate baseline") {
    SpectrumScan scan;
    for (int i = 0; i < 32; ++i) {
      scan.frequency.push_back(1e14 + i * 1e6);
      scan.transmission.push_back(0.0);
    }
    CHECK_THROWS_AS(normalize_off_band(scan, 1e14, 1e14 + 31e6), ValidationError);
  }
  SUBCASE("window without samples") {
    SpectrumScan scan;
    for (int i = 0; i < 32; ++i) {
      scan.frequency.push_back(1e14 + i * 1e6);
      scan.transmission.push_back(1.0);
    }
    CHECK_THROWS_AS(normalize_off_band(scan, 2e14, 3e14), ValidationError);
    CHECK_THROWS_AS(normalize_off_band(scan, 2e14, 1e14), ValidationError);
  }
}

TEST_CASE("resonance detection") {
  const auto p = paper_params();

  SUBCASE("single noiseless peak recovered within one sample step") {
    auto scan = synthetic_scan(p, 801, 0.0, 0, 0.9);
    const auto peaks = detect_resonances(scan, 0.05);
    REQUIRE(peaks.size() == 1);
    const double step = scan.frequency[1] - scan.frequency[0];
    CHECK(std::abs(peaks[0].center - p.center) <= step);
    // FWHM of the Airy peak is FSR / finesse.
    CHECK(peaks[0].fwhm == doctest::Approx(p.fsr / p.finesse).epsilon(0.05));
  }
  SUBCASE("comb spacing equals the FSR") {
    auto scan = synthetic_scan(p, 2001, 0.0, 0, 2.6);
    const auto peaks = detect_resonances(scan, 0.05);
    REQUIRE(peaks.size() >= 2);
    const double step = scan.frequency[1] - scan.frequency[0];
    for (size_t i = 1; i < peaks.size(); ++i) {
      CHECK(std::abs(peaks[i].center - peaks[i - 1].center - p.fsr) <= step);
    }
  }
  SUBCASE("flat trace yields nothing") {
    SpectrumScan scan;
    for (int i = 0; i < 64; ++i) {
      scan.frequency.push_back(1e14 + i * 1e6);
      scan.transmission.push_back(0.4);
    }
    CHECK(detect_resonances(scan, 0.01).empty());
  }
}

TEST_CASE("Airy fit: noiseless roundtrip") {
  const auto truth = paper_params();
  auto scan = synthetic_scan(truth, 600, 0.0, 0);

  // Rough but realistic seed: the kind detect_resonances produces.
  AiryParams seed = truth;
  seed.finesse = 20.0;
  seed.fsr = 1.1e9;
  seed.center += 0.03e9;
  seed.amplitude = 0.2;
  seed.baseline = 0.01;

  const auto fit = fit_airy(scan, seed);
  CHECK(fit.finesse == doctest::Approx(truth.finesse).epsilon(1e-6));
  CHECK(fit.fsr == doctest::Approx(truth.fsr).epsilon(1e-8));
  CHECK(fit.center == doctest::Approx(truth.center).epsilon(1e-12));
  CHECK(fit.residual_rms < 1e-9);

  SUBCASE("seeding with the exact truth converges immediately") {
    const auto quick = fit_airy(scan, truth);
    CHECK(quick.n_iterations <= 2);
    CHECK(quick.finesse == doctest::Approx(truth.finesse).epsilon(1e-10));
  }
  SUBCASE("auto-seed also lands on the truth") {
    const auto fit2 = fit_airy(scan, make_seed(scan));
    CHECK(fit2.finesse == doctest::Approx(truth.finesse).epsilon(1e-6));
  }
}

TEST_CASE("Airy fit canonicalizes the center into the scan window") {
  const auto truth = paper_params();
  auto scan = synthetic_scan(truth, 600, 0.0, 0);
  AiryParams seed = truth;
  seed.center += 3.0 * truth.fsr;  // same model, shifted representative
  const auto fit = fit_airy(scan, seed);
  const double mid = 0.5 * (scan.frequency.front() + scan.frequency.back());
  CHECK(std::abs(fit.center - mid) <= 0.5 * fit.fsr);
  CHECK(fit.center == doctest::Approx(truth.center).epsilon(1e-10));
}

TEST_CASE("analytic Jacobian matches central finite differences") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    AiryParams p;
    p.finesse = 5.0 + 60.0 * u(rng);
    p.fsr = (0.5 + 2.0 * u(rng)) * 1e9;
    p.center = 3.5e14 + 1e9 * u(rng);
    p.amplitude = 0.05 + u(rng);
    p.baseline = 0.2 * u(rng);
    const double nu = p.center + (u(rng) - 0.5) * 1.5 * p.fsr;

    const auto analytic = airy_jacobian_row(p, nu);
    const std::array<double, 5> scales = {p.finesse, p.fsr, p.fsr, p.amplitude + 0.1, 1.0};
    double max_abs = 1e-12;
    for (double a : analytic) max_abs = std::max(max_abs, std::abs(a));
    for (int k = 0; k < kNumParams; ++k) {
      const double h = 3e-6 * scales[k];
      AiryParams lo = p, hi = p;
      auto bump = [&](AiryParams& q, double d) {
        switch (k) {
          case 0: q.finesse += d; break;
          case 1: q.fsr += d; break;
          case 2: q.center += d; break;
          case 3: q.amplitude += d; break;
          case 4: q.baseline += d; break;
        }
      };
      bump(lo, -h);
      bump(hi, +h);
      const double fd = (airy_model(hi, nu) - airy_model(lo, nu)) / (2.0 * h);
      CHECK(std::abs(analytic[k] - fd) <= 1e-5 * max_abs);
    }
  }
}

TEST_CASE("covariance shrinks like 1/N") {
  const auto truth = paper_params();
  std::vector<double> ns = {100, 1000, 10000};
  std::vector<double> var_f;
  for (double n : ns) {
    auto scan = synthetic_scan(truth, static_cast<int>(n), 0.01, 2024);
    const auto fit = fit_airy(scan, truth);
    var_f.push_back(fit.covariance[0][0]);
  }
  const double slope = (std::log(var_f[2]) - std::log(var_f[0])) /
                       (std::log(ns[2]) - std::log(ns[0]));
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.1));
  // Covariance stays symmetric positive on the diagonal.
  for (double v : var_f) CHECK(v > 0.0);
}

TEST_CASE("fit failure carries the iterate history") {
  // Absurd seed far outside the window with a hostile model surface.
  const auto truth = paper_params();
  auto scan = synthetic_scan(truth, 64, 0.0, 0);
  AiryParams seed;
  seed.finesse = 1e7;
  seed.fsr = 1e3;  // one sample step >> FSR: aliased, hopeless
  seed.center = truth.center;
  seed.amplitude = 1e-9;
  seed.baseline = 42.0;
  try {
    (void)fit_airy(scan, seed);
    // Converging to some local minimum is acceptable; nothing to assert.
  } catch (const FitFailure& f) {
    CHECK(f.last_parameters.size() == 5);
    CHECK(!f.residual_rms_history.empty());
  }
}

TEST_CASE("finesse curve aggregation") {
  auto make_fit = [](double f, double center) {
    AiryFit a;
    a.finesse = f;
    a.fsr = 1.05e9;
    a.center = center;
    a.amplitude = 0.12;
    a.baseline = 0.01;
    return a;
  };

  SUBCASE("degenerate ensemble") {
    std::vector<AiryFit> fits(5, make_fit(29.4, 3.519e14));
    const auto curve = finesse_vs_frequency(fits, 1e9);
    REQUIRE(curve.points.size() == 1);
    CHECK(curve.points[0].mean_finesse == doctest::Approx(29.4).epsilon(1e-14));
    CHECK(curve.points[0].standard_error == 0.0);
    CHECK(curve.points[0].mean_peak_transmission == doctest::Approx(0.13).epsilon(1e-12));
  }
  SUBCASE("hand arithmetic") {
    std::vector<AiryFit> fits = {make_fit(28, 3.519e14), make_fit(29, 3.519e14),
                                 make_fit(30, 3.519e14)};
    const auto curve = finesse_vs_frequency(fits, 1e9);
    REQUIRE(curve.points.size() == 1);
    CHECK(curve.points[0].mean_finesse == doctest::Approx(29.0).epsilon(1e-14));
    CHECK(curve.points[0].standard_error == doctest::Approx(0.577).epsilon(1e-3));
  }
  SUBCASE("bins are ordered and permutation-invariant") {
    std::vector<AiryFit> fits = {make_fit(10, 3.0e14), make_fit(20, 3.2e14),
                                 make_fit(30, 3.1e14)};
    const auto c1 = finesse_vs_frequency(fits, 1e12);
    std::swap(fits[0], fits[2]);
    const auto c2 = finesse_vs_frequency(fits, 1e12);
    REQUIRE(c1.points.size() == 3);
    REQUIRE(c2.points.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
      CHECK(c1.points[i].center == c2.points[i].center);
      CHECK(c1.points[i].mean_finesse == c2.points[i].mean_finesse);
      if (i > 0) CHECK(c1.points[i].center > c1.points[i - 1].center);
    }
  }
  SUBCASE("empty input") {
    CHECK(finesse_vs_frequency({}, 1e9).points.empty());
  }
}

TEST_CASE("peak report") {
  auto point = [](double nu, double f) {
    FinessePoint p;
    p.center = nu;
    p.mean_finesse = f;
    p.mean_peak_transmission = 0.13;
    p.n_fits = 3;
    return p;
  };

  SUBCASE("paper numbers") {
    FinesseCurve curve;
    curve.points = {point(351.80e12, 18.0), point(kNuC, 29.4), point(352.0e12, 22.0)};
    const auto rep = extract_peak_report(curve, 1.05e9);
    CHECK(rep.lambda_c * 1e9 == doctest::Approx(851.8944).epsilon(1e-9));
    CHECK(rep.f_max == 29.4);
    CHECK(rep.q == doctest::Approx(9.8536e6).epsilon(1e-4));
    // One FSR converted to wavelength.
    CHECK(rep.lambda_c_uncertainty * 1e9 == doctest::Approx(851.8944e-9 * 1.05e9 / kNuC * 1e9)
                                                .epsilon(1e-9));
  }
  SUBCASE("single point") {
    FinesseCurve curve;
    curve.points = {point(3.5e14, 12.0)};
    CHECK(extract_peak_report(curve, 1e9).f_max == 12.0);
  }
  SUBCASE("tie-break toward the lower frequency") {
    FinesseCurve curve;
    curve.points = {point(3.4e14, 30.0), point(3.5e14, 30.0)};
    CHECK(extract_peak_report(curve, 1e9).nu_c == 3.4e14);
  }
  SUBCASE("empty curve rejected") {
    CHECK_THROWS_AS(extract_peak_report({}, 1e9), ValidationError);
  }
}
