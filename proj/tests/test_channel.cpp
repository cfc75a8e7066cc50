#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "leofl/channel.hpp"

using namespace leofl::channel;

namespace {

// Independent evaluation of the Gaussian-beam misalignment loss, written out
// term by term from the beam-optics definitions.
double pointing_oracle(double z, double f, double alpha, double w0, double a) {
  const double lambda = kLightSpeed / f;
  const double wz = lambda * z / (std::numbers::pi * w0);
  const double v = std::sqrt(std::numbers::pi) * a / (std::sqrt(2.0) * wz);
  const double weq2 = wz * wz * std::sqrt(std::numbers::pi) * std::erf(v) / (2.0 * v * std::exp(-v * v));
  const double r = z * std::tan(alpha);
  return std::exp(-2.0 * r * r / weq2);
}

LinkBudget budget_20dbm() { return LinkBudget::from_apertures(dbm_to_watts(20.0), 0.2, 0.5); }

}  // namespace

TEST_CASE("pointing loss is one at perfect alignment") {
  PointingModel pm;
  CHECK(pointing_loss(pm, 5e5, 97e9, 0.0) == 1.0);
}

TEST_CASE("pointing loss vanishes at a gross misalignment") {
  PointingModel pm;
  CHECK(pointing_loss(pm, 5e5, 97e9, std::numbers::pi / 4) < 1e-12);
}

TEST_CASE("pointing loss matches the beam-optics oracle") {
  PointingModel pm;
  for (double alpha : {1e-7, 1e-6, 1e-5, 1e-4}) {
    for (double z : {1e5, 5e5, 1.5e6}) {
      const double expect = pointing_oracle(z, 97e9, alpha, pm.beam_waist_tx, pm.rx_aperture_radius);
      CHECK(pointing_loss(pm, z, 97e9, alpha) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("pointing loss is nonincreasing in angle and within (0, 1]") {
  PointingModel pm;
  double prev = 1.0;
  for (int k = 1; k <= 40; ++k) {
    const double h = pointing_loss(pm, 5e5, 97e9, k * 2e-6);
    CHECK(h > 0.0);
    CHECK(h <= prev);
    prev = h;
  }
}

TEST_CASE("pointing loss rejects nonpositive distance") {
  PointingModel pm;
  CHECK_THROWS_AS(pointing_loss(pm, 0.0, 97e9, 1e-6), std::invalid_argument);
}

TEST_CASE("absorption examples") {
  AbsorptionModel am;
  am.set_table(PathClass::space_air, {{90e9, 0.001}, {105e9, 0.001}});
  CHECK(absorption(am, 97e9, 0.0, PathClass::space_air) == 1.0);
  CHECK(absorption(am, 97e9, 1000.0, PathClass::space_air) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("absorption is multiplicative in path length") {
  const AbsorptionModel am = AbsorptionModel::builtin();
  for (auto c : {PathClass::space_air, PathClass::air_ground}) {
    const double a = absorption(am, 96e9, 120.0, c);
    const double b = absorption(am, 96e9, 380.0, c);
    CHECK(absorption(am, 96e9, 500.0, c) == doctest::Approx(a * b).epsilon(1e-12));
    CHECK(a >= 1.0);
  }
}

TEST_CASE("absorption rejects negative length and out-of-table frequency") {
  const AbsorptionModel am = AbsorptionModel::builtin();
  CHECK_THROWS_AS(absorption(am, 97e9, -1.0, PathClass::space_air), std::invalid_argument);
  CHECK_THROWS_AS(absorption(am, 200e9, 1.0, PathClass::space_air), std::out_of_range);
  AbsorptionModel empty;
  CHECK_THROWS_AS(empty.coefficient(97e9, PathClass::air_ground), std::out_of_range);
}

TEST_CASE("absorption coefficient interpolates linearly") {
  AbsorptionModel am;
  am.set_table(PathClass::air_ground, {{100e9, 0.3}, {90e9, 0.1}});
  CHECK(am.coefficient(95e9, PathClass::air_ground) == doctest::Approx(0.2));
  CHECK(am.coefficient(90e9, PathClass::air_ground) == doctest::Approx(0.1));
  CHECK(am.coefficient(100e9, PathClass::air_ground) == doctest::Approx(0.3));
}

TEST_CASE("absorption table parsing") {
  std::istringstream in("# f kappa\n94e9, 0.01\n\n100e9 0.02 # trailing\n");
  const auto t = AbsorptionModel::load_table(in);
  REQUIRE(t.size() == 2);
  CHECK(t[1].first == 100e9);
  CHECK(t[1].second == 0.02);
  std::istringstream bad("94e9\n");
  CHECK_THROWS_AS(AbsorptionModel::load_table(bad), std::invalid_argument);
  std::istringstream blank("# nothing\n");
  CHECK_THROWS_AS(AbsorptionModel::load_table(blank), std::invalid_argument);
  AbsorptionModel am;
  CHECK_THROWS_AS(am.set_table(PathClass::space_air, {{94e9, -1.0}}), std::invalid_argument);
  CHECK_THROWS(AbsorptionModel::load_table_file("/nonexistent/table.txt"));
}

TEST_CASE("noise density example and linearity in temperature") {
  CHECK(noise_density(220.0, 10.0) == doctest::Approx(3.0374278e-20).epsilon(1e-6));
  CHECK(noise_density(440.0, 10.0) == doctest::Approx(2.0 * noise_density(220.0, 10.0)));
  CHECK_THROWS_AS(noise_density(0.0, 10.0), std::invalid_argument);
}

TEST_CASE("capacity at 20 dBm is in the expected range") {
  const LinkBudget lb = budget_20dbm();
  const AbsorptionModel am = AbsorptionModel::builtin();
  PointingModel pm;
  const double c100 = capacity(lb, am, pm, 100e3);
  const double c1500 = capacity(lb, am, pm, 1500e3);
  CHECK(c100 > 1e10);
  CHECK(c1500 > 1e9);
  CHECK(c100 > c1500);
}

TEST_CASE("capacity is monotone in distance, power and gain") {
  const AbsorptionModel am = AbsorptionModel::builtin();
  PointingModel pm;
  LinkBudget lb = budget_20dbm();
  double prev = capacity(lb, am, pm, 50e3);
  for (double d = 100e3; d <= 2000e3; d += 100e3) {
    const double c = capacity(lb, am, pm, d);
    CHECK(c < prev);
    prev = c;
  }
  prev = 0.0;
  for (double p : {0.0, 10.0, 20.0, 30.0, 40.0}) {
    lb.set_flat_power(dbm_to_watts(p));
    const double c = capacity(lb, am, pm, 800e3);
    CHECK(c > prev);
    prev = c;
  }
  LinkBudget g = budget_20dbm();
  const double base = capacity(g, am, pm, 800e3);
  g.rx_gain *= 2.0;
  CHECK(capacity(g, am, pm, 800e3) > base);
}

TEST_CASE("capacity quadrature is converged at 64 sub-bands") {
  const AbsorptionModel am = AbsorptionModel::builtin();
  PointingModel pm;
  LinkBudget lb = budget_20dbm();
  const double c64 = capacity(lb, am, pm, 700e3);
  lb.sub_bands = 128;
  const double c128 = capacity(lb, am, pm, 700e3);
  CHECK(std::abs(c128 - c64) / c64 < 1e-3);
}

TEST_CASE("capacity with zero PSD is zero") {
  const AbsorptionModel am = AbsorptionModel::builtin();
  PointingModel pm;
  LinkBudget lb = budget_20dbm();
  lb.set_flat_power(0.0);
  CHECK(capacity(lb, am, pm, 700e3) == 0.0);
  CHECK_THROWS_AS(capacity(lb, am, pm, 0.0), std::invalid_argument);
}

TEST_CASE("capacity stays below the noiseless pointing-free bound") {
  // Dropping absorption and misalignment can only raise the rate.
  AbsorptionModel clear;
  clear.set_table(PathClass::space_air, {{90e9, 0.0}, {105e9, 0.0}});
  PointingModel pm;
  const LinkBudget lb = budget_20dbm();
  const double lossy = capacity(lb, AbsorptionModel::builtin(), pm, 900e3);
  const double ideal = capacity(lb, clear, pm, 900e3, {PathClass::space_air, 0.0});
  CHECK(lossy <= ideal);
}

TEST_CASE("per-satellite rate and latency examples") {
  CHECK(per_satellite_rate(38e9, 200) == doctest::Approx(190e6));
  CHECK_THROWS_AS(per_satellite_rate(38e9, 0), std::invalid_argument);
  CHECK(transmission_latency(2.6e6, 100e6) == doctest::Approx(0.208));
  CHECK(transmission_latency(548e6, 10e6) == doctest::Approx(438.4));
  CHECK(transmission_latency(0.0, 10e6) == 0.0);
  CHECK_THROWS_AS(transmission_latency(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("dBm conversion") {
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watts(20.0) == doctest::Approx(0.1));
}

TEST_CASE("capacity csv header") {
  std::ostringstream os;
  write_capacity_csv(os, {{20.0, 1e5, 3e10, 1.5e8, 0.1}});
  CHECK(os.str().rfind("# schema:", 0) == 0);
}
