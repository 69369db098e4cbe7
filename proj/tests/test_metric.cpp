#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "curzon/metric.hpp"
#include "oracles.hpp"

using namespace curzon;
using Catch::Approx;

TEST_CASE("psi: point values and limits") {
  CHECK(psi({1.0, 0.0}) == Approx(-1.0));
  CHECK(psi({3.0, 4.0}) == Approx(-0.2));
  // on-axis closed limit
  const MetricParams m2{2.0, GammaMode::standard};
  CHECK(psi({0.0, -4.0}, m2) == Approx(-0.5));
  CHECK(psi({1e9, 0.0}) == Approx(0.0).margin(1e-8));
  CHECK(psi({0.5, 0.5}) < 0.0);
}

TEST_CASE("psi: domain errors near the singularity") {
  CHECK_THROWS_AS(psi({0.0, 0.0}), domain_error);
  CHECK_THROWS_AS(psi({1e-9, 0.0}), domain_error);
  CHECK_THROWS_AS(grad_psi({0.0, 1e-10}), domain_error);
}

TEST_CASE("grad_psi: closed values and symmetry") {
  const Grad2 g = grad_psi({3.0, 4.0});
  CHECK(g.d_rho == Approx(0.024));
  CHECK(g.d_z == Approx(0.032));
  const Grad2 on_plane = grad_psi({2.5, 0.0});
  CHECK(on_plane.d_rho == Approx(1.0 / (2.5 * 2.5)));
  CHECK(on_plane.d_z == 0.0);
}

TEST_CASE("grad_psi and grad_gamma match finite differences") {
  const MetricParams params{1.0, GammaMode::standard};
  const MetricParams paper{1.0, GammaMode::paper};
  auto psi_fn = [&](double r, double z) { return psi({r, z}, params); };
  auto gam_fn = [&](double r, double z) { return gamma_fn({r, z}, params); };
  auto gam_fn_p = [&](double r, double z) { return gamma_fn({r, z}, paper); };
  for (const auto& pt : oracles::sample_domain(1000, 7251)) {
    const auto fd_p = oracles::fd_grad(psi_fn, pt.rho, pt.z);
    const Grad2 an_p = grad_psi({pt.rho, pt.z}, params);
    CHECK(oracles::rel_err(an_p.d_rho, fd_p[0]) < 1e-6);
    if (std::abs(fd_p[1]) > 1e-12) CHECK(oracles::rel_err(an_p.d_z, fd_p[1]) < 1e-6);

    const auto fd_g = oracles::fd_grad(gam_fn, pt.rho, pt.z);
    const Grad2 an_g = grad_gamma({pt.rho, pt.z}, params);
    CHECK(std::abs(an_g.d_rho - fd_g[0]) < 1e-6 * std::max(1.0, std::abs(fd_g[0])));
    CHECK(std::abs(an_g.d_z - fd_g[1]) < 1e-6 * std::max(1.0, std::abs(fd_g[1])));

    const auto fd_g4 = oracles::fd_grad(gam_fn_p, pt.rho, pt.z);
    const Grad2 an_g4 = grad_gamma({pt.rho, pt.z}, paper);
    CHECK(std::abs(an_g4.d_rho - fd_g4[0]) < 1e-6 * std::max(1.0, std::abs(fd_g4[0])));
    CHECK(std::abs(an_g4.d_z - fd_g4[1]) < 1e-6 * std::max(1.0, std::abs(fd_g4[1])));
  }
}

TEST_CASE("gamma_fn: both variants at closed points") {
  const MetricParams std_mode{1.0, GammaMode::standard};
  const MetricParams paper_mode{1.0, GammaMode::paper};
  CHECK(gamma_fn({1.0, 0.0}, std_mode) == Approx(-0.5));
  CHECK(gamma_fn({1.0, 0.0}, paper_mode) == Approx(-0.5));
  CHECK(gamma_fn({2.0, 0.0}, std_mode) == Approx(-0.125));
  CHECK(gamma_fn({2.0, 0.0}, paper_mode) == Approx(-0.0078125));
  CHECK(gamma_fn({0.0, 5.0}, std_mode) == 0.0);
  CHECK(gamma_fn({0.0, 5.0}, paper_mode) == 0.0);
  CHECK_THROWS_AS(gamma_fn({0.0, 0.0}, std_mode), domain_error);
}

TEST_CASE("gamma_fn: variants coincide on the unit circle") {
  const MetricParams std_mode{1.3, GammaMode::standard};
  const MetricParams paper_mode{1.3, GammaMode::paper};
  for (double phi = 0.1; phi < 1.5; phi += 0.2) {
    const FieldPoint pt{std::cos(phi), std::sin(phi)};
    CHECK(gamma_fn(pt, std_mode) == Approx(gamma_fn(pt, paper_mode)).epsilon(1e-14));
  }
}

TEST_CASE("omega: value, asymptotics, and the defining identity") {
  CHECK(omega({1.0, 0.0}) == Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(omega({1e8, 0.0}) == Approx(1.0).margin(1e-7));
  for (const auto& pt : oracles::sample_domain(100, 99)) {
    const FieldPoint p{pt.rho, pt.z};
    CHECK(std::abs(std::log(omega(p)) - (psi(p) - gamma_fn(p))) < 1e-14);
  }
}

TEST_CASE("laplace_residual: psi is harmonic, non-harmonic control is not") {
  CHECK(std::abs(laplace_residual({1.3, 0.7})) < 1e-10);
  CHECK(std::abs(laplace_residual({10.0, -2.0})) < 1e-10);
  // FD-laplacian oracle agrees that psi is harmonic...
  auto psi_fn = [](double r, double z) { return psi({r, z}); };
  CHECK(std::abs(oracles::fd_cyl_laplacian(psi_fn, 1.3, 0.7)) < 1e-5);
  // ...and flags a non-harmonic test function
  auto rho_sq = [](double r, double) { return r * r; };
  CHECK(oracles::fd_cyl_laplacian(rho_sq, 1.3, 0.7) == Approx(4.0).epsilon(1e-6));
  CHECK_THROWS_AS(laplace_residual({0.0, 1.0}), domain_error);
}

TEST_CASE("weyl_residuals: standard gamma with minus sign closes the equations") {
  const MetricParams std_mode{1.0, GammaMode::standard};
  const MetricParams paper_mode{1.0, GammaMode::paper};
  const FieldPoint pt{1.1, 0.4};

  const WeylResiduals ok = weyl_residuals(pt, std_mode, SignMode::standard_minus);
  CHECK(std::abs(ok.r_rho) < 1e-10);
  CHECK(std::abs(ok.r_z) < 1e-10);

  const WeylResiduals bad = weyl_residuals(pt, paper_mode, SignMode::paper_plus);
  CHECK(std::max(std::abs(bad.r_rho), std::abs(bad.r_z)) > 1e-3);

  // FD oracle: recompute gamma_,rho - rhs from finite differences of gamma
  auto gam = [&](double r, double z) { return gamma_fn({r, z}, std_mode); };
  const auto fd = oracles::fd_grad(gam, pt.rho, pt.z);
  const Grad2 dpsi = grad_psi(pt, std_mode);
  const double rhs_rho = pt.rho * (dpsi.d_rho * dpsi.d_rho - dpsi.d_z * dpsi.d_z);
  const double rhs_z = 2.0 * pt.rho * dpsi.d_rho * dpsi.d_z;
  CHECK(std::abs(fd[0] - rhs_rho) < 1e-8);
  CHECK(std::abs(fd[1] - rhs_z) < 1e-8);
}

TEST_CASE("weyl_residuals: r_z vanishes on the equatorial plane in every mode") {
  for (const GammaMode gm : {GammaMode::standard, GammaMode::paper})
    for (const SignMode sm : {SignMode::standard_minus, SignMode::paper_plus}) {
      const WeylResiduals res = weyl_residuals({1.7, 0.0}, {1.0, gm}, sm);
      CHECK(res.r_z == 0.0);
    }
}

TEST_CASE("reflection symmetry z -> -z is exact") {
  for (const auto& pt : oracles::sample_domain(200, 4242)) {
    const FieldPoint a{pt.rho, pt.z};
    const FieldPoint b{pt.rho, -pt.z};
    CHECK(psi(a) == psi(b));
    CHECK(gamma_fn(a) == gamma_fn(b));
    CHECK(omega(a) == omega(b));
  }
}

TEST_CASE("axis regularity: gamma and its rho-derivative vanish as rho -> 0") {
  for (const double z : {0.5, 1.0, -2.0}) {
    CHECK(std::abs(gamma_fn({1e-6, z})) < 1e-11);
    CHECK(std::abs(grad_gamma({1e-6, z}).d_rho) < 1e-5);
    CHECK(std::abs(gamma_fn({1e-6, z}, {1.0, GammaMode::paper})) < 1e-11);
    CHECK(std::abs(grad_gamma({1e-6, z}, {1.0, GammaMode::paper}).d_rho) < 1e-5);
  }
}

TEST_CASE("laplace_residual stays below 1e-10 across the sample box") {
  for (const auto& pt : oracles::sample_domain(1000, 1337))
    CHECK(std::abs(laplace_residual({pt.rho, pt.z})) < 1e-10);
}
