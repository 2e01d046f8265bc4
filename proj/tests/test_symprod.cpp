#include "bergman/symprod.hpp"

#include <cmath>
#include <string>

#include "doctest.h"
#include "support/oracles.hpp"

using namespace bergman;

namespace {

constexpr double kBolzaSystole = 3.0571418389619963;
const HPoint kCenter(0.0, 1.0);

const ElementSet& bolza_ball() {
  static const ElementSet set = enumerate_elements(
      bolza_group(), 10, PruneSpec{kCenter, 9.0});
  return set;
}

const ElementSet& identity_only() {
  static const ElementSet set = enumerate_elements(bolza_group(), 0);
  return set;
}

}  // namespace

TEST_CASE("sym points are unordered multisets") {
  const SymPoint a({HPoint(0.0, 1.0), HPoint(0.0, 2.0)});
  const SymPoint b({HPoint(0.0, 2.0), HPoint(0.0, 1.0)});
  REQUIRE(a.degree() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(a.points()[i].x() == b.points()[i].x());
    CHECK(a.points()[i].y() == b.points()[i].y());
  }
  CHECK_THROWS_AS(SymPoint({}), ValidationError);
}

TEST_CASE("hyperbolic volume density on the symmetric product") {
  CHECK(symd_hyp_volume_density(SymPoint({kCenter})) == 1.0);
  CHECK(symd_hyp_volume_density(SymPoint({kCenter, HPoint(0.0, 2.0)})) ==
        doctest::Approx(0.25).epsilon(1e-15));
  // Permutation invariance is exact after canonical sorting.
  CHECK(symd_hyp_volume_density(SymPoint({HPoint(1.0, 0.5), HPoint(-1.0, 2.0)})) ==
        symd_hyp_volume_density(SymPoint({HPoint(-1.0, 2.0), HPoint(1.0, 0.5)})));
}

TEST_CASE("fs volume estimate") {
  // Identity-only kernel: every factor's Bergman metric vanishes.
  const SymdVolumeEstimate zero =
      symd_fs_volume_estimate(SymPoint({kCenter, HPoint(0.0, 2.0)}), 8,
                              identity_only(), 2);
  CHECK(std::abs(zero.value) <= 1e-12);
  CHECK(zero.caveat == std::string(kSymdCaveat));
  CHECK_FALSE(zero.caveat.empty());

  // d = 1 reduces to the single-factor metric ratio over y^2.
  const SymdVolumeEstimate single =
      symd_fs_volume_estimate(SymPoint({kCenter}), 8, bolza_ball(), 2);
  const double ratio = ratio_ber_hyp(kCenter, 8, bolza_ball());
  CHECK(single.value ==
        doctest::Approx(ratio / (kCenter.y() * kCenter.y())).epsilon(1e-14));

  // d = 2 at (i, 2i): product of the independently computed factors.
  const HPoint z2(0.0, 2.0);
  const SymdVolumeEstimate pair =
      symd_fs_volume_estimate(SymPoint({kCenter, z2}), 8, bolza_ball(), 2);
  const double f1 = bergman_metric_density(kCenter, 8, bolza_ball()) * 1.0;
  const double f2 = bergman_metric_density(z2, 8, bolza_ball()) * 4.0;
  CHECK(pair.value ==
        doctest::Approx(f1 * f2 * 0.25).epsilon(1e-13));

  // Dimension condition violation names k.
  try {
    symd_fs_volume_estimate(SymPoint({kCenter, z2, HPoint(1.0, 1.0),
                                      HPoint(-1.0, 1.0)}),
                            3, bolza_ball(), 2);
    FAIL("expected dims violation");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("k = 3") != std::string::npos);
  }
}

TEST_CASE("theorem 2 product bound") {
  // d = 1: bit-for-bit the theorem 1 right-hand side.
  const Theorem2Bound t2 =
      theorem2_rhs(SymPoint({kCenter}), 6, bolza_ball(), kBolzaSystole, 2);
  const double bkx = bergman_kernel_X(kCenter, 6, bolza_ball()).value.real();
  const double t1 = theorem1_rhs(6, constant_CX(6, kBolzaSystole), bkx);
  CHECK(t2.value == t1);  // exact: same computation path
  CHECK(t2.caveat == std::string(kSymdCaveat));

  // Two equal factors square the single bound.
  const Theorem2Bound sq = theorem2_rhs(SymPoint({kCenter, kCenter}), 6,
                                        bolza_ball(), kBolzaSystole, 2);
  CHECK(sq.value == doctest::Approx(t1 * t1).epsilon(1e-14));

  // Permutation invariance.
  const SymPoint p1({HPoint(0.3, 1.1), HPoint(-0.4, 0.8)});
  const SymPoint p2({HPoint(-0.4, 0.8), HPoint(0.3, 1.1)});
  CHECK(theorem2_rhs(p1, 6, bolza_ball(), kBolzaSystole, 2).value ==
        theorem2_rhs(p2, 6, bolza_ball(), kBolzaSystole, 2).value);
}

TEST_CASE("corollary 2 scan") {
  CHECK(corollary2_bound(2) == doctest::Approx(68.49312014222033).epsilon(1e-14));

  const auto id_provider = [](int) -> const ElementSet& {
    return identity_only();
  };
  for (const auto& row : corollary2_scan(SymPoint({kCenter, HPoint(0.0, 2.0)}),
                                         {8, 12}, id_provider, 2)) {
    CHECK(row.value <= 1e-12);
    CHECK(row.below);
  }

  const auto provider = [](int) -> const ElementSet& { return bolza_ball(); };
  // d = 1 reduces to the corollary 1 scan values.
  const auto rows1 =
      corollary2_scan(SymPoint({kCenter}), {8, 12}, provider, 2);
  const auto cor1 = corollary1_scan(kCenter, {8, 12}, provider);
  REQUIRE(rows1.size() == cor1.size());
  for (std::size_t i = 0; i < rows1.size(); ++i) {
    CHECK(rows1[i].value == doctest::Approx(cor1[i].value).epsilon(1e-12));
    CHECK(rows1[i].bound == doctest::Approx(cor1[i].bound).epsilon(1e-15));
  }

  // d = 2 on the Bolza ball: below (26/pi)^2 at large k.
  const auto rows2 = corollary2_scan(SymPoint({kCenter, HPoint(0.0, 2.0)}),
                                     {16, 20, 24}, provider, 2);
  for (const auto& row : rows2) {
    CHECK(row.below);
    CHECK(row.bound == doctest::Approx(corollary2_bound(2)).epsilon(1e-15));
  }
}
