#include <cmath>

#include <doctest.h>

#include "belldice/correlators.hpp"
#include "belldice/error.hpp"

using namespace belldice;

namespace {

template <typename Fn>
ErrorKind thrown_kind(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a belldice::Error");
  return ErrorKind::kInvalidParameter;
}

}  // namespace

TEST_CASE("source validation rejects out-of-domain fields") {
  CHECK(thrown_kind([] { SourceParams{0.0, 1.0, 0.0}.validate(); }) ==
        ErrorKind::kInvalidSource);
  CHECK(thrown_kind([] { SourceParams{0.1, 0.0, 0.0}.validate(); }) ==
        ErrorKind::kInvalidSource);
  CHECK(thrown_kind([] { SourceParams{0.1, 1.1, 0.0}.validate(); }) ==
        ErrorKind::kInvalidSource);
  CHECK(thrown_kind([] { SourceParams{0.1, 1.0, 1.0}.validate(); }) ==
        ErrorKind::kInvalidSource);
  CHECK_NOTHROW(SourceParams{0.1, 1.0, 0.0}.validate());
}

TEST_CASE("settings validation rejects degenerate splitter and detector") {
  MeasurementSettings s;
  s.t = 0.0;
  CHECK(thrown_kind([&] { s.validate(); }) == ErrorKind::kInvalidParameter);
  s.t = 1.0;
  CHECK(thrown_kind([&] { s.validate(); }) == ErrorKind::kInvalidParameter);
  s.t = 0.5;
  s.eta = 0.0;
  CHECK(thrown_kind([&] { s.validate(); }) == ErrorKind::kInvalidParameter);
  s.eta = 1.0;
  s.alpha1 = INFINITY;
  CHECK(thrown_kind([&] { s.validate(); }) == ErrorKind::kInvalidParameter);
}

TEST_CASE("thermal-difference weights keep unit trace exactly") {
  for (double g : {0.05, 0.1, 0.3, 0.7}) {
    for (double eta_h : {0.2, 0.5, 0.826, 1.0}) {
      const HeraldedStateWeights w = heralded_weights({g, eta_h, 0.0});
      CHECK(w.c_plus - w.c_minus == 1.0);  // pinned by construction
      CHECK(w.c_plus > 0.0);
      CHECK(w.n1_bar > w.n2_bar);
      CHECK(w.n2_bar >= 0.0);
    }
  }
}

TEST_CASE("weights at a reference source") {
  const HeraldedStateWeights w = heralded_weights({0.3, 0.826, 0.0});
  CHECK(w.c_plus == doctest::Approx(14.055318560542101).epsilon(1e-13));
  CHECK(w.n1_bar == doctest::Approx(0.092732609121133833).epsilon(1e-13));
  CHECK(w.n2_bar == doctest::Approx(0.01498747624390448).epsilon(1e-13));
}

TEST_CASE("perfect herald fires with the pair-emission probability") {
  const double tg = std::tanh(0.2);
  CHECK(heralding_probability({0.2, 1.0, 0.0}) ==
        doctest::Approx(tg * tg).epsilon(1e-15));
  CHECK(heralding_probability({0.2, 0.5, 0.0}) ==
        doctest::Approx(0.019865458009982084).epsilon(1e-13));
}

TEST_CASE("vacuum input factorizes the joint no-click probability") {
  for (double alpha : {0.0, 0.4, -1.2}) {
    for (double beta : {0.3, -0.8}) {
      const double joint = thermal_no_click_joint(0.0, alpha, beta, 0.35, 0.9);
      const double product = std::exp(-0.9 * (alpha * alpha + beta * beta));
      CHECK(joint == doctest::Approx(product).epsilon(1e-14));
    }
  }
}

TEST_CASE("thermal correlator at a reference point") {
  CHECK(thermal_correlator(1.0, 0.0, 0.0, 0.5, 1.0) ==
        doctest::Approx(0.33333333333333348).epsilon(1e-14));
}

TEST_CASE("thermal domain checks") {
  CHECK(thrown_kind([] { thermal_no_click_joint(-0.1, 0.0, 0.0, 0.5, 1.0); }) ==
        ErrorKind::kInvalidParameter);
  CHECK(thrown_kind([] { thermal_no_click_joint(1.0, 0.0, 0.0, 1.0, 1.0); }) ==
        ErrorKind::kInvalidParameter);
  CHECK(thrown_kind([] { thermal_no_click_joint(1.0, 0.0, 0.0, 0.5, 0.0); }) ==
        ErrorKind::kInvalidParameter);
}

TEST_CASE("swapping arms mirrors the splitter") {
  const SourceParams src{0.15, 0.8, 0.0};
  for (double t : {0.3, 0.5, 0.72}) {
    const double direct = correlator(src, 0.4, -0.6, t, 0.85);
    const double mirrored = correlator(src, -0.6, 0.4, 1.0 - t, 0.85);
    CHECK(direct == doctest::Approx(mirrored).epsilon(1e-14));
  }
}

TEST_CASE("flipping both displacement signs leaves the correlator alone") {
  const SourceParams src{0.2, 0.7, 0.0};
  CHECK(correlator(src, 0.3, -0.5, 0.4, 0.9) ==
        doctest::Approx(correlator(src, -0.3, 0.5, 0.4, 0.9)).epsilon(1e-15));
}

TEST_CASE("heralded correlator against frozen reference") {
  const SourceParams src{0.1, 0.8, 0.0};
  CHECK(correlator(src, 0.3, -0.3, 0.5, 0.9) ==
        doctest::Approx(-0.81601222364585624).epsilon(1e-13));
}

TEST_CASE("joint probabilities form a normalized table") {
  const SourceParams src{0.1, 0.8, 0.0};
  const JointProbabilities j = joint_probabilities(src, 0.3, -0.3, 0.5, 0.9);
  CHECK(j.p_nc_nc == doctest::Approx(0.08413230749194156).epsilon(1e-13));
  CHECK(j.p_nc_c == doctest::Approx(0.45400305591148538).epsilon(1e-13));
  CHECK(j.p_c_nc == doctest::Approx(0.45400305591148538).epsilon(1e-13));
  CHECK(j.p_c_c == doctest::Approx(0.0078615806850876879).epsilon(1e-12));
  CHECK(j.p_nc_nc + j.p_nc_c + j.p_c_nc + j.p_c_c ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("joint probabilities stay nonnegative at matched settings") {
  const JointProbabilities j =
      joint_probabilities({0.3, 0.826, 0.0}, 0.5, 0.5, 0.5, 0.826);
  CHECK(j.p_nc_nc >= 0.0);
  CHECK(j.p_nc_c >= 0.0);
  CHECK(j.p_c_nc >= 0.0);
  CHECK(j.p_c_c >= 0.0);
  CHECK(j.p_nc_nc + j.p_nc_c + j.p_c_nc + j.p_c_c ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("correlator matches the table's sign pattern") {
  const SourceParams src{0.1, 0.8, 0.0};
  const JointProbabilities j = joint_probabilities(src, 0.3, -0.3, 0.5, 0.9);
  const double from_table = j.p_nc_nc + j.p_c_c - j.p_nc_c - j.p_c_nc;
  CHECK(correlator(src, 0.3, -0.3, 0.5, 0.9) ==
        doctest::Approx(from_table).epsilon(1e-13));
}

TEST_CASE("dark counts interpolate toward the unheralded correlator") {
  const SourceParams clean{0.1, 0.8, 0.0};
  const SourceParams noisy{0.1, 0.8, 0.5};
  CHECK(dark_count_adjusted_correlator(clean, 0.3, -0.3, 0.5, 0.9) ==
        correlator(clean, 0.3, -0.3, 0.5, 0.9));
  CHECK(dark_count_adjusted_correlator(noisy, 0.3, -0.3, 0.5, 0.9) ==
        doctest::Approx(0.68583086880804012).epsilon(1e-13));
}

TEST_CASE("chsh value is the absolute signed sum and ch its affine rescale") {
  const SourceParams src{0.05, 0.9, 0.0};
  MeasurementSettings s;
  s.alpha1 = -0.165;
  s.alpha2 = 0.563;
  s.beta1 = -0.165;
  s.beta2 = 0.563;
  s.t = 0.5;
  s.eta = 1.0;
  const double sum = chsh_sum(src, s);
  CHECK(chsh_value(src, s) == std::abs(sum));
  CHECK(ch_value(src, s) ==
        doctest::Approx((chsh_value(src, s) - 2.0) / 4.0).epsilon(1e-15));
  CHECK(chsh_value(src, s) > 2.0);
}
