#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "lrgan/verify.hpp"

using namespace lrgan;

namespace {

const LossPair& loss(const char* name) { return catalogue_lookup(name).loss; }

const Check* find_check(const VerificationReport& rep, const std::string& name) {
  for (const auto& c : rep.checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("inner argmax matches the analytic maximiser") {
  CHECK(inner_argmax(loss("MSE"), 2.0).argmax == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(inner_argmax(loss("CrossEntropy"), 1.0).argmax == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(inner_argmax(loss("B1b"), 3.0).argmax == doctest::Approx(std::log(3.0)).epsilon(1e-6));
  CHECK(inner_argmax(loss("A2"), 4.0).argmax == doctest::Approx(2.0).epsilon(1e-6));

  const InnerArgmax w = inner_argmax(loss("Wasserstein"), 0.5);
  CHECK(w.at_infinity);
  CHECK(w.direction == 1);
  CHECK(std::isinf(w.argmax));
  const InnerArgmax w2 = inner_argmax(loss("Wasserstein"), 2.0);
  CHECK(w2.at_infinity);
  CHECK(w2.direction == -1);
}

TEST_CASE("concentrated objective at r = 1 is phi(omega(1))") {
  CHECK(concentrated_objective(loss("MSE"), 1.0) == doctest::Approx(-0.5));
  CHECK(concentrated_objective(loss("CrossEntropy"), 1.0) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-12));
  for (const auto& e : catalogue()) {
    if (!e.loss.ratio_invertible) continue;
    CAPTURE(e.loss.name);
    const double z = e.loss.omega.at_one();
    CHECK(concentrated_objective(e.loss, 1.0) == doctest::Approx(e.loss.phi(z)).epsilon(1e-12));
  }
  CHECK(concentrated_objective(loss("MSE"), 3.0) == doctest::Approx(0.5 * 9 - 3));
  CHECK_THROWS_AS(concentrated_objective(loss("Hinge"), 1.0), RatioNotRecoverable);
  CHECK_THROWS_AS(concentrated_objective(loss("MSE"), -1.0), std::invalid_argument);
}

TEST_CASE("theorem checks pass for MSE and CrossEntropy") {
  const VerificationReport mse = check_theorem1(loss("MSE"), default_ratio_grid());
  CHECK(mse.passed);
  CHECK(!mse.skipped);
  const VerificationReport ce = check_theorem1(loss("CrossEntropy"), {1.0});
  CHECK(ce.passed);
  const Check* arg = find_check(ce, "inner_argmax");
  REQUIRE(arg != nullptr);
  CHECK(arg->observed == doctest::Approx(0.5).epsilon(1e-6));
  const Check* min = find_check(ce, "outer_minimizer");
  REQUIRE(min != nullptr);
  CHECK(min->observed == doctest::Approx(1.0).epsilon(1e-3));
  const Check* val = find_check(ce, "outer_min_value");
  REQUIRE(val != nullptr);
  CHECK(val->observed == doctest::Approx(std::log(0.5)).epsilon(1e-6));
}

TEST_CASE("limit losses are skipped for the theorem checks") {
  for (const char* name : {"Hinge", "Wasserstein"}) {
    const VerificationReport rep = check_theorem1(loss(name), default_ratio_grid());
    CHECK(rep.skipped);
    CHECK(rep.skip_reason == "skipped: ratio not recoverable");
    CHECK(rep.passed);
  }
}

TEST_CASE("min-max value at the balanced ratio") {
  const auto value = [](const char* name) {
    const Check* c = find_check(check_corollary_value(loss(name)), "minmax_value");
    REQUIRE(c != nullptr);
    return c->observed;
  };
  CHECK(value("MSE") == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(value("CrossEntropy") == doctest::Approx(-2.0 * std::log(2.0)).epsilon(1e-9));
  CHECK(value("B1b") == doctest::Approx(-1.0).epsilon(1e-9));
  for (const auto& e : catalogue()) {
    if (!e.loss.ratio_invertible) continue;
    CAPTURE(e.loss.name);
    CHECK(check_corollary_value(e.loss).passed);
  }
}

TEST_CASE("derivative recipe against finite differences") {
  CHECK(check_derivatives(loss("MSE"), 100).passed);
  const LossPair& a3 = loss("A3");
  CHECK(check_derivatives(a3, 100).passed);
  for (double z : {0.1, 1.0, 7.0}) CHECK(a3.psi_prime(z) == doctest::Approx(1.0 / (z * (1 + z))));

  const VerificationReport hinge = check_derivatives(loss("Hinge"), 100);
  CHECK(hinge.passed);
  for (const auto& c : hinge.checks) {
    CHECK(std::abs(c.probe - 1.0) > 1e-3);
    CHECK(std::abs(c.probe + 1.0) > 1e-3);
  }
  CHECK(derivative_kinks(loss("Hinge")) == std::vector<double>{-1.0, 1.0});
  CHECK(derivative_kinks(loss("MSE")).empty());

  LossPair broken = loss("MSE");
  broken.phi = [](double z) { return -0.5 * z * z + 0.01 * z; };
  CHECK(!check_derivatives(broken, 100).passed);
}

TEST_CASE("envelope identity and monotone normalised psi") {
  for (const auto& e : catalogue()) {
    if (!e.loss.ratio_invertible) continue;
    CAPTURE(e.loss.name);
    CHECK(check_envelope(e.loss).passed);
  }
}

TEST_CASE("every catalogue entry verifies") {
  for (const auto& e : catalogue()) {
    CAPTURE(e.loss.name);
    const VerificationReport rep = verify_loss(e.loss);
    CHECK(rep.passed);
    CHECK(!rep.skipped);
    CHECK(rep.skip_reason.empty() == e.loss.ratio_invertible);
  }
}

TEST_CASE("report merging and formatting") {
  VerificationReport a;
  a.loss_name = "X";
  a.add("one", 1.0, 2.0, 2.0, 0.0, 1e-6);
  VerificationReport b;
  b.skipped = true;
  b.skip_reason = "skipped: ratio not recoverable";
  b.add("two", 1.0, 2.0, 3.0, 1.0, 1e-6);
  a.merge(b);
  a.merge(b);
  CHECK(a.checks.size() == 3);
  CHECK(!a.passed);
  CHECK(!a.skipped);
  CHECK(a.skip_reason == "skipped: ratio not recoverable");

  const std::string table = format_report_table({a});
  CHECK(table.find("FAIL") != std::string::npos);
  const std::string jsonl = format_report_jsonl({a});
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 4);
  CHECK(jsonl.find("\"two\"") != std::string::npos);
}

}
