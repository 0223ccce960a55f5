#include <doctest.h>

#include <cmath>
#include <covsched/ocg.hpp>

using namespace covsched;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

ConvexObjective quadratic_sum(Index dim, double gamma) {
  ConvexObjective f;
  f.value = [](const Vector& x) { return x.squaredNorm(); };
  f.gradient = [](const Vector& x) { return Vector(2.0 * x); };
  f.beta_measure = 2.0;
  f.gamma_scale = gamma;
  f.name = "sum of squares";
  (void)dim;
  return f;
}

}  // namespace

TEST_CASE("start point sits at 1/gamma") {
  auto st = init_state(linear_objective(Vector::Ones(2), 4.0), 2);
  CHECK(st.x[0] == doctest::Approx(0.25));
  CHECK(st.x[1] == doctest::Approx(0.25));
  CHECK(st.f_start == doctest::Approx(0.5));

  auto st3 = init_state(linear_objective(Vector::Ones(3), 1.0), 3);
  for (Index i = 0; i < 3; ++i) CHECK(st3.x[i] == doctest::Approx(1.0));
}

TEST_CASE("state construction rejects bad parameters") {
  CHECK_THROWS_AS(init_state(linear_objective(Vector::Ones(1), 1.0), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(init_state(linear_objective(Vector::Ones(2), 2.0), 2, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(init_state(linear_objective(Vector::Ones(2), 2.0), 2, 0.2),
                  std::invalid_argument);
  auto zero_gamma = linear_objective(Vector::Ones(2), 1.0);
  zero_gamma.gamma_scale = 0.0;
  CHECK_THROWS_AS(init_state(zero_gamma, 2), std::invalid_argument);
}

TEST_CASE("symmetric covering row doubles both coordinates") {
  auto st = init_state(linear_objective(Vector::Ones(2), 4.0), 2);
  process_constraint(st, vec2(1.0, 1.0));

  CHECK(st.x[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(st.x[1] == doctest::Approx(0.5).epsilon(1e-9));
  REQUIRE(st.duals.size() == 1);
  CHECK(std::abs(st.duals[0] - std::log(2.0)) <= 2.0 * st.step_eps);

  // objective gain is paid for by the dual
  const double gain = st.objective.value(st.x) - st.f_start;
  CHECK(gain == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(gain <= st.duals[0] * (1.0 + 2.0 * st.step_eps));

  CHECK(min_row_slack(st) >= -1e-12);
  CHECK(min_row_slack(st) <= 1e-6);
}

TEST_CASE("pre-satisfied row charges nothing") {
  auto st = init_state(linear_objective(Vector::Ones(2), 1.0), 2);
  process_constraint(st, vec2(1.0, 0.0));
  REQUIRE(st.duals.size() == 1);
  CHECK(st.duals[0] == 0.0);
  CHECK(st.x[0] == 1.0);
  CHECK(st.x[1] == 1.0);
}

TEST_CASE("single active coordinate follows the exponential flow") {
  ConvexObjective f;
  f.value = [](const Vector& x) { return x[0] * x[0] + x[1]; };
  f.gradient = [](const Vector& x) { return vec2(2.0 * x[0], 1.0); };
  f.beta_measure = 2.0;
  f.gamma_scale = 4.0;
  auto st = init_state(f, 2);
  process_constraint(st, vec2(0.0, 1.0));

  CHECK(st.x[0] == doctest::Approx(0.25));  // untouched
  CHECK(st.x[1] == doctest::Approx(1.0).epsilon(1e-9));
  REQUIRE(st.duals.size() == 1);
  CHECK(std::abs(st.duals[0] - std::log(4.0)) <= 2.0 * st.step_eps);
}

TEST_CASE("stationarity ratios on the symmetric run") {
  auto st = init_state(linear_objective(Vector::Ones(2), 4.0), 2);
  process_constraint(st, vec2(1.0, 1.0));
  auto rep = stationarity_gap(st);
  CHECK(rep.alpha == doctest::Approx(std::log(4.0)));
  CHECK(!rep.c_min_declared);
  REQUIRE(rep.ratios.size() == 2);
  CHECK(rep.zero_gradient.empty());
  for (double r : rep.ratios) CHECK(r == doctest::Approx(0.5).epsilon(2e-3));
}

TEST_CASE("declared c_min overrides the retrospective one") {
  auto st = init_state(linear_objective(Vector::Ones(2), 4.0), 2);
  process_constraint(st, vec2(1.0, 1.0));
  process_constraint(st, vec2(0.25, 2.0));
  CHECK(effective_c_min(st) == doctest::Approx(0.25));
  st.declared_c_min = 0.5;
  CHECK(effective_c_min(st) == doctest::Approx(0.5));
  CHECK(stationarity_gap(st).c_min_declared);
}

TEST_CASE("reference guarantee on the symmetric run") {
  auto st = init_state(linear_objective(Vector::Ones(2), 4.0), 2);
  process_constraint(st, vec2(1.0, 1.0));

  auto rep = guarantee_bound(st, vec2(1.0, 0.0));
  CHECK(rep.achieved == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.beta == doctest::Approx(1.0));
  CHECK(rep.alpha == doctest::Approx(std::log(4.0)));
  CHECK(rep.bound == doctest::Approx(std::log(4.0) + 0.5));
  CHECK(rep.within_bound);

  CHECK_THROWS_AS(guarantee_bound(st, vec2(0.5, 0.4)), InfeasibleReference);
  CHECK_THROWS_AS(guarantee_bound(st, Vector::Ones(3)), std::invalid_argument);
}

TEST_CASE("gradient must not vanish on an unsatisfied coordinate") {
  auto st = init_state(linear_objective(vec2(1.0, 0.0), 4.0), 2);
  CHECK_THROWS_AS(process_constraint(st, vec2(0.0, 1.0)),
                  ZeroGradientOnActiveCoordinate);
}

TEST_CASE("step budget enforcement") {
  auto st = init_state(linear_objective(Vector::Ones(1), 1000.0), 1);
  st.max_steps = 10;
  Vector row = Vector::Ones(1);
  CHECK_THROWS_AS(process_constraint(st, row), NonTermination);
}

TEST_CASE("row validation") {
  auto st = init_state(linear_objective(Vector::Ones(2), 2.0), 2);
  CHECK_THROWS_AS(process_constraint(st, Vector::Ones(3)), std::invalid_argument);
  CHECK_THROWS_AS(process_constraint(st, vec2(1.0, -0.5)), std::invalid_argument);
}

TEST_CASE("runs are bit-for-bit deterministic") {
  auto run = [] {
    auto st = init_state(quadratic_sum(3, 6.0), 3);
    Vector r1(3), r2(3);
    r1 << 1.0, 0.5, 0.0;
    r2 << 0.0, 2.0, 1.0;
    process_constraint(st, r1);
    process_constraint(st, r2);
    return st;
  };
  auto a = run();
  auto b = run();
  for (Index i = 0; i < 3; ++i) CHECK(a.x[i] == b.x[i]);
  REQUIRE(a.duals.size() == b.duals.size());
  for (size_t j = 0; j < a.duals.size(); ++j) CHECK(a.duals[j] == b.duals[j]);
  CHECK(a.steps_taken == b.steps_taken);
}

TEST_CASE("dual pay rate bounds the objective gain") {
  auto st = init_state(quadratic_sum(3, 6.0), 3);
  Vector r1(3), r2(3), r3(3);
  r1 << 1.0, 0.5, 0.0;
  r2 << 0.0, 2.0, 1.0;
  r3 << 0.7, 0.0, 1.3;
  double dual_sum = 0.0;
  for (const Vector& r : {r1, r2, r3}) process_constraint(st, r);
  for (double y : st.duals) dual_sum += y;
  const double gain = st.objective.value(st.x) - st.f_start;
  CHECK(gain <= dual_sum * (1.0 + 2.0 * st.step_eps) + kAbsTol);
  CHECK(min_row_slack(st) >= -1e-12);

  auto rep = stationarity_gap(st);
  for (double r : rep.ratios) CHECK(r <= 1.0 + 5.0 * st.step_eps);
}

TEST_CASE("halving the step size halves the stationarity slack") {
  auto slack_at = [](double eps) {
    auto st = init_state(linear_objective(Vector::Ones(1), 4.0), 1, eps);
    st.declared_c_min = 1.0;
    process_constraint(st, Vector::Ones(1));
    auto rep = stationarity_gap(st);
    REQUIRE(rep.ratios.size() == 1);
    return rep.ratios[0] - 1.0;
  };
  const double coarse = slack_at(1e-2);
  const double fine = slack_at(5e-3);
  CHECK(coarse > 0.0);
  CHECK(fine > 0.0);
  const double ratio = fine / coarse;
  CHECK(ratio >= 1.0 / 6.0);
  CHECK(ratio <= 1.5);
}
