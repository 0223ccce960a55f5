#include <doctest.h>

#include <cmath>
#include <covsched/fractional.hpp>
#include <covsched/generator.hpp>

#include "test_util.hpp"

using namespace covsched;

namespace {

// bare scaled instance with handpicked numbers, bypassing preprocess
ScaledInstance make_scaled(std::vector<double> costs,
                           std::vector<std::vector<double>> proc, double p) {
  ScaledInstance s;
  const Index m = static_cast<Index>(costs.size());
  const Index n = static_cast<Index>(proc.size());
  s.costs = Vector::Zero(m);
  for (Index i = 0; i < m; ++i) s.costs[i] = costs[static_cast<size_t>(i)];
  s.unclamped_costs = s.costs;
  s.proc = Matrix::Zero(n, m);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i)
      s.proc(j, i) = proc[static_cast<size_t>(j)][static_cast<size_t>(i)];
  s.norm_p = p;
  s.beta_scale = 1.0;
  s.proc_scale = 1.0;
  s.kept_machines.resize(static_cast<size_t>(m));
  for (Index i = 0; i < m; ++i) s.kept_machines[static_cast<size_t>(i)] = i;
  s.initial_x = Vector::Zero(m);
  for (Index i = 0; i < m; ++i)
    s.initial_x[i] = s.costs[i] <= 1.0 + kAbsTol ? 1.0 : 1.0 / static_cast<double>(m);
  s.cost_pow_inv = Vector::Zero(m);
  s.cost_pow_rest = Vector::Zero(m);
  for (Index i = 0; i < m; ++i) {
    s.cost_pow_inv[i] = std::pow(s.costs[i], 1.0 / p);
    s.cost_pow_rest[i] = std::pow(s.costs[i], (p - 1.0) / p);
  }
  s.proc_pow = Matrix::Zero(n, m);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i)
      s.proc_pow(j, i) = schedulable(s.proc(j, i)) ? powp(s.proc(j, i), p) : kUnschedulable;
  return s;
}

}  // namespace

TEST_CASE("marginal price of a fraction") {
  SUBCASE("partially open machine") {
    auto s = make_scaled({8.0}, {{2.0}}, 3.0);
    s.initial_x[0] = 0.5;  // a lone expensive machine would otherwise start full
    auto st = init_fractional(s, 1);
    // max(8^(2/3) * 2, 2^3) = max(8, 8) = 8
    CHECK(psi(st, s, 0, 0) == doctest::Approx(8.0));
  }
  SUBCASE("fully open machine uses the power increment") {
    auto s = make_scaled({1.0}, {{1.0}}, 2.0);
    auto st = init_fractional(s, 1);  // cost 1 opens fully
    REQUIRE(st.fully_open[0] == 1);
    // proxy load 1, so (1+1)^2 - 1^2 = 3
    CHECK(psi(st, s, 0, 0) == doctest::Approx(3.0));
  }
  SUBCASE("zero processing time is free") {
    auto s = make_scaled({4.0, 1.0}, {{0.0, 0.0}}, 2.0);
    auto st = init_fractional(s, 1);
    CHECK(psi(st, s, 0, 0) == doctest::Approx(0.0));
    CHECK(psi(st, s, 1, 0) == doctest::Approx(0.0));
  }
  SUBCASE("unschedulable pair") {
    auto s = make_scaled({4.0}, {{kUnschedulable}}, 2.0);
    auto st = init_fractional(s, 1);
    CHECK(!schedulable(psi(st, s, 0, 0)));
  }
}

TEST_CASE("potential of fresh states") {
  SUBCASE("all machines clamped to cost 1") {
    auto s = make_scaled({1.0, 1.0, 1.0}, {{1.0, 1.0, 1.0}}, 2.0);
    auto st = init_fractional(s, 1);
    CHECK(potential(st, s).total == doctest::Approx(3.0));
  }
  SUBCASE("partial machine pays cost times fraction") {
    auto s = make_scaled({4.0}, {{1.0}}, 1.0);
    auto st = init_fractional(s, 1);
    st.x[0] = 0.5;
    CHECK(potential(st, s).total == doctest::Approx(2.0));
  }
}

TEST_CASE("psi ordering keeps unschedulable machines last") {
  Vector psis(3);
  psis << 1.0, kUnschedulable, 3.0;
  auto asc = detail::psi_order(psis, false);
  CHECK(asc[0] == 0);
  CHECK(asc[1] == 2);
  CHECK(asc[2] == 1);
  auto desc = detail::psi_order(psis, true);
  CHECK(desc[0] == 2);
  CHECK(desc[1] == 0);
  CHECK(desc[2] == 1);

  Vector ties(3);
  ties << 2.0, 2.0, 2.0;
  auto stable = detail::psi_order(ties, false);
  CHECK(stable[0] == 0);
  CHECK(stable[1] == 1);
  CHECK(stable[2] == 2);
}

TEST_CASE("free machine absorbs the cap in one pass") {
  // q = 0 on the cheap-psi machine: its rate is unbounded, so it takes the
  // full 2x - y cap immediately and the job closes after one pass.
  auto s = make_scaled({2.0, 4.0}, {{0.0, 1.0}}, 1.0);
  auto st = init_fractional(s, 1);
  const double N = 2.0 * std::log(2.0);
  REQUIRE(st.N == doctest::Approx(N));

  assign_job_fractional(st, s, 0);

  CHECK(st.regular_steps == 1);
  CHECK(st.small_steps == 0);
  CHECK(st.x[0] == doctest::Approx(0.5 + 0.5 / (2.0 * N)).epsilon(1e-12));
  CHECK(st.x[1] == doctest::Approx(0.5 + 0.5 / (4.0 * N)).epsilon(1e-12));

  const double dy0 = 1.0;            // cap 2x - y
  const double dy1 = 0.5 / N;        // rate branch
  const double total = dy0 + dy1;
  CHECK(st.y(0, 0) == doctest::Approx(dy0 / total).epsilon(1e-12));
  CHECK(st.y(0, 1) == doctest::Approx(dy1 / total).epsilon(1e-12));
  CHECK(st.y.row(0).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("symmetric pair splits the job evenly") {
  auto s = make_scaled({2.0, 2.0}, {{1.0, 1.0}}, 1.0);
  auto st = init_fractional(s, 1);
  const double N = 2.0 * std::log(2.0);

  assign_job_fractional(st, s, 0);

  CHECK(st.regular_steps == 2);
  CHECK(st.small_steps == 0);
  const double u = 1.0 + 1.0 / (2.0 * N);
  CHECK(st.x[0] == doctest::Approx(0.5 * u * u).epsilon(1e-12));
  CHECK(st.x[0] == st.x[1]);
  CHECK(st.y(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(st.y(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("saturating run lands exactly on the bounds") {
  // second machine cannot take the job, so the first one is driven to a
  // fully open machine carrying the whole unit; the terminal small step must
  // snap both x and y to exactly 1
  auto s = make_scaled({2.0, 2.0}, {{1.0, kUnschedulable}}, 1.0);
  auto st = init_fractional(s, 1);

  assign_job_fractional(st, s, 0);

  CHECK(st.x[0] == 1.0);  // bit-exact snap
  CHECK(st.x[1] == 1.0);  // same trajectory, same snap
  CHECK(st.y(0, 0) == 1.0);
  CHECK(st.y(0, 1) == 0.0);
  CHECK(st.y.row(0).sum() == 1.0);
  CHECK(st.fully_open[0] == 1);
  CHECK(st.fully_open[1] == 1);
  CHECK(st.small_steps == 1);
  CHECK(st.regular_steps == 2);
}

TEST_CASE("single fully open machine accumulates the known potential") {
  auto s = make_scaled({1.0}, {{2.0}}, 2.0);
  auto st = run_fractional(s, 1);

  CHECK(st.y(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  // proxy load 1 + 2, squared, plus unit mass at q^2 = 4
  const auto pb = potential(st, s);
  CHECK(pb.total == doctest::Approx(13.0).epsilon(1e-9));

  auto rep = fractional_report(st, s);
  CHECK(rep.cost == doctest::Approx(1.0));
  CHECK(rep.objective == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(rep.potential == doctest::Approx(13.0).epsilon(1e-9));
  CHECK(rep.cost_ratio == doctest::Approx(1.0 / 13.0).epsilon(1e-6));
  CHECK(rep.objective_ratio <= 2.0 + 1e-9);
}

TEST_CASE("cheap marginal price attracts the mass") {
  // machine 0: fully open but slow (psi = 10); machine 1: partial, psi = 1.
  auto s = make_scaled({1.0, 2.0}, {{10.0, 1.0}}, 1.0);
  auto st = init_fractional(s, 1);
  REQUIRE(psi(st, s, 0, 0) == doctest::Approx(10.0));
  REQUIRE(psi(st, s, 1, 0) == doctest::Approx(1.0));

  assign_job_fractional(st, s, 0);
  CHECK(st.y.row(0).sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(st.y(0, 1) > st.y(0, 0));
  CHECK(st.x[1] == 1.0);  // driven fully open on the way

  auto rep = fractional_report(st, s);
  CHECK(rep.cost <= rep.potential * (1.0 + 1e-9));
}

TEST_CASE("descending order serves the expensive machine first") {
  auto s = make_scaled({1.0, 2.0}, {{10.0, 1.0}}, 1.0);
  FractionalOptions opt;
  opt.descending_psi = true;
  auto st = init_fractional(s, 1);
  assign_job_fractional(st, s, 0, opt);
  // machine 0 alone already covers the prefix (x = 1), so everything lands
  // on it despite psi 10
  CHECK(st.y(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(st.y(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("job rows stay closed") {
  auto s = make_scaled({2.0, 2.0}, {{1.0, 1.0}}, 1.0);
  auto st = init_fractional(s, 1);
  assign_job_fractional(st, s, 0);
  CHECK_THROWS_AS(assign_job_fractional(st, s, 0), std::invalid_argument);
}

TEST_CASE("stall and prefix guards") {
  SUBCASE("pass budget") {
    auto s = make_scaled({2.0, 2.0}, {{1.0, 1.0}}, 1.0);
    auto st = init_fractional(s, 1);
    FractionalOptions opt;
    opt.max_passes = 1;  // needs two
    CHECK_THROWS_AS(assign_job_fractional(st, s, 0, opt), StallDetected);
  }
  SUBCASE("progress floor") {
    auto s = make_scaled({2.0, 2.0}, {{1.0, 1.0}}, 1.0);
    auto st = init_fractional(s, 1);
    FractionalOptions opt;
    opt.stall_eps = 10.0;  // unreachable gain
    CHECK_THROWS_AS(assign_job_fractional(st, s, 0, opt), StallDetected);
  }
  SUBCASE("open mass below one") {
    auto s = make_scaled({2.0, 2.0}, {{1.0, 1.0}}, 1.0);
    auto st = init_fractional(s, 1);
    st.x << 0.3, 0.3;
    CHECK_THROWS_AS(assign_job_fractional(st, s, 0), PrefixUndefined);
  }
}

TEST_CASE("reference categories partition the regular steps") {
  auto gen = gen_instance(3, 4, 2.0, DistSpec::uniform(1.0, 5.0),
                            DistSpec::uniform(1.0, 4.0), 99);
  auto s = preprocess(gen.instance);
  // reference: every job on its fastest machine
  std::vector<Index> ref(static_cast<size_t>(s.jobs()));
  for (Index j = 0; j < s.jobs(); ++j) {
    Index best = 0;
    double bq = kUnschedulable;
    for (Index i = 0; i < s.machines(); ++i)
      if (s.proc(j, i) < bq) { bq = s.proc(j, i); best = i; }
    ref[static_cast<size_t>(j)] = best;
  }
  FractionalOptions opt;
  opt.reference_assignment = &ref;
  opt.keep_log = true;
  auto st = run_fractional(s, s.jobs(), opt);

  CHECK(st.category_steps[0] == 0);
  CHECK(st.category_steps[1] + st.category_steps[2] + st.category_steps[3] ==
        st.regular_steps);
  Index logged_regular = 0;
  for (const auto& rec : st.log) {
    if (rec.small) {
      CHECK(rec.category == 0);
    } else {
      ++logged_regular;
      CHECK(rec.category >= 1);
      CHECK(rec.category <= 3);
    }
    CHECK(rec.phi_after <= rec.phi_before + 5.0 / st.N + 1e-9);
    CHECK(rec.phi_after >= rec.phi_before - 1e-9);
  }
  CHECK(logged_regular == st.regular_steps);
}

TEST_CASE("generated instances keep every invariant") {
  int checked = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    auto gen = gen_instance(static_cast<Index>(2 + seed % 3), static_cast<Index>(3 + seed % 4),
                            1.0 + static_cast<double>(seed % 3),
                            DistSpec::uniform(1.0, 6.0),
                            DistSpec::uniform(0.5, 4.0), seed);
    auto s = preprocess(gen.instance);
    auto st = init_fractional(s, s.jobs());
    for (Index j = 0; j < s.jobs(); ++j) {
      assign_job_fractional(st, s, j);
      st.x_after_job.push_back(st.x);

      // unit coverage of every closed row
      for (Index jj = 0; jj <= j; ++jj)
        CHECK(st.y.row(jj).sum() == doctest::Approx(1.0).epsilon(1e-9));
      // fraction cap against the snapshot taken right after the job closed
      for (Index i = 0; i < s.machines(); ++i)
        CHECK(st.y(j, i) <= 2.0 * st.x[i] + 1e-9);
      // partial-phase loads stay below the cost terms that pay for them
      for (Index i = 0; i < s.machines(); ++i) {
        CHECK(st.j0_load[i] <= s.cost_pow_inv[i] * st.x[i] * (1.0 + 1e-9) + 1e-12);
        CHECK(st.j0_loadp[i] <= s.costs[i] * st.x[i] * (1.0 + 1e-9) + 1e-12);
      }
      ++checked;
    }
    // accumulators agree with the y matrix
    for (Index i = 0; i < s.machines(); ++i) {
      double load = 0.0, loadp = 0.0;
      for (Index j = 0; j < s.jobs(); ++j) {
        if (st.y(j, i) == 0.0 || !schedulable(s.proc(j, i))) continue;
        load += st.y(j, i) * s.proc(j, i);
        loadp += st.y(j, i) * s.proc_pow(j, i);
      }
      CHECK(st.j0_load[i] + st.j1_load[i] == doctest::Approx(load).epsilon(1e-9));
      CHECK(st.j0_loadp[i] + st.j1_loadp[i] == doctest::Approx(loadp).epsilon(1e-9));
    }
    CHECK(st.small_steps <= s.jobs() + s.machines());
    CHECK_NOTHROW(fractional_report(st, s));
  }
  CHECK(checked > 20);
}

TEST_CASE("full runs snapshot x per job") {
  auto gen = gen_instance(3, 5, 2.0, DistSpec::uniform(1.0, 5.0),
                            DistSpec::uniform(1.0, 4.0), 7);
  auto s = preprocess(gen.instance);
  auto st = run_fractional(s, s.jobs());
  REQUIRE(st.x_after_job.size() == static_cast<size_t>(s.jobs()));
  for (size_t j = 1; j < st.x_after_job.size(); ++j)
    for (Index i = 0; i < s.machines(); ++i)
      CHECK(st.x_after_job[j][i] >= st.x_after_job[j - 1][i] - 1e-15);
  for (Index i = 0; i < s.machines(); ++i)
    CHECK(st.x_after_job.back()[i] == st.x[i]);
  for (Index i = 0; i < s.machines(); ++i)
    CHECK(st.x_initial[i] == s.initial_x[i]);
}
