#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "privsim/queues.hpp"
#include "privsim/random.hpp"

using namespace privsim;

TEST_CASE("update_data_queues: truncation then arrival") {
  NodeQueues q;
  q.q_private = 5.0;
  BlockService sv;
  sv.r_private = 7.0;
  update_data_queues(q, sv, 2.0, 0.0);
  CHECK(q.q_private == 2.0);
}

TEST_CASE("update_data_queues: arrival into an empty queue") {
  NodeQueues q;
  BlockService sv;
  update_data_queues(q, sv, 0.0, 3.0);
  CHECK(q.q_open == 3.0);
}

TEST_CASE("update_data_queues: fixed point at zero service and arrivals") {
  NodeQueues q;
  q.q_private = 4.5;
  q.q_open = 1.25;
  BlockService sv;
  update_data_queues(q, sv, 0.0, 0.0);
  CHECK(q.q_private == 4.5);
  CHECK(q.q_open == 1.25);
}

TEST_CASE("update_virtual_queues: Y drift is zero when power matches alpha") {
  NodeQueues q;
  q.y_power = 3.0;
  BlockService sv;
  sv.power_used = 0.8;
  for (int k = 0; k < 10; ++k)
    update_virtual_queues(q, sv, 0.0, 0.0, 0.1, 0.8);
  CHECK(q.y_power == 3.0);
}

TEST_CASE("update_virtual_queues: Z constant when admissions balance") {
  NodeQueues q;
  q.z_outage = 2.0;
  BlockService sv;
  const double gamma = 0.25;
  const double a_p = 1.6;
  for (int k = 0; k < 10; ++k)
    update_virtual_queues(q, sv, a_p, a_p * (1.0 - gamma), gamma, 1.0);
  CHECK(q.z_outage == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("update_virtual_queues: direct evaluation of the Z recursion") {
  NodeQueues q;
  q.z_outage = 4.0;
  BlockService sv;
  update_virtual_queues(q, sv, 2.0, 1.0, 0.1, 1.0);
  CHECK(q.z_outage == doctest::Approx(4.8).epsilon(1e-12));
}

TEST_CASE("queues stay nonnegative under random updates") {
  RandomStream rng(31);
  NodeQueues q;
  for (int k = 0; k < 5000; ++k) {
    BlockService sv;
    sv.r_private = 5.0 * rng.uniform();
    sv.r_open = 5.0 * rng.uniform();
    sv.r_private_effective = 5.0 * rng.uniform();
    sv.power_used = 3.0 * rng.uniform();
    const double a_p = 2.0 * rng.uniform();
    const double a_pe = a_p * rng.uniform();
    const double a_o = 2.0 * rng.uniform();
    const double gamma = rng.uniform();
    const double alpha = 0.1 + rng.uniform();
    update_data_queues(q, sv, a_p, a_o);
    update_virtual_queues(q, sv, a_p, a_pe, gamma, alpha);
    CHECK(q.q_private >= 0.0);
    CHECK(q.q_open >= 0.0);
    CHECK(q.q_private_effective >= 0.0);
    CHECK(q.z_outage >= 0.0);
    CHECK(q.y_power >= 0.0);
  }
}

TEST_CASE("telescoping: Z stability bounds the admitted effective fraction") {
  // Z(N) >= sum[(1-gamma) A_p - A_pe] exactly, so
  // sum A_pe >= (1-gamma) sum A_p - Z(N).
  RandomStream rng(41);
  const double gamma = 0.2;
  NodeQueues q;
  BlockService sv;
  double sum_ap = 0.0, sum_ape = 0.0;
  for (int k = 0; k < 20000; ++k) {
    const double a_p = 2.0 * rng.uniform();
    const double a_pe = a_p * rng.uniform();
    update_virtual_queues(q, sv, a_p, a_pe, gamma, 1.0);
    sum_ap += a_p;
    sum_ape += a_pe;
  }
  CHECK(sum_ape >= (1.0 - gamma) * sum_ap - q.z_outage - 1e-6 * sum_ap);
}

TEST_CASE("telescoping: Y stability bounds the average power") {
  RandomStream rng(43);
  const double alpha = 0.7;
  NodeQueues q;
  double total_power = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    BlockService sv;
    sv.power_used = 2.0 * rng.uniform();
    total_power += sv.power_used;
    update_virtual_queues(q, sv, 0.0, 0.0, 0.1, alpha);
  }
  CHECK(total_power <= alpha * n + q.y_power + 1e-6 * total_power);
}
