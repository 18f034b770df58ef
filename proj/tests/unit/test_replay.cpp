#include <doctest.h>

#include <vector>

#include "riskavi/errors.hpp"
#include "riskavi/replay.hpp"

using namespace riskavi;

namespace {

Transition make(double tag, std::size_t dim = 3) {
  Transition t;
  t.obs.assign(dim, tag);
  t.next_obs.assign(dim, tag + 1.0);
  t.action = static_cast<std::size_t>(tag) % 5;
  t.g = -tag;
  t.cost = 0.1;
  return t;
}

}  // namespace

TEST_CASE("ring buffer keeps the newest transitions") {
  ReplayBuffer buf(4);
  CHECK(buf.empty());
  for (int i = 0; i < 3; ++i) buf.push(make(i));
  CHECK(buf.size() == 3);
  CHECK(buf.at(0).obs[0] == 0.0);
  for (int i = 3; i < 10; ++i) buf.push(make(i));
  CHECK(buf.size() == 4);
  CHECK(buf.capacity() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(buf.at(i).obs[0] == 6.0 + static_cast<double>(i));
  CHECK_THROWS_AS(buf.at(4), std::out_of_range);
}

TEST_CASE("push validation") {
  ReplayBuffer buf(8);
  auto neg = make(1);
  neg.cost = -0.01;
  CHECK_THROWS_AS(buf.push(neg), std::invalid_argument);
  buf.push(make(1));
  CHECK_THROWS_AS(buf.push(make(2, 4)), std::invalid_argument);
  auto mismatched = make(3);
  mismatched.next_obs.pop_back();
  CHECK_THROWS_AS(buf.push(mismatched), std::invalid_argument);
  CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
}

TEST_CASE("sampling") {
  ReplayBuffer buf(100);
  Rng rng(1);
  CHECK_THROWS_AS(buf.sample(1, rng), InsufficientData);
  for (int i = 0; i < 10; ++i) buf.push(make(i));
  CHECK_THROWS_AS(buf.sample(11, rng), InsufficientData);
  CHECK_THROWS_AS(buf.sample(0, rng), std::invalid_argument);

  const auto batch = buf.sample(10, rng);
  CHECK(batch.size() == 10);
  for (const auto& t : batch) {
    CHECK(t.obs.size() == 3);
    CHECK(t.next_obs[0] == t.obs[0] + 1.0);
  }

  Rng r1(5), r2(5);
  CHECK(buf.sample_indices(8, r1) == buf.sample_indices(8, r2));

  // Uniform with replacement: every slot is hit at a rate near 1/10.
  std::vector<int> counts(10, 0);
  Rng r3(77);
  const int draws = 100000;
  for (int k = 0; k < draws / 10; ++k) {
    for (std::size_t i : buf.sample_indices(10, r3)) ++counts[i];
  }
  for (int c : counts) CHECK(std::abs(c - draws / 10) < 500);
}
