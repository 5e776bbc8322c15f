#include <cmath>
#include <set>

#include "brwre/rng.hpp"
#include "brwre/stats.hpp"
#include "doctest.h"

using namespace brwre;

TEST_CASE("philox4x32-10 known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and separated by domain and index") {
  const SeedTree tree(42);
  auto a = tree.stream(StreamDomain::Walk, 3, 4);
  auto b = tree.stream(StreamDomain::Walk, 3, 4);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());

  std::set<std::uint64_t> firsts;
  for (auto d : {StreamDomain::Environment, StreamDomain::Branching, StreamDomain::Walk})
    for (std::uint64_t i = 0; i < 50; ++i) firsts.insert(tree.stream(d, i).next_u64());
  CHECK(firsts.size() == 150);
  CHECK(tree.child_seed(StreamDomain::Walk, 1) != tree.child_seed(StreamDomain::Walk, 2));
  CHECK(SeedTree(1).stream(StreamDomain::Walk).next_u64() != SeedTree(2).stream(StreamDomain::Walk).next_u64());
}

TEST_CASE("uniform and normal draws have the right moments") {
  auto s = SeedTree(7).stream(StreamDomain::Walk);
  RunningStats u, z, z2;
  for (int i = 0; i < 1'000'000; ++i) {
    const double x = s.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
    u.add(x);
    const double g = s.normal();
    z.add(g);
    z2.add(g * g);
  }
  CHECK(std::abs(u.mean() - 0.5) < 4.0 * u.stderr_of_mean());
  CHECK(std::abs(z.mean()) < 4.0 * z.stderr_of_mean());
  CHECK(std::abs(z2.mean() - 1.0) < 4.0 * z2.stderr_of_mean());
}
