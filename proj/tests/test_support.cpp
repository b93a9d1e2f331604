#include "helpers.hpp"

#include "netkernel/generator.hpp"

using namespace netkernel;
using nktest::arc;

namespace {

std::vector<ArcRef> tree_arcs(const Instance<Rational>& inst, const Support& sup, int k) {
  return sup.arcs(inst, k);
}

} // namespace

TEST_CASE("build_support walks depth-first from the smallest node") {
  auto inst = nktest::demo_instance<Rational>();
  auto sup = build_support(inst);
  REQUIRE(verify_support(inst, sup).ok);

  // commodity 1: 1 -> 2 via (1,2), then 2 -> 3 via (2,3)
  CHECK(tree_arcs(inst, sup, 1) == std::vector<ArcRef>{arc(1, 1, 2), arc(1, 2, 3)});
  // commodities 2,3: 2 -> 3 -> 4 -> 5 along declaration order
  CHECK(tree_arcs(inst, sup, 2) ==
        std::vector<ArcRef>{arc(2, 2, 3), arc(2, 3, 4), arc(2, 4, 5)});
  CHECK(tree_arcs(inst, sup, 3) ==
        std::vector<ArcRef>{arc(3, 2, 3), arc(3, 3, 4), arc(3, 4, 5)});

  // deterministic: repeated runs agree
  auto again = build_support(inst);
  CHECK(again.tree == sup.tree);
}

TEST_CASE("tree-sized commodity forces the whole arc set") {
  auto inst = parse_instance<Rational>(
      "commodity 1\nnode 1\nnode 2\nnode 3\narc 1 2\narc 2 3\narc 1 3\narc 3 1\n"
      "commodity 2\nnode 1\nnode 2\nnode 3\narc 1 2\narc 2 3\n");
  auto sup = build_support(inst);
  CHECK(sup.of(2) == std::vector<int>{0, 1});
  CHECK(verify_support(inst, sup).ok);
}

TEST_CASE("verify_support accepts the pinned trees and alternatives") {
  auto inst = nktest::demo_instance<Rational>();
  auto sup = load_support(inst, nktest::fixture_text("demo.support"));
  CHECK(tree_arcs(inst, sup, 1) == std::vector<ArcRef>{arc(1, 1, 2), arc(1, 1, 3)});
  CHECK(tree_arcs(inst, sup, 2) ==
        std::vector<ArcRef>{arc(2, 2, 3), arc(2, 2, 4), arc(2, 4, 5)});
  CHECK(tree_arcs(inst, sup, 3) ==
        std::vector<ArcRef>{arc(3, 2, 4), arc(3, 3, 4), arc(3, 4, 5)});

  SUBCASE("an alternative valid tree also verifies") {
    auto alt = sup;
    alt.tree[0] = {0, 2}; // (1,2), (2,3)
    CHECK(verify_support(inst, alt).ok);
  }
  SUBCASE("a cycle is rejected") {
    auto bad = sup;
    // commodity 2 arcs: (2,3) (2,4) (3,4) (4,5) (5,3); 2-3-4 is a cycle
    bad.tree[1] = {0, 1, 2};
    auto check = verify_support(inst, bad);
    CHECK_FALSE(check.ok);
    CHECK(check.diagnostics.find("commodity 2") != std::string::npos);
  }
  SUBCASE("wrong arc count is rejected with the counts named") {
    auto bad = sup;
    bad.tree[0] = {0};
    auto check = verify_support(inst, bad);
    CHECK_FALSE(check.ok);
    CHECK(check.diagnostics.find("needs 2") != std::string::npos);
  }
  SUBCASE("unknown arc reference is rejected") {
    auto bad = sup;
    bad.tree[0] = {0, 7};
    auto check = verify_support(inst, bad);
    CHECK_FALSE(check.ok);
    CHECK(check.diagnostics.find("unknown arc") != std::string::npos);
  }
}

TEST_CASE("load_support errors") {
  auto inst = nktest::demo_instance<Rational>();
  SUBCASE("empty file") {
    CHECK_THROWS_WITH_AS(load_support(inst, ""), doctest::Contains("no tree"), ParseError);
  }
  SUBCASE("missing commodity") {
    CHECK_THROWS_WITH_AS(load_support(inst, "tree 1: 1:2 1:3\n"), doctest::Contains("no tree"),
                         ParseError);
  }
  SUBCASE("too many arcs for a commodity") {
    auto text = "tree 1: 1:2 1:3 2:3\ntree 2: 2:3 2:4 4:5\ntree 3: 2:4 3:4 4:5\n";
    CHECK_THROWS_WITH_AS(load_support(inst, text), doctest::Contains("spanning tree needs"),
                         ParseError);
  }
  SUBCASE("unknown arc") {
    auto text = "tree 1: 1:2 3:2\ntree 2: 2:3 2:4 4:5\ntree 3: 2:4 3:4 4:5\n";
    CHECK_THROWS_WITH_AS(load_support(inst, text), doctest::Contains("unknown arc"), ParseError);
  }
}

TEST_CASE("support size matches the network rank") {
  auto check_sizes = [](const Instance<Rational>& inst) {
    auto sup = build_support(inst);
    int total = 0;
    for (const auto& t : sup.tree) total += int(t.size());
    CHECK(total == expected_rank(inst).network);
  };
  check_sizes(nktest::demo_instance<Rational>());
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    GenConfig cfg;
    cfg.seed = seed;
    check_sizes(generate_instance(cfg));
  }
}

TEST_CASE("support round-trips through its file form") {
  auto inst = nktest::demo_instance<Rational>();
  auto sup = load_support(inst, nktest::fixture_text("demo.support"));
  auto again = load_support(inst, serialize_support(inst, sup));
  CHECK(again.tree == sup.tree);
}
