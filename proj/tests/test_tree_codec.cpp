#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tsph/error.hpp"
#include "tsph/tree_codec.hpp"

using namespace tsph;

namespace {

StemPile pile_with(std::vector<Bar> bars) {
  StemPile p;
  p.stem = {0, 10, 0, 0, Chirality::M, std::nullopt};
  p.bars = std::move(bars);
  return p;
}

Bar bar(double b, double d, Chirality c, std::optional<BarId> parent) { return {b, d, 0, 0, c, parent}; }

}  // namespace

TEST_SUITE("tree_codec") {
  TEST_CASE("stem only") {
    const auto tree = reconstruct_tree(pile_with({}));
    CHECK(tree.size() == 2);
    const auto walk = contour_walk(tree);
    CHECK(walk.values() == std::vector<double>{0, 10});
  }

  TEST_CASE("single F child realizes max before min") {
    const auto tree = reconstruct_tree(pile_with({bar(2, 5, Chirality::F, kStemId)}));
    const auto walk = contour_walk(tree);
    CHECK(walk.values() == std::vector<double>{0, 5, 2, 5, 10});
    const auto d = compute_ph0(walk);
    REQUIRE(d.size() == 1);
    CHECK(d.bars[0].chirality == Chirality::F);
    CHECK(d.bars[0].death_index < d.bars[0].birth_index);
  }

  TEST_CASE("invalid piles") {
    // Cycle: 1 -> 2 -> 1.
    CHECK_THROWS_AS(reconstruct_tree(pile_with({bar(2, 5, Chirality::F, 2), bar(3, 4, Chirality::F, 1)})),
                    ValidationError);
    // Parent does not straddle.
    CHECK_THROWS_AS(reconstruct_tree(pile_with({bar(2, 5, Chirality::F, kStemId), bar(1, 4, Chirality::M, 1)})),
                    ValidationError);
    CHECK_THROWS_AS(reconstruct_tree(pile_with({bar(2, 5, Chirality::F, 7)})), ValidationError);
    CHECK_THROWS_AS(reconstruct_tree(pile_with({bar(2, 5, Chirality::F, std::nullopt)})), ValidationError);
    // An M child of the stem would sit left of the global minimum.
    CHECK_THROWS_AS(reconstruct_tree(pile_with({bar(2, 5, Chirality::M, kStemId)})), ValidationError);
    // Repeated endpoint values.
    CHECK_THROWS_AS(reconstruct_tree(pile_with({bar(2, 5, Chirality::F, kStemId), bar(3, 5, Chirality::F, kStemId)})),
                    NonGenericError);
  }

  TEST_CASE("same-side siblings nest by merge height") {
    const auto pile = pile_with({bar(2, 5, Chirality::F, kStemId), bar(3, 7, Chirality::F, kStemId),
                                 bar(4, 6, Chirality::M, 2)});
    const auto walk = contour_walk(reconstruct_tree(pile));
    CHECK(same_diagram(compute_ph0(walk), pile));
  }

  TEST_CASE("round trip: series -> pile -> tree -> contour") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<std::size_t> len(1, 64);
    for (int trial = 0; trial < 500; ++trial) {
      const auto s = oracle::random_series(len(rng), rng);
      const auto pile = compute_ph0(s);
      const auto tree = reconstruct_tree(pile);
      CHECK(plane_isomorphic(tree, build_merge_tree(s)));
      REQUIRE(same_diagram(compute_ph0(contour_walk(tree)), pile));
    }
  }

  TEST_CASE("round trip: tree -> contour -> tree") {
    std::mt19937_64 rng(32);
    std::uniform_int_distribution<std::size_t> leaves(1, 64);
    for (int trial = 0; trial < 500; ++trial) {
      const auto tree = oracle::random_plane_tree(leaves(rng), rng);
      tree.validate();
      const auto walk = contour_walk(tree);
      REQUIRE(plane_isomorphic(build_merge_tree(walk), tree));
    }
  }

  TEST_CASE("flipping one chirality flips exactly that bar") {
    std::mt19937_64 rng(33);
    int flips = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const auto s = oracle::random_series(30, rng);
      const auto pile = compute_ph0(s);
      for (std::size_t i = 0; i < pile.bars.size(); ++i) {
        if (pile.bars[i].parent == kStemId) continue;  // stem children must stay F
        auto changed = pile;
        auto& c = changed.bars[i].chirality;
        c = c == Chirality::M ? Chirality::F : Chirality::M;
        const auto d = compute_ph0(contour_walk(reconstruct_tree(changed)));
        CHECK(same_diagram(d, changed));
        CHECK_FALSE(same_diagram(d, pile));
        ++flips;
      }
    }
    CHECK(flips > 100);
  }
}
