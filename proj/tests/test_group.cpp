#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pp/group.hpp"
#include "pp/rng.hpp"

using namespace pp;

namespace {

Partition trivial(int m, int n) {
  std::vector<int> all(static_cast<std::size_t>(m + n));
  std::iota(all.begin(), all.end(), 1);
  return validate_partition(m, n, {all});
}

// every valid partition with components of size >= 2 on m+n <= 3 indices
std::vector<Partition> small_partitions() {
  return {trivial(1, 1), trivial(1, 2), trivial(2, 1)};
}

std::set<IVec> primitive_box(const Partition& p, std::int64_t bound) {
  std::set<IVec> out;
  const int d = p.dimension();
  IVec v(static_cast<std::size_t>(d), -bound);
  while (true) {
    if (is_in_P_pi(v, p)) out.insert(v);
    int pos = d - 1;
    while (pos >= 0 && v[pos] == bound) {
      v[pos] = -bound;
      --pos;
    }
    if (pos < 0) break;
    ++v[pos];
  }
  return out;
}

}  // namespace

TEST_CASE("group_generators") {
  SUBCASE("pair component gives the four unitriangular transvections") {
    const auto gens = group_generators(trivial(1, 1));
    CHECK(gens.size() == 4);
    std::set<std::vector<std::int64_t>> mats;
    for (const auto& g : gens) {
      CHECK(imat_det(g.matrix) == 1);
      mats.insert(g.matrix.a);
    }
    CHECK(mats.count({1, 1, 0, 1}) == 1);
    CHECK(mats.count({1, -1, 0, 1}) == 1);
    CHECK(mats.count({1, 0, 1, 1}) == 1);
    CHECK(mats.count({1, 0, -1, 1}) == 1);
  }
  SUBCASE("component of size nu yields 2 nu (nu - 1) generators") {
    CHECK(group_generators(trivial(2, 1)).size() == 2 * 3 * 2);
    CHECK(group_generators(validate_partition(2, 2, {{1, 2}, {3, 4}})).size() == 2 * (2 * 1) * 2);
  }
  SUBCASE("generators fix coordinates outside their component") {
    const auto gens = group_generators(validate_partition(2, 2, {{1, 2}, {3, 4}}));
    for (const auto& g : gens) {
      const auto& t = g.word.front();
      for (int i = 0; i < 4; ++i) {
        if (i == t.row) continue;
        for (int j = 0; j < 4; ++j) CHECK(g.matrix(i, j) == (i == j ? 1 : 0));
      }
    }
  }
}

TEST_CASE("orbit_ball") {
  SUBCASE("unit ball of the full plane partition has all eight primitive points") {
    const auto orbit = orbit_ball(trivial(1, 1), 1, 64);
    CHECK(orbit.completed);
    const std::set<IVec> got(orbit.vectors.begin(), orbit.vectors.end());
    CHECK(got == primitive_box(trivial(1, 1), 1));
    CHECK(got.size() == 8);
  }
  SUBCASE("single transvection sends the base point to (2,1)") {
    const auto e12 = word_to_element(2, {{0, 1, 1}});
    CHECK(apply_word(e12.word, {1, 1}) == IVec{2, 1});
    CHECK(is_in_P_pi({2, 1}, trivial(1, 1)));
  }
  SUBCASE("orbit equals the primitive box for every small partition and bound") {
    for (const auto& p : small_partitions())
      for (std::int64_t bound : {1, 2, 3, 5}) {
        const auto orbit = orbit_ball(p, bound, 256);
        CHECK(orbit.completed);
        const std::set<IVec> got(orbit.vectors.begin(), orbit.vectors.end());
        CHECK(got == primitive_box(p, bound));
      }
  }
  SUBCASE("word budget exhaustion is reported") {
    const auto orbit = orbit_ball(trivial(1, 1), 3, 1);
    CHECK_FALSE(orbit.completed);
    CHECK(orbit.depth_reached == 1);
  }
}

TEST_CASE("reduce_to_base") {
  SUBCASE("base point needs the empty word") {
    CHECK(reduce_to_base({1, 1}, trivial(1, 1)).empty());
    CHECK(reduce_to_base({1, 1, 1}, trivial(2, 1)).empty());
  }
  SUBCASE("worked example (2,1)") {
    const auto word = reduce_to_base({2, 1}, trivial(1, 1));
    CHECK(apply_word(word, {1, 1}) == IVec{2, 1});
  }
  SUBCASE("rejects non-members") {
    CHECK_THROWS_AS(reduce_to_base({2, 4}, trivial(1, 1)), std::invalid_argument);
  }
  SUBCASE("round-trips every primitive point with |v| <= 10, m+n <= 3") {
    for (const auto& p : small_partitions()) {
      const IVec base(static_cast<std::size_t>(p.dimension()), 1);
      for (const auto& v : primitive_box(p, 10)) {
        const auto word = reduce_to_base(v, p);
        CHECK(apply_word(word, base) == v);
      }
    }
  }
  SUBCASE("multi-component reduction stays inside components") {
    const Partition p = validate_partition(2, 2, {{1, 3}, {2, 4}});
    for (const IVec v : {IVec{3, 5, 2, -2}, IVec{-7, 1, 4, 9}, IVec{1, 0, 0, 1}}) {
      if (!is_in_P_pi(v, p)) continue;
      const auto word = reduce_to_base(v, p);
      CHECK(apply_word(word, IVec(4, 1)) == v);
    }
  }
}

TEST_CASE("act_right") {
  const Partition p = trivial(1, 1);
  SUBCASE("identity leaves X alone") {
    const auto id = word_to_element(2, {});
    const Mat X(1, 2, {0.3, 0.7});
    const Mat Y = act_right(X, id, false);
    CHECK(Y.a == X.a);
  }
  SUBCASE("inverse action composes to the identity") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Transvection> word;
      for (int i = 0; i < 6; ++i) {
        const int r = static_cast<int>(rng.next() % 2);
        word.push_back({r, 1 - r, rng.next() & 1 ? 1 : -1});
      }
      const auto g = word_to_element(2, word);
      CHECK(imat_det(g.matrix) == 1);
      Mat X(1, 2, {rng.next_box(), rng.next_box()});
      const Mat back = act_right(act_right(X, g, true), g, false);
      for (std::size_t i = 0; i < X.a.size(); ++i) CHECK(std::fabs(back.a[i] - X.a[i]) <= 1e-10);
    }
  }
  SUBCASE("transport identity (X g^-1)(g v) = X v") {
    SplitMix64 rng(18);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Transvection> word;
      for (int i = 0; i < 5; ++i) {
        const int r = static_cast<int>(rng.next() % 2);
        word.push_back({r, 1 - r, rng.next() & 1 ? 1 : -1});
      }
      const auto g = word_to_element(2, word);
      const Mat X(1, 2, {rng.next_box(), rng.next_box()});
      const IVec v = {static_cast<std::int64_t>(rng.next() % 9) - 4,
                      static_cast<std::int64_t>(rng.next() % 9) - 4};
      const Mat Xp = act_right(X, g, true);
      const IVec gv = imat_vec(g.matrix, v);
      double lhs = 0.0, rhs = 0.0;
      for (int j = 0; j < 2; ++j) {
        lhs += Xp(0, j) * static_cast<double>(gv[j]);
        rhs += X(0, j) * static_cast<double>(v[j]);
      }
      CHECK(std::fabs(lhs - rhs) <= 1e-10);
    }
  }
}

TEST_CASE("transport_solution") {
  const PsiFunction psi = make_power_psi(100.0, 0.0);  // roomy budget
  SUBCASE("identity transport") {
    const auto id = word_to_element(2, {});
    const auto rec = transport_solution(Mat(1, 1, {0.3}), Mat(1, 1, {1.0}), {0.0}, psi, {2, -1}, id, 1, 1);
    CHECK(rec.v_out == IVec{2, -1});
    CHECK(rec.residual_out == rec.residual_in);
    CHECK(rec.norm_chain_ok);
    CHECK(rec.scaled_bound_ok);
  }
  SUBCASE("worked example preserves the residual exactly") {
    const auto g = word_to_element(2, {{1, 0, 1}});  // [[1,0],[1,1]]
    const auto rec = transport_solution(Mat(1, 1, {0.3}), Mat(1, 1, {1.0}), {0.0},
                                        make_power_psi(0.5, 0.0), {2, -1}, g, 1, 4);
    CHECK(rec.v_out == IVec{2, 1});
    CHECK(std::fabs(rec.residual_in - 0.4) <= 1e-15);
    CHECK(std::fabs(rec.residual_out - rec.residual_in) <= 1e-12);
  }
  SUBCASE("norm chain over random words and vectors") {
    SplitMix64 rng(19);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Transvection> word;
      for (int i = 0; i < 4; ++i) {
        const int r = static_cast<int>(rng.next() % 3);
        int c = static_cast<int>(rng.next() % 3);
        if (c == r) c = (c + 1) % 3;
        word.push_back({r, c, rng.next() & 1 ? 1 : -1});
      }
      const auto g = word_to_element(3, word);
      IVec v(3);
      for (auto& x : v) x = static_cast<std::int64_t>(rng.next() % 15) - 7;
      const IVec gv = imat_vec(g.matrix, v);
      std::int64_t gnorm = 0;
      for (std::int64_t e : g.matrix.a) gnorm = std::max(gnorm, e < 0 ? -e : e);
      CHECK(sup_norm(gv) <= 3 * gnorm * std::max<std::int64_t>(1, sup_norm(v)));
    }
  }
  SUBCASE("precondition: v must satisfy the dilated inequality") {
    const auto id = word_to_element(2, {});
    CHECK_THROWS_AS(transport_solution(Mat(1, 1, {0.3}), Mat(1, 1, {1.0}), {0.0},
                                       make_power_psi(0.01, 0.0), {2, -1}, id, 1, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("word serialization round-trips") {
  const std::vector<Transvection> word = {{0, 1, 1}, {1, 0, -1}, {2, 0, 1}};
  CHECK(to_string(word) == "E(1,2)^+1 E(2,1)^-1 E(3,1)^+1");
  const auto back = parse_word(to_string(word));
  REQUIRE(back.size() == word.size());
  for (std::size_t i = 0; i < word.size(); ++i) {
    CHECK(back[i].row == word[i].row);
    CHECK(back[i].col == word[i].col);
    CHECK(back[i].sign == word[i].sign);
  }
  CHECK(to_string(std::vector<Transvection>{}) == "id");
  CHECK(parse_word("id").empty());
  CHECK_THROWS_AS(parse_word("E(0,1)^+1"), std::invalid_argument);
}

TEST_CASE("integer matrix helpers") {
  SUBCASE("unimodular inverse is exact") {
    SplitMix64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<Transvection> word;
      const int dim = 2 + static_cast<int>(rng.next() % 3);
      for (int i = 0; i < 8; ++i) {
        const int r = static_cast<int>(rng.next() % dim);
        int c = static_cast<int>(rng.next() % dim);
        if (c == r) c = (c + 1) % dim;
        word.push_back({r, c, rng.next() & 1 ? 1 : -1});
      }
      const auto g = word_to_element(dim, word);
      CHECK(imat_det(g.matrix) == 1);
      const IMat inv = imat_inverse_unimodular(g.matrix);
      CHECK(imat_mul(g.matrix, inv) == imat_identity(dim));
      CHECK(imat_mul(inv, g.matrix) == imat_identity(dim));
    }
  }
  SUBCASE("overflow in long words is caught") {
    std::vector<Transvection> word;
    for (int i = 0; i < 200; ++i) {
      word.push_back({0, 1, 1});
      word.push_back({1, 0, 1});
    }
    CHECK_THROWS_AS(word_to_element(2, word), std::overflow_error);
  }
}
