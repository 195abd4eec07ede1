#include <algorithm>
#include <deque>
#include <random>
#include <set>

#include "doctest.h"
#include "twinflip/cosets.hpp"
#include "twinflip/error.hpp"

using namespace twinflip;
using namespace twinflip::cosets;
namespace fm = twinflip::flagmodel;
using fm::FormKind;

namespace {

std::string failures(const CheckReport& r) {
  std::string out;
  for (const auto& i : r.items)
    if (!i.pass) out += i.name + ": " + i.witness + "\n";
  return out;
}

const FlipGroup& gu2_3() {
  static const FlipGroup g(flips::make_form_flip(2, 9, FormKind::Hermitian));
  return g;
}
const FlipGroup& gu3_2() {
  static const FlipGroup g(flips::make_form_flip(3, 4, FormKind::Hermitian));
  return g;
}
const FlipGroup& sp4_3() {
  static const FlipGroup g(flips::make_form_flip(4, 3, FormKind::Alternating));
  return g;
}
// sigma trivial: the symmetric form I over GF(3), the Chevalley involution.
const FlipGroup& o2_3() {
  static const FlipGroup g(flips::make_form_flip(2, 3, FormKind::Hermitian));
  return g;
}

// Orbits of the whole of G_theta on positive chambers, by breadth-first search.
std::size_t brute_orbits(const FlipGroup& g) {
  const auto& fs = g.space();
  std::vector<char> seen(fs.size(), 0);
  std::size_t count = 0;
  for (ChamberId c = 0; c < fs.size(); ++c) {
    if (seen[c]) continue;
    ++count;
    std::deque<ChamberId> q{c};
    seen[c] = 1;
    while (!q.empty()) {
      const auto x = q.front();
      q.pop_front();
      for (fm::Mat h : g.fixed()) {
        const auto y = fs.act(h, x);
        if (!seen[y]) {
          seen[y] = 1;
          q.push_back(y);
        }
      }
    }
  }
  return count;
}

std::size_t involutions(const coxeter::CoxeterSystem& W) {
  std::size_t k = 0;
  for (ElemId w = 0; w < W.order(); ++w) k += W.mul(w, w) == 0;
  return k;
}

}  // namespace

TEST_CASE("the flip on G and its fixed group") {
  CHECK(gu2_3().fixed().size() == 96);
  CHECK(gu3_2().fixed().size() == 648);
  CHECK(sp4_3().fixed().size() == 51840);
  for (const FlipGroup* g : {&gu2_3(), &gu3_2(), &sp4_3(), &o2_3()}) {
    const auto rep = check_group_flip(*g, 7, 100);
    INFO(failures(rep));
    CHECK(rep.ok());
  }
  const auto big = flips::make_form_flip(3, 9, FormKind::Hermitian);
  CHECK(fixed_group(big).size() == 24192);
}

TEST_CASE("orbits of G_theta agree with a brute-force search") {
  CHECK(brute_orbits(gu2_3()) == gu2_3().orbit_count());
  CHECK(brute_orbits(gu3_2()) == gu3_2().orbit_count());
  CHECK(brute_orbits(o2_3()) == o2_3().orbit_count());
}

TEST_CASE("theta-codistance is G_theta-invariant") {
  std::mt19937_64 rng(99);
  for (const FlipGroup* g : {&gu3_2(), &sp4_3()}) {
    const auto& fs = g->space();
    std::uniform_int_distribution<std::size_t> pick(0, g->fixed().size() - 1);
    std::uniform_int_distribution<ChamberId> chamber(0, static_cast<ChamberId>(fs.size() - 1));
    for (int k = 0; k < 500; ++k) {
      const auto h = g->fixed()[pick(rng)];
      const auto c = chamber(rng);
      CHECK(g->flip().codistance(fs.act(h, c)) == g->flip().codistance(c));
    }
  }
}

TEST_CASE("every chamber lies in a theta-stable twin apartment") {
  for (const auto& m : {gu3_2().model(), sp4_3().model(), flips::make_form_flip(3, 9, FormKind::Hermitian)}) {
    const auto N = static_cast<ChamberId>(m.space->size());
    for (ChamberId c = 0; c < 2 * N; c += (c < N ? 1 : 97)) {
      const auto a = theta_stable_apartment_containing(m, c);
      REQUIRE(a.contains(c));
      CHECK(is_theta_stable(*m.flip, a));
      CHECK(is_theta_stable(m, frame_of(m, a)));
      CHECK(a == apartment_of_frame(m, frame_of(m, a)));
    }
  }
}

TEST_CASE("the apartment gate") {
  const auto m = flips::make_form_flip(2, 4, FormKind::Alternating);
  CHECK_THROWS_AS(theta_stable_apartment_containing(m, 0), Error);
  try {
    theta_stable_apartment_containing(m, 0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HypothesisNotMet);
  }
  // Every point is its own perp, so every frame is stable; the override reaches one.
  const auto a = theta_stable_apartment_containing(m, 0, true);
  CHECK(a.contains(0));
  CHECK(is_theta_stable(*m.flip, a));
  CHECK_THROWS_AS(theta_stable_apartment_containing(gu2_3().model(), 1000), Error);
}

TEST_CASE("stable apartment classes") {
  for (const FlipGroup* g : {&gu2_3(), &gu3_2(), &sp4_3()}) {
    const auto s = stable_apartment_classes(*g);
    const auto rep = check_stable_apartments(*g, s);
    INFO(failures(rep));
    CHECK(rep.ok());
  }
  // GU2(3): three orthogonal pairs of anisotropic points and the six pairs
  // of the four isotropic points.
  const auto s = stable_apartment_classes(gu2_3());
  CHECK(s.frames.size() == 9);
  CHECK(s.classes.size() == 2);
}

TEST_CASE("double coset decomposition") {
  const auto& W2 = gu2_3().flip().weyl();
  const auto& W3 = gu3_2().flip().weyl();
  const auto a = double_coset_decomposition(gu2_3());
  CHECK(a.left == 2);
  CHECK(a.right == 2);
  CHECK(a.left == involutions(W2));
  const auto b = double_coset_decomposition(gu3_2());
  CHECK(b.left == 4);
  CHECK(b.right == 4);
  CHECK(b.left == involutions(W3));
  for (const auto* r : {&a, &b}) {
    INFO(failures(r->report));
    CHECK(r->report.ok());
  }
  std::size_t total = 0;
  for (auto s : b.sizes) total += s;
  CHECK(total == gu3_2().space().size());
  const auto c = double_coset_decomposition(sp4_3());
  INFO(failures(c.report));
  CHECK(c.report.ok());
  CHECK(c.left == c.right);
  // A different choice of class representatives gives the same counts.
  for (std::uint64_t seed : {3u, 17u}) {
    const auto d = double_coset_decomposition(gu3_2(), seed);
    CHECK(d.right == b.right);
    CHECK(d.report.ok());
  }
  CHECK(a.to_json(W2).dump() == double_coset_decomposition(gu2_3()).to_json(W2).dump());
  CHECK(a.to_text(W2).find("orbit 1") != std::string::npos);
}

TEST_CASE("codistance fibers") {
  for (const FlipGroup* g : {&gu2_3(), &gu3_2()}) {
    const auto rep = codistance_fiber_check(*g);
    INFO(failures(rep));
    CHECK(rep.ok());
  }
  CHECK(codistance_fiber_check(sp4_3()).passed("fiber.constant_on_orbits"));
}

TEST_CASE("twisted torus orbits") {
  for (const FlipGroup* g : {&gu2_3(), &gu3_2(), &o2_3()}) {
    const auto& W = g->flip().weyl();
    for (ElemId w = 0; w < W.order(); ++w) {
      bool realized = false;
      for (auto v : g->flip().codistances()) realized = realized || v == w;
      if (!realized) {
        CHECK_THROWS_AS(twisted_orbit_check(*g, w), Error);
        continue;
      }
      const auto rep = twisted_orbit_check(*g, w);
      INFO(W.format(w), failures(rep));
      CHECK(rep.ok());
    }
  }
  // Without sigma uniqueness fails: two orbits of anisotropic points over GF(3).
  std::set<std::uint32_t> orbits;
  for (ChamberId c = 0; c < o2_3().space().size(); ++c)
    if (o2_3().flip().codistance(c) == 0) orbits.insert(o2_3().chamber_orbits()[c]);
  CHECK(orbits.size() == 2);
  try {
    twisted_orbit_check(FlipGroup(flips::make_form_flip(3, 9, FormKind::Hermitian)), 0);
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooLarge);
  }
}

TEST_CASE("Springer parametrization") {
  std::size_t v = 0;
  auto rep = springer_parametrization_check(gu2_3(), 1000000, &v);
  INFO(failures(rep));
  CHECK(rep.ok());
  CHECK(v == 2);
  rep = springer_parametrization_check(gu3_2(), 1000000, &v);
  INFO(failures(rep));
  CHECK(rep.ok());
  CHECK(v == 4);
}
