#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "twinflip/error.hpp"
#include "twinflip/flagmodel.hpp"

using namespace twinflip;
using namespace twinflip::flagmodel;
namespace cx = twinflip::coxeter;

namespace {

std::shared_ptr<const Field> gf(int q, bool frob = true) { return std::make_shared<Field>(q, frob); }

// All vectors of GF(q)^n.
std::vector<Vec> all_vectors(const Field& F, int n) {
  std::vector<Vec> out;
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(F.q());
  for (std::size_t code = 0; code < total; ++code) {
    Vec v = 0;
    std::size_t c = code;
    for (int i = 0; i < n; ++i) {
      v = vset(v, i, static_cast<Elt>(c % static_cast<std::size_t>(F.q())));
      c /= static_cast<std::size_t>(F.q());
    }
    out.push_back(v);
  }
  return out;
}

// Members of a subspace, by brute force over all coefficient vectors.
std::set<Vec> members(const Field& F, const Subspace& s) {
  std::set<Vec> out;
  for (Vec coeff : all_vectors(F, s.dim)) {
    Vec v = 0;
    for (int r = 0; r < s.dim; ++r) v = vadd(F, s.n, v, vscale(F, s.n, vget(coeff, r), s.rows[static_cast<std::size_t>(r)]));
    out.insert(v);
  }
  return out;
}

Mat random_invertible(const Field& F, int n, std::mt19937& rng) {
  std::uniform_int_distribution<int> d(0, F.q() - 1);
  for (;;) {
    Mat m = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m = mset(m, i, j, static_cast<Elt>(d(rng)));
    if (mat_rank(F, n, m) == n) return m;
  }
}

}  // namespace

TEST_CASE("finite fields") {
  for (int q : {2, 3, 4, 5, 7, 9, 11, 13}) {
    const Field F(q);
    CHECK(F.verify().ok());
    int fixed = 0;
    for (int a = 0; a < q; ++a) fixed += F.sigma(static_cast<Elt>(a)) == a;
    CHECK(fixed == (F.degree() == 2 ? F.p() : q));
  }
  CHECK(Field(4).modulus() == std::pair<int, int>{1, 1});
  CHECK(Field(9).modulus() == std::pair<int, int>{0, 1});
  CHECK(Field(9, false).sigma_trivial());
  CHECK_THROWS_AS(Field(8), Error);
  CHECK_THROWS_AS(Field(6), Error);
  CHECK_THROWS_AS(Field(17), Error);
}

TEST_CASE("spans and perps agree with brute force") {
  const Field F(3);
  const int n = 3;
  const auto all = all_vectors(F, n);
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Vec> gens{all[pick(rng)], all[pick(rng)]};
    const auto S = span(F, n, gens);
    // closure oracle
    std::set<Vec> closure{0};
    for (bool grew = true; grew;) {
      grew = false;
      for (Vec a : std::vector<Vec>(closure.begin(), closure.end()))
        for (Vec g : gens)
          for (int c = 0; c < 3; ++c) grew |= closure.insert(vadd(F, n, a, vscale(F, n, static_cast<Elt>(c), g))).second;
    }
    CHECK(members(F, S) == closure);
    const auto form = make_form(F, n, FormKind::Hermitian);
    std::set<Vec> orth;
    for (Vec v : all) {
      bool ok = true;
      for (Vec u : closure) ok = ok && pair(F, n, form, u, v) == 0;
      if (ok) orth.insert(v);
    }
    CHECK(members(F, perp(F, form, S)) == orth);
  }
}

TEST_CASE("flag counts match the Gaussian product") {
  struct C {
    int n, q;
    std::size_t count;
  };
  for (auto c : {C{2, 3, 4}, C{2, 9, 10}, C{3, 2, 21}, C{3, 4, 105}, C{3, 9, 910}, C{4, 3, 2080}}) {
    CHECK(gaussian_flag_count(c.n, c.q) == c.count);
    const FlagSpace fs(gf(c.q), c.n);
    CHECK(fs.size() == c.count);
  }
  CHECK_THROWS_AS(FlagSpace(gf(3), 4, 100), Error);
  CHECK_THROWS_AS(FlagSpace(gf(3), 5), Error);
}

TEST_CASE("subspace counts by brute force") {
  const Field F(2);
  const int n = 4;
  std::set<std::set<Vec>> subspaces[5];
  const auto all = all_vectors(F, n);
  for (Vec a : all)
    for (Vec b : all) {
      const auto S = span(F, n, {a, b});
      subspaces[S.dim].insert(members(F, S));
    }
  const FlagSpace fs(gf(2), n);
  CHECK(fs.of_dim(1).size() == subspaces[1].size());
  CHECK(fs.of_dim(2).size() == subspaces[2].size());
  CHECK(fs.of_dim(3).size() == 15);
  for (SubspaceId s = 0; s < fs.subspace_count(); ++s) CHECK(fs.index_of(fs.subspace(s)) == s);
}

TEST_CASE("isotropic points") {
  for (auto [q, expect] : {std::pair{4, 9}, std::pair{9, 28}}) {
    const FlagSpace fs(gf(q), 3);
    const auto form = make_form(fs.field(), 3, FormKind::Hermitian);
    int iso = 0;
    for (SubspaceId p : fs.of_dim(1)) {
      const Vec v = fs.point_vector(p);
      iso += pair(fs.field(), 3, form, v, v) == 0;
    }
    CHECK(iso == expect);
  }
}

TEST_CASE("forms validate") {
  const Field F(9);
  CHECK_THROWS_AS(make_form(F, 3, FormKind::Alternating), Error);
  Mat bad = mat_identity(2);
  bad = mset(bad, 0, 1, 3);  // x is not fixed by sigma
  CHECK_THROWS_AS(make_form(F, 2, FormKind::Hermitian, &bad), Error);
  Mat zero = 0;
  CHECK_THROWS_AS(make_form(F, 2, FormKind::Hermitian, &zero), Error);
  CHECK(parse_form_kind("symplectic") == FormKind::Alternating);
  CHECK_THROWS_AS(parse_form_kind("quadratic"), Error);
}

TEST_CASE("orthogonal flags are bidual") {
  struct C {
    int n, q;
    FormKind k;
  };
  for (auto c : {C{3, 4, FormKind::Hermitian}, C{3, 9, FormKind::Hermitian}, C{4, 3, FormKind::Alternating},
                 C{2, 9, FormKind::Hermitian}}) {
    const FlagSpace fs(gf(c.q), c.n);
    const auto form = make_form(fs.field(), c.n, c.k);
    const auto orth = fs.orthogonal_table(form);
    for (ChamberId x = 0; x < fs.size(); ++x) CHECK(orth[orth[x]] == x);
    // orth reverses relative position up to conjugation by w0
    const auto& W = fs.weyl();
    for (ChamberId x = 0; x < fs.size(); x += 5)
      for (ChamberId y = 0; y < fs.size(); y += 3) {
        const auto d = fs.relative_position(x, y);
        CHECK(fs.relative_position(orth[x], orth[y]) == W.mul(W.mul(W.longest(), d), W.longest()));
      }
  }
}

TEST_CASE("table-free relative position agrees") {
  const auto F = gf(3);
  const FlagSpace fs(F, 3);
  const auto& W = fs.weyl();
  for (ChamberId x = 0; x < fs.size(); x += 3)
    for (ChamberId y = 0; y < fs.size(); y += 2)
      CHECK(relative_position(*F, W, fs.flag(x), fs.flag(y)) == fs.relative_position(x, y));
  const FlagSpace other(F, 2);
  CHECK_THROWS_AS(relative_position(*F, W, fs.flag(0), other.flag(0)), Error);
}

TEST_CASE("coordinate flags") {
  const FlagSpace fs(gf(2), 4);
  const auto& W = fs.weyl();
  const auto E = fs.standard_flag();
  for (ElemId w = 0; w < W.order(); ++w) {
    CHECK(fs.perm_element(fs.element_perm(w)) == w);
    const auto c = fs.coordinate_flag(fs.element_perm(w));
    CHECK(fs.relative_position(E, c) == w);
    // P_w E is the coordinate flag of w
    CHECK(fs.act(mat_permutation(4, fs.element_perm(w)), E) == c);
  }
  // adjacency
  for (int s = 0; s < 3; ++s) CHECK(fs.relative_position(E, fs.coordinate_flag(fs.element_perm(W.gen_id(s)))) == W.gen_id(s));
  CHECK(fs.relative_position(E, fs.coordinate_flag({3, 2, 1, 0})) == W.longest());
}

TEST_CASE("flag buildings satisfy the axioms") {
  for (auto [n, q] : {std::pair{3, 2}, std::pair{3, 3}, std::pair{2, 4}}) {
    const FlagSpace fs(gf(q), n);
    const auto B = fs.building();
    CHECK(check_building_axioms(*B).ok());
    // panels have q+1 chambers
    for (ChamberId c = 0; c < fs.size(); c += 7)
      for (int s = 0; s < n - 1; ++s) CHECK(B->panel(c, s).size() == static_cast<std::size_t>(q + 1));
  }
}

TEST_CASE("group orders") {
  const Field F3(3), F4(4), F9(9), F2(2);
  CHECK(group_elements(F3, 2, GroupKind::GL).size() == 48);
  CHECK(gl_order(3, 4) == 181440);
  CHECK(group_elements(F4, 3, GroupKind::GL).size() == 181440);
  CHECK(gl_order(3, 9) > kGroupLimit);
  CHECK_THROWS_AS(group_elements(F9, 3, GroupKind::GL), Error);
  const auto h4 = make_form(F4, 3, FormKind::Hermitian);
  CHECK(group_elements(F4, 3, GroupKind::Unitary, &h4).size() == 648);
  const auto h9 = make_form(F9, 2, FormKind::Hermitian);
  CHECK(group_elements(F9, 2, GroupKind::Unitary, &h9).size() == 96);
  const auto a3 = make_form(F3, 4, FormKind::Alternating);
  CHECK(group_elements(F3, 4, GroupKind::Symplectic, &a3).size() == 51840);
  CHECK_THROWS_AS(group_elements(F3, 4, GroupKind::Unitary, &a3), Error);
  CHECK_THROWS_AS(form_group(F3, 4, a3, 1000), Error);
  // Form groups agree with filtering GL.
  const auto gl = group_elements(F2, 2, GroupKind::GL);
  const auto alt = make_form(F2, 2, FormKind::Alternating);
  std::vector<Mat> filtered;
  for (Mat g : gl)
    if (mat_mul(F2, 2, mat_transpose(2, g), mat_mul(F2, 2, alt.gram, g)) == alt.gram) filtered.push_back(g);
  CHECK(filtered == form_group(F2, 2, alt));
}

TEST_CASE("matrix algebra") {
  const Field F(9);
  std::mt19937 rng(11);
  for (int t = 0; t < 50; ++t) {
    const Mat a = random_invertible(F, 3, rng), b = random_invertible(F, 3, rng);
    CHECK(mat_mul(F, 3, a, mat_inverse(F, 3, a)) == mat_identity(3));
    CHECK(mat_transpose(3, mat_mul(F, 3, a, b)) == mat_mul(F, 3, mat_transpose(3, b), mat_transpose(3, a)));
    CHECK(mat_sigma(F, 3, mat_mul(F, 3, a, b)) == mat_mul(F, 3, mat_sigma(F, 3, a), mat_sigma(F, 3, b)));
    const Vec v = static_cast<Vec>(rng() & 0x777);
    CHECK(mat_apply(F, 3, mat_mul(F, 3, a, b), v) == mat_apply(F, 3, a, mat_apply(F, 3, b, v)));
  }
  CHECK_THROWS_AS(mat_inverse(F, 2, 0), Error);
}

TEST_CASE("the general linear group acts by isometries") {
  const FlagSpace fs(gf(3), 3);
  const auto& F = fs.field();
  std::mt19937 rng(3);
  for (int t = 0; t < 12; ++t) {
    const Mat g = random_invertible(F, 3, rng), h = random_invertible(F, 3, rng);
    const auto pg = fs.flag_permutation(g), ph = fs.flag_permutation(h);
    const auto pgh = fs.flag_permutation(mat_mul(F, 3, g, h));
    for (ChamberId c = 0; c < fs.size(); ++c) CHECK(pgh[c] == pg[ph[c]]);
    for (ChamberId x = 0; x < fs.size(); x += 11)
      for (ChamberId y = 0; y < fs.size(); y += 5) CHECK(fs.relative_position(pg[x], pg[y]) == fs.relative_position(x, y));
    CHECK(fs.act(g, 4) == pg[4]);
    CHECK(fs.index_of(act(F, g, fs.flag(4))) == pg[4]);
  }
  CHECK(fs.flag_permutation(mat_identity(3))[17] == 17);
}

TEST_CASE("apartments from frames") {
  const FlagSpace fs(gf(3), 3);
  const auto& W = fs.weyl();
  const auto frames = fs.frames();
  // ordered bases / |GL1|^3 / 3!
  CHECK(frames.size() == gl_order(3, 3) / 8 / 6);
  for (std::size_t i = 0; i < frames.size(); i += 37) {
    const auto A = fs.apartment_from_frame(frames[i]);
    CHECK(A.size() == 6);
    CHECK(std::set<ChamberId>(A.begin(), A.end()).size() == 6);
    std::set<ElemId> seen;
    for (ChamberId c : A) seen.insert(fs.relative_position(A[0], c));
    CHECK(seen.size() == W.order());
  }
  const auto std_frame = std::vector<SubspaceId>{fs.index_of(span(fs.field(), 3, {0x001})),
                                                 fs.index_of(span(fs.field(), 3, {0x010})),
                                                 fs.index_of(span(fs.field(), 3, {0x100}))};
  const auto A = fs.apartment_from_frame(std_frame);
  CHECK(fs.relative_position(A.front(), A.back()) == W.longest());
  const auto p = fs.of_dim(1);
  const auto dep = std::vector<SubspaceId>{fs.index_of(span(fs.field(), 3, {0x001})),
                                           fs.index_of(span(fs.field(), 3, {0x010})),
                                           fs.index_of(span(fs.field(), 3, {0x011}))};
  try {
    fs.apartment_from_frame(dep);
    FAIL("expected DependentFrame");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DependentFrame);
  }
  CHECK_THROWS_AS(fs.apartment_from_frame({p[0], p[1]}), Error);
}

TEST_CASE("frame counts") {
  CHECK(FlagSpace(gf(3), 4).frames().size() == 63180);
  CHECK(FlagSpace(gf(9), 3).frames().size() == 110565);
}

TEST_CASE("flag export") {
  const FlagSpace fs(gf(2), 3);
  std::ostringstream out;
  fs.export_flags(out);
  const auto text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 21);
  CHECK(enumerate_flags(3, fs.field()).size() == 21);
}
