#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "twinflip/chambersys.hpp"
#include "twinflip/coxeter.hpp"
#include "twinflip/error.hpp"

using namespace twinflip;
using namespace twinflip::chambersys;
namespace cx = twinflip::coxeter;

namespace {

// Coxeter complex: chambers = W, w ~s ws.
ChamberSystem thin_system(const cx::CoxeterSystem& W) {
  std::vector<std::vector<std::uint32_t>> cls;
  std::vector<std::string> labels;
  for (int s = 0; s < W.rank(); ++s) {
    std::vector<std::uint32_t> p(W.order());
    for (cx::ElemId w = 0; w < W.order(); ++w) p[w] = std::min(w, W.right_mul(w, s));
    cls.push_back(p);
    labels.push_back(W.labels()[static_cast<std::size_t>(s)]);
  }
  return ChamberSystem(labels, cls);
}

// Oracle: W_J-coset of w by closure under right multiplication.
std::set<cx::ElemId> coset(const cx::CoxeterSystem& W, cx::ElemId w, TypeSet J) {
  std::set<cx::ElemId> out;
  for (cx::ElemId u = 0; u < W.order(); ++u)
    if (W.in_parabolic(u, J)) out.insert(W.mul(w, u));
  return out;
}

}  // namespace

TEST_CASE("residues of the thin A2 system") {
  const auto W = cx::build_system(cx::standard_matrix("A2"));
  const auto C = thin_system(*W);
  const auto s1 = W->gen_id(0);
  CHECK(C.residue(s1, 0).members == std::vector<ChamberId>{s1});
  CHECK(C.residue(s1, 0b01).members == std::vector<ChamberId>{0, s1});
  CHECK(C.residue(0, 0b11).members.size() == 6);
  CHECK_THROWS_AS(C.residue(99, 1), Error);
  CHECK_THROWS_AS(C.residue(0, 0b100), Error);
}

TEST_CASE("residues are parabolic cosets") {
  for (const char* t : {"A3", "B3", "A1xA2"}) {
    const auto W = cx::build_system(cx::standard_matrix(t));
    const auto C = thin_system(*W);
    for (TypeSet J = 0; J <= C.all_types(); ++J) {
      const auto ids = C.residue_ids(J);
      for (cx::ElemId w = 0; w < W->order(); w += 3) {
        const auto R = C.residue(w, J);
        const auto oracle = coset(*W, w, J);
        CHECK(std::set<ChamberId>(R.members.begin(), R.members.end()) == oracle);
        for (ChamberId m : R.members) CHECK(ids[m] == ids[w]);
      }
    }
  }
}

TEST_CASE("residue chamber systems") {
  const auto W = cx::build_system(cx::standard_matrix("A3"));
  const auto C = thin_system(*W);
  const auto K = cx::mask_of({0, 2});
  const auto RS = residue_chamber_system(C, K);
  CHECK(RS.system.size() == 6);
  CHECK(RS.system.rank() == 1);
  for (std::uint32_t r = 0; r < 6; ++r) CHECK(std::count(RS.residue_of.begin(), RS.residue_of.end(), r) == 4);
  // K = {} is a copy; K = I collapses to one chamber.
  const auto copy = residue_chamber_system(C, 0).system;
  CHECK(copy.size() == C.size());
  CHECK(copy == C);
  CHECK(residue_chamber_system(C, C.all_types()).system.size() == 1);
  // Iterating agrees with taking the union.
  const auto a = residue_chamber_system(C, 0b001);
  const auto b = residue_chamber_system(a.system, 0b010);  // new index 1 is old type 2
  const auto c = residue_chamber_system(C, 0b101);
  CHECK(b.system.size() == c.system.size());
  for (ChamberId x = 0; x < C.size(); ++x)
    for (ChamberId y = 0; y < C.size(); ++y)
      CHECK((b.residue_of[a.residue_of[x]] == b.residue_of[a.residue_of[y]]) ==
            (c.residue_of[x] == c.residue_of[y]));
  // J-residues of C_K correspond to (J u K)-residues of C.
  const auto ids = RS.system.residue_ids(1);
  const auto big = C.residue_ids(C.all_types());
  for (ChamberId x = 0; x < C.size(); ++x)
    for (ChamberId y = 0; y < C.size(); ++y)
      CHECK((ids[RS.residue_of[x]] == ids[RS.residue_of[y]]) == (big[x] == big[y]));
}

TEST_CASE("residual connectedness") {
  for (const char* t : {"A2", "A3", "B3", "A1xA1"}) {
    const auto W = cx::build_system(cx::standard_matrix(t));
    const auto rep = residual_connectedness(thin_system(*W));
    CHECK(rep.ok);
    CHECK(rep.families_checked > 0);
  }
  const ChamberSystem two({"1", "2"}, {{0, 1}, {0, 1}});
  CHECK_FALSE(is_residually_connected(two));
  CHECK_FALSE(two.is_connected());
  // 4-cycle a-b-c-d with ~1: {a,b},{c,d} and ~2: {b,c},{d,a}.
  const ChamberSystem cyc({"1", "2"}, {{0, 0, 1, 1}, {0, 1, 1, 0}});
  CHECK(cyc.is_connected());
  CHECK(is_residually_connected(cyc));
  // Triangle a,b,c with ~1 {a,b},{c}; ~2 {b,c},{a}; ~3 {c,a},{b}: every
  // corank-one residue is the whole system, which is not a single 3-residue.
  const ChamberSystem tri({"1", "2", "3"}, {{0, 0, 1}, {0, 1, 1}, {0, 1, 0}});
  const auto r = residual_connectedness(tri);
  CHECK_FALSE(r.ok);
  CHECK_FALSE(r.witness.empty());
}

TEST_CASE("galleries and inheritance") {
  const auto W = cx::build_system(cx::standard_matrix("A2"));
  const auto C = thin_system(*W);
  const auto w0 = W->longest();
  const auto g = C.gallery(0, w0, C.all_types());
  CHECK(g.size() == 4);
  CHECK(g.front() == 0);
  CHECK(g.back() == w0);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    bool adj = false;
    for (int s = 0; s < 2; ++s) adj = adj || (C.adjacent(s, g[i], g[i + 1]) && g[i] != g[i + 1]);
    CHECK(adj);
  }
  CHECK(C.gallery(0, w0, 0b01).empty());
  std::vector<ChamberId> all(C.size());
  for (ChamberId c = 0; c < C.size(); ++c) all[c] = c;
  CHECK(inherits_connectedness(all, C, all));
  CHECK(inherits_connectedness({3}, C, {3}));
  // The hexagon minus one chamber is a path: still inherits connectedness.
  const auto s2 = W->gen_id(1);
  std::vector<ChamberId> path;
  for (ChamberId c = 0; c < C.size(); ++c)
    if (c != s2) path.push_back(c);
  CHECK(inherits_connectedness(path, C, path));
  // Removing s1 and w0 isolates s1s2.
  const auto s1 = W->gen_id(0);
  std::vector<ChamberId> cut;
  for (ChamberId c = 0; c < C.size(); ++c)
    if (c != s1 && c != w0) cut.push_back(c);
  std::string why;
  CHECK_FALSE(inherits_connectedness(cut, C, cut, &why));
  CHECK_FALSE(why.empty());
  // Restricting X to chambers that stay joined restores the property.
  CHECK(inherits_connectedness(cut, C, {0, s2}));
}

TEST_CASE("text serialization round trip") {
  const auto W = cx::build_system(cx::standard_matrix("B2"));
  const auto C = thin_system(*W);
  std::stringstream ss;
  C.write(ss);
  CHECK(ChamberSystem::read(ss) == C);
  std::istringstream bad("3 1 a\n0 1");
  CHECK_THROWS_AS(ChamberSystem::read(bad), Error);
}
