// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <deque>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "twinflip/cosets.hpp"
#include "twinflip/error.hpp"
#include "twinflip/flips.hpp"
#include "twinflip/rgdcheck.hpp"

using namespace twinflip;
namespace fm = twinflip::flagmodel;
using chambersys::ChamberId;
using coxeter::ElemId;
using fm::FormKind;

namespace {

struct Outcome {
  bool pass = true;
  std::string note;

  void expect(bool ok, const std::string& what) {
    if (!ok && pass) note = what;
    pass = pass && ok;
  }
  void report(const CheckReport& r, const std::string& what) {
    for (const auto& i : r.items)
      if (!i.pass) return expect(false, what + ": " + i.name + ": " + i.witness);
  }
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.expect(false, std::string("exception: ") + e.what());
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && s > budget_s) o.expect(false, "runtime " + std::to_string(s) + " s over budget");
  if (!o.pass) ++failures;
  std::printf("%s %d %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", id, title, s, o.pass ? "" : ": ", o.note.c_str());
  std::fflush(stdout);
}

// Type A_{r}: involutions of S_{r+1} counted as permutations.
std::size_t permutation_involutions(int m) {
  std::vector<int> p(static_cast<std::size_t>(m));
  std::iota(p.begin(), p.end(), 0);
  std::size_t k = 0;
  do {
    bool inv = true;
    for (int i = 0; i < m; ++i) inv = inv && p[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])] == i;
    k += inv;
  } while (std::next_permutation(p.begin(), p.end()));
  return k;
}

std::size_t gaussian_product(int n, int q) {
  std::size_t out = 1, qi = 1;
  for (int i = 1; i <= n; ++i) {
    qi *= static_cast<std::size_t>(q);
    out *= (qi - 1) / static_cast<std::size_t>(q - 1);
  }
  return out;
}

bool nondegenerate(const fm::Field& F, const fm::Form& form, int n, const fm::Subspace& s) {
  fm::Mat g = 0;
  for (int i = 0; i < s.dim; ++i)
    for (int j = 0; j < s.dim; ++j)
      g = fm::mset(g, i, j, fm::pair(F, n, form, s.rows[static_cast<std::size_t>(i)], s.rows[static_cast<std::size_t>(j)]));
  return fm::mat_rank(F, s.dim, g) == s.dim;
}

// Flags all of whose members carry a nondegenerate restriction of the form.
std::vector<ChamberId> nondegenerate_flags(const flips::FormFlip& m) {
  const auto& fs = *m.space;
  std::vector<ChamberId> out;
  for (ChamberId c = 0; c < fs.size(); ++c) {
    bool ok = true;
    for (int i = 0; i < fs.n() - 1; ++i)
      ok = ok && nondegenerate(fs.field(), m.form, fs.n(), fs.subspace(fs.chain(c)[static_cast<std::size_t>(i)]));
    if (ok) out.push_back(c);
  }
  return out;
}

// Flags containing a nondegenerate plane.
std::vector<ChamberId> nondegenerate_plane_flags(const flips::FormFlip& m) {
  const auto& fs = *m.space;
  std::vector<ChamberId> out;
  for (ChamberId c = 0; c < fs.size(); ++c)
    if (nondegenerate(fs.field(), m.form, fs.n(), fs.subspace(fs.chain(c)[1]))) out.push_back(c);
  return out;
}

std::size_t brute_orbits(const cosets::FlipGroup& g) {
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

std::size_t weyl_involutions(const coxeter::CoxeterSystem& W) {
  std::size_t k = 0;
  for (ElemId w = 0; w < W.order(); ++w) k += W.mul(w, w) == 0;
  return k;
}

const flips::FormFlip& hermitian39() {
  static const auto m = flips::make_form_flip(3, 9, FormKind::Hermitian);
  return m;
}
const flips::FormFlip& alternating43() {
  static const auto m = flips::make_form_flip(4, 3, FormKind::Alternating);
  return m;
}

}  // namespace

int main() {
  criterion(1, "twisted involutions", 1.0, [](Outcome& o) {
    const std::size_t expected[] = {2, 4, 10, 26};
    for (int r = 1; r <= 4; ++r) {
      const auto W = coxeter::build_system(coxeter::standard_matrix("A" + std::to_string(r)));
      const auto n = coxeter::twisted_involutions(*W, coxeter::DiagramInvolution::identity(r)).size();
      o.expect(n == expected[r - 1] && n == permutation_involutions(r + 1), "A" + std::to_string(r) + " count");
    }
    for (const char* t : {"A2", "A3", "B2", "A1xA1"}) {
      const auto W = coxeter::build_system(coxeter::standard_matrix(t));
      for (const auto& theta : coxeter::diagram_involutions(W->matrix()))
        o.report(coxeter::verify_twisted_involutions(*W, theta), std::string(t) + " " + theta.to_string());
    }
  });

  criterion(2, "building and twin axioms on flag buildings", 30.0, [](Outcome& o) {
    const std::pair<int, int> cases[] = {{2, 3}, {2, 9}, {3, 2}, {3, 4}, {3, 9}, {4, 3}};
    const std::size_t counts[] = {4, 10, 21, 105, 910, 2080};
    for (std::size_t k = 0; k < 6; ++k) {
      const auto [n, q] = cases[k];
      const auto fs = std::make_shared<fm::FlagSpace>(std::make_shared<fm::Field>(q), n);
      const std::string at = "n=" + std::to_string(n) + " q=" + std::to_string(q);
      o.expect(fs->size() == counts[k] && fs->size() == gaussian_product(n, q), at + " flag count");
      o.report(twinbuild::check_building_axioms(*fs->building()), at);
      o.report(twinbuild::check_twin_axioms(twinbuild::TwinBuilding(fs->building())), at);
    }
  });

  criterion(3, "RGD, BN and twin BN axioms for GL2(3) and GL3(3)", 60.0, [](Outcome& o) {
    for (int n : {2, 3}) {
      const auto d = rgd::standard_rgd(std::make_shared<fm::Field>(3), n);
      const auto t = rgd::standard_twin_bn(d.group);
      const std::string at = "GL" + std::to_string(n) + "(3)";
      o.report(rgd::check_rgd(d), at);
      o.report(rgd::check_bn(t.bn(+1)), at);
      o.report(rgd::check_bn(t.bn(-1)), at);
      o.report(rgd::check_twin_bn(t), at);
      const auto bn = t.bn(+1);
      std::vector<fm::Mat> reps;
      for (ElemId w = 0; w < t.weyl->order(); ++w) reps.push_back(rgd::weyl_rep(bn, w));
      const auto part = rgd::double_cosets(*t.group, t.plus, t.plus, reps);
      for (ElemId w = 0; w < t.weyl->order(); ++w) {
        std::size_t expect = t.plus.size();
        for (int i = 0; i < t.weyl->length(w); ++i) expect *= 3;
        o.expect(part.sizes[w] == expect, at + " Bruhat cell " + t.weyl->format(w));
      }
    }
  });

  criterion(4, "hermitian flip over GF(9), n = 3", 60.0, [](Outcome& o) {
    const auto& m = hermitian39();
    const auto cls = flips::classify(*m.flip);
    o.expect(cls.proper && cls.strong, "proper and strong");
    const auto geo = flips::geometricity_report(*m.flip, {9, false});
    o.report(geo.report, "geometricity");
    o.expect(geo.homogeneity.homogeneous && geo.homogeneity.K == 0, "empty-homogeneous");
    o.expect(flips::flip_flop_system(*m.flip).members == nondegenerate_flags(m), "flip-flop = nondegenerate flags");
    for (const char* k : {"flipflop.connected", "flipflop.inherits_connectedness", "residue_system.residually_connected"})
      o.expect(geo.report.passed(k), k);
  });

  criterion(5, "alternating flip over GF(3), n = 4", 120.0, [](Outcome& o) {
    const auto& m = alternating43();
    const auto& flip = *m.flip;
    const auto& W = flip.weyl();
    o.expect(flip.min_length() == 2, "minimal numerical codistance");
    const auto ff = flips::flip_flop_system(flip);
    o.expect(ff.members == nondegenerate_plane_flags(m), "C^theta = flags with a nondegenerate plane");
    const ElemId s1s3 = W.from_word({0, 2});
    for (ChamberId c : ff.members) o.expect(flip.codistance(c) == s1s3, "codistance s1s3");
    const auto geo = flips::geometricity_report(flip, {3, true});
    o.expect(geo.homogeneity.homogeneous && geo.homogeneity.K == coxeter::mask_of({0, 2}), "K = {s1,s3}");
    o.expect(geo.report.passed("residue_system.residually_connected"), "C^theta_K residually connected");
  });

  criterion(6, "panel trichotomy on fixtures 4 and 5", 0, [](Outcome& o) {
    o.report(flips::verify_panel_trichotomy(*hermitian39().flip), "hermitian");
    o.report(flips::verify_panel_trichotomy(*alternating43().flip), "alternating");
  });

  criterion(7, "theta-stable twin apartments on fixtures 4 and 5", 0, [](Outcome& o) {
    for (const auto* m : {&hermitian39(), &alternating43()}) {
      const auto& tb = *m->twin;
      for (ChamberId c = 0; c < tb.size(); ++c) {
        const auto a = cosets::theta_stable_apartment_containing(*m, c);
        if (!a.contains(c) || !cosets::is_theta_stable(*m->flip, a) || !twinbuild::verify_twin_apartment(tb, a).ok()) {
          o.expect(false, "chamber " + std::to_string(c));
          break;
        }
      }
      const cosets::FlipGroup g(*m);
      o.report(cosets::check_stable_apartments(g, cosets::stable_apartment_classes(g)), "stable apartments");
    }
  });

  criterion(8, "double coset decompositions", 0, [](Outcome& o) {
    {
      const auto t0 = std::chrono::steady_clock::now();
      const cosets::FlipGroup g(flips::make_form_flip(3, 4, FormKind::Hermitian));
      const auto d = cosets::double_coset_decomposition(g);
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      o.expect(s < 10.0, "GU3(2) orbit computation over 10 s");
      o.expect(d.left == 4 && d.right == 4 && d.left == weyl_involutions(g.flip().weyl()), "GL3(4) count 4");
      o.expect(brute_orbits(g) == 4, "GL3(4) brute-force orbits");
      o.report(d.report, "GL3(4)");
      o.report(cosets::codistance_fiber_check(g), "GL3(4) fibers");
    }
    {
      const cosets::FlipGroup g(flips::make_form_flip(2, 9, FormKind::Hermitian));
      const auto d = cosets::double_coset_decomposition(g);
      o.expect(d.left == 2 && d.right == 2 && d.left == weyl_involutions(g.flip().weyl()), "GL2(9) count 2");
      o.expect(brute_orbits(g) == 2, "GL2(9) brute-force orbits");
      o.report(d.report, "GL2(9)");
      o.report(cosets::codistance_fiber_check(g), "GL2(9) fibers");
    }
    {
      const cosets::FlipGroup g(alternating43());
      const auto d = cosets::double_coset_decomposition(g);
      o.expect(d.left == d.right, "GL4(3) sides");
      o.report(d.report, "GL4(3)");
      std::size_t total = 0;
      for (auto s : d.sizes) total += s;
      o.expect(total == 2080, "GL4(3) orbit sizes");
    }
  });

  criterion(9, "Moufang fixed-point doubling", 0, [](Outcome& o) {
    const auto F = std::make_shared<fm::Field>(9);
    const fm::FlagSpace line(F, 2);
    const auto M = flips::projective_line(line);
    o.report(flips::check_moufang_set(M), "PG(1,9)");
    const auto form = fm::make_form(*F, 2, FormKind::Hermitian);
    const auto phi = flips::form_involution(line, form);
    o.report(flips::check_moufang_automorphism(M, phi), "phi");
    std::set<int> fixed;
    for (int x = 0; x < 10; ++x) {
      const auto v = line.point_vector(M.points[static_cast<std::size_t>(x)]);
      if (fm::pair(*F, 2, form, v, v) == 0) fixed.insert(x);
      o.expect((phi[static_cast<std::size_t>(x)] == x) == (fm::pair(*F, 2, form, v, v) == 0), "fixed points");
    }
    o.expect(fixed.size() == 4, "four fixed points");
    for (int inf : fixed)
      for (int a = 0; a < 10; ++a) {
        if (fixed.count(a)) continue;
        const int b = flips::moufang_second_fixed_point(M, phi, inf, a);
        o.expect(b != inf && fixed.count(b) == 1, "second fixed point from " + std::to_string(inf));
      }
    const auto F4 = std::make_shared<fm::Field>(4);
    const fm::FlagSpace line4(F4, 2);
    const auto M4 = flips::projective_line(line4);
    const auto phi4 = flips::form_involution(line4, fm::make_form(*F4, 2, FormKind::Hermitian));
    int inf4 = -1;
    for (int x = 0; x < 5; ++x)
      if (phi4[static_cast<std::size_t>(x)] == x) inf4 = x;
    bool rejected = false;
    try {
      flips::moufang_second_fixed_point(M4, phi4, inf4, (inf4 + 1) % 5);
    } catch (const Error& e) {
      rejected = e.code() == ErrorCode::NotDivisible;
    }
    o.expect(inf4 >= 0 && rejected, "GF(4) rejected as not uniquely 2-divisible");
  });

  criterion(10, "deterministic reports", 0, [](Outcome& o) {
    std::vector<cli::RunConfig> runs(5);
    runs[0].command = "coxeter", runs[0].type = "A3", runs[0].twist = "all";
    runs[1].command = "building", runs[1].n = 3, runs[1].q = 4;
    runs[2].command = "flip", runs[2].n = 3, runs[2].q = 9;
    runs[3].command = "cosets", runs[3].n = 3, runs[3].q = 4, runs[3].seed = 7;
    runs[4].command = "rgd", runs[4].n = 2, runs[4].q = 3;
    for (const auto& c : runs) {
      std::ostringstream log;
      const auto a = cli::execute(c, log).dump(2), b = cli::execute(c, log).dump(2);
      o.expect(a == b, c.command + " report differs between runs");
    }
  });

  return failures == 0 ? 0 : 1;
}
