#include "twinflip/cosets.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "twinflip/error.hpp"
#include "twinflip/rgdcheck.hpp"
#include "twinflip/union_find.hpp"

namespace twinflip::cosets {

namespace fm = flagmodel;

namespace {

std::string frame_str(const Frame& f) {
  std::string s = "{";
  for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + std::to_string(f[i]);
  return s + "}";
}

Frame image_frame(const std::vector<SubspaceId>& sub_perm, const Frame& f) {
  Frame out;
  for (SubspaceId p : f) out.push_back(sub_perm[p]);
  std::sort(out.begin(), out.end());
  return out;
}

Frame image_frame(const fm::FlagSpace& fs, Mat g, const Frame& f) {
  Frame out;
  for (SubspaceId p : f) out.push_back(fs.act_subspace(g, p));
  std::sort(out.begin(), out.end());
  return out;
}

Mat frame_basis(const fm::FlagSpace& fs, const Frame& f) {
  std::vector<fm::Vec> cols;
  for (SubspaceId p : f) cols.push_back(fs.point_vector(p));
  return fm::mat_from_columns(fs.n(), cols);
}

Mat diagonal(int n, const std::vector<fm::Elt>& d) {
  Mat m = 0;
  for (int i = 0; i < n; ++i) m = fm::mset(m, i, i, d[static_cast<std::size_t>(i)]);
  return m;
}

/// Every diagonal matrix with entries in GF(q)^*.
std::vector<Mat> diagonals(const fm::Field& F, int n) {
  std::vector<Mat> out;
  std::vector<fm::Elt> d(static_cast<std::size_t>(n), 1);
  auto rec = [&](auto&& self, int i) -> void {
    if (i == n) {
      out.push_back(diagonal(n, d));
      return;
    }
    for (int x = 1; x < F.q(); ++x) {
      d[static_cast<std::size_t>(i)] = static_cast<fm::Elt>(x);
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<std::vector<int>> permutations(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// B X B^-1 for every X in xs.
std::vector<Mat> conjugate_all(const fm::Field& F, int n, Mat B, const std::vector<Mat>& xs) {
  const Mat Bi = fm::mat_inverse(F, n, B);
  std::vector<Mat> out;
  out.reserve(xs.size());
  for (Mat x : xs) out.push_back(fm::mat_mul(F, n, fm::mat_mul(F, n, B, x), Bi));
  return out;
}

/// Fix_G of the frame: the torus B D B^-1.
std::vector<Mat> frame_torus(const fm::FlagSpace& fs, const Frame& f) {
  return conjugate_all(fs.field(), fs.n(), frame_basis(fs, f), diagonals(fs.field(), fs.n()));
}

/// Stab_G of the frame: monomial matrices B D P B^-1.
std::vector<Mat> frame_stabilizer(const fm::FlagSpace& fs, const Frame& f) {
  const auto& F = fs.field();
  const int n = fs.n();
  std::vector<Mat> mono;
  for (Mat d : diagonals(F, n))
    for (const auto& p : permutations(n)) mono.push_back(fm::mat_mul(F, n, d, fm::mat_permutation(n, p)));
  auto out = conjugate_all(F, n, frame_basis(fs, f), mono);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Mat> group_or_throw(const fm::Field& F, int n, std::size_t limit) {
  const auto order = fm::gl_order(n, F.q());
  if (order > limit)
    throw Error(ErrorCode::TooLarge, "GL" + std::to_string(n) + "(" + std::to_string(F.q()) + ") has " +
                                         std::to_string(order) + " elements, limit " + std::to_string(limit));
  return fm::group_elements(F, n, fm::GroupKind::GL, nullptr, limit);
}

/// Positions of a set of chambers under g, as a permutation of indices.
Perm induced(const fm::FlagSpace& fs, Mat g, const std::vector<ChamberId>& chambers,
             const std::unordered_map<ChamberId, int>& pos) {
  Perm out;
  out.reserve(chambers.size());
  for (ChamberId c : chambers) {
    const auto it = pos.find(fs.act(g, c));
    if (it == pos.end()) return {};
    out.push_back(it->second);
  }
  return out;
}

std::vector<std::uint32_t> perm_orbits(std::size_t n, const std::vector<Perm>& perms) {
  UnionFind uf(n);
  for (const auto& p : perms)
    for (std::size_t i = 0; i < n; ++i) uf.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(p[i]));
  return uf.labels();
}

std::size_t count_labels(const std::vector<std::uint32_t>& labels) {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1u;
}

}  // namespace

// --- the flip on G --------------------------------------------------------------------------

std::vector<Mat> fixed_group(const FormFlip& m, std::size_t limit) {
  const auto& F = *m.field;
  const int n = m.space->n();
  if (fm::gl_order(n, F.q()) > limit) return fm::form_group(F, n, m.form, limit);
  std::vector<Mat> out;
  const Mat G = m.form.gram;
  for (Mat g : fm::group_elements(F, n, fm::GroupKind::GL, nullptr, limit))
    if (fm::mat_mul(F, n, fm::mat_mul(F, n, fm::mat_transpose(n, fm::mat_sigma(F, n, g)), G), g) == G)
      out.push_back(g);
  return out;
}

FlipGroup::FlipGroup(FormFlip model, std::size_t limit) : m_(std::move(model)) {
  const auto& F = field();
  const auto& fs = space();
  gram_inv_ = fm::mat_inverse(F, n(), m_.form.gram);
  fixed_ = fixed_group(m_, limit);
  gens_ = rgd::generating_set(F, n(), fixed_);
  UnionFind uf(fs.size());
  for (Mat g : gens_) {
    gen_subspaces_.push_back(fs.subspace_permutation(g));
    gen_chambers_.push_back(fs.flag_permutation_from(gen_subspaces_.back()));
    for (ChamberId c = 0; c < fs.size(); ++c) uf.unite(c, gen_chambers_.back()[c]);
  }
  orbits_ = uf.labels();
  orbit_count_ = count_labels(orbits_);
}

Mat FlipGroup::theta(Mat g) const {
  const auto& F = field();
  const Mat t = fm::mat_transpose(n(), fm::mat_sigma(F, n(), fm::mat_inverse(F, n(), g)));
  return fm::mat_mul(F, n(), fm::mat_mul(F, n(), gram_inv_, t), m_.form.gram);
}

Mat FlipGroup::tau(Mat g) const {
  return fm::mat_mul(field(), n(), theta(fm::mat_inverse(field(), n(), g)), g);
}

CheckReport check_group_flip(const FlipGroup& g, std::uint64_t seed, int samples) {
  CheckReport rep;
  const auto& F = g.field();
  const auto& fs = g.space();
  const int n = g.n();
  const auto N = static_cast<ChamberId>(fs.size());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> entry(0, F.q() - 1);
  std::uniform_int_distribution<ChamberId> chamber(0, N - 1);
  auto random_invertible = [&] {
    for (;;) {
      Mat a = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a = fm::mset(a, i, j, static_cast<fm::Elt>(entry(rng)));
      if (fm::mat_rank(F, n, a) == n) return a;
    }
  };
  auto& inv = rep.add("group.theta_involution");
  auto& hom = rep.add("group.theta_homomorphism");
  auto& compat = rep.add("group.chamber_compatible");
  for (int k = 0; k < samples; ++k) {
    const Mat a = random_invertible(), b = random_invertible();
    ++inv.checked;
    if (g.theta(g.theta(a)) != a) inv.fail(fm::mat_string(F, n, a));
    ++hom.checked;
    if (g.theta(fm::mat_mul(F, n, a, b)) != fm::mat_mul(F, n, g.theta(a), g.theta(b)))
      hom.fail(fm::mat_string(F, n, a) + " * " + fm::mat_string(F, n, b));
    const ChamberId c = chamber(rng);
    ++compat.checked;
    const ChamberId lhs = g.flip()(fs.act(a, c));
    const ChamberId rhs = fs.act(g.theta(a), g.flip()(c) - N) + N;
    if (lhs != rhs) compat.fail("chamber " + std::to_string(c) + " under " + fm::mat_string(F, n, a));
  }
  auto& fixed = rep.add("group.fixed_points");
  for (Mat x : g.fixed()) {
    ++fixed.checked;
    if (g.theta(x) != x) fixed.fail(fm::mat_string(F, n, x));
  }
  auto& routes = rep.add("group.fixed_equals_isometries");
  const auto iso = fm::form_group(F, n, g.model().form);
  ++routes.checked;
  if (iso != g.fixed())
    routes.fail(std::to_string(iso.size()) + " isometries, " + std::to_string(g.fixed().size()) + " fixed");
  auto& commute = rep.add("group.commutes_with_flip");
  for (const auto& perm : g.generator_actions())
    for (ChamberId c = 0; c < N; ++c) {
      ++commute.checked;
      if (g.flip()(perm[c]) != perm[g.flip()(c) - N] + N) commute.fail("chamber " + std::to_string(c));
    }
  return rep;
}

// --- theta-stable apartments ----------------------------------------------------------------

bool locally_fixes_opposite(const FormFlip& m) {
  const bool semilinear = m.form.kind == fm::FormKind::Hermitian && !m.field->sigma_trivial();
  return semilinear || m.field->q() % 2 == 1;
}

Frame frame_of(const FormFlip& m, const TwinApartment& a) {
  const auto N = m.space->size();
  Frame f;
  for (ChamberId x : a.plus) f.push_back(m.space->chain(x < N ? x : x - static_cast<ChamberId>(N))[0]);
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  return f;
}

TwinApartment apartment_of_frame(const FormFlip& m, const Frame& f) {
  const auto& fs = *m.space;
  const auto& tb = *m.twin;
  const auto plus = fs.apartment_from_frame(f);
  const ElemId w0 = fs.weyl().longest();
  for (ChamberId x : plus)
    if (tb.delta(plus[0], x) == w0)
      return twinbuild::twin_apartment_from_opposites(tb, plus[0], x + static_cast<ChamberId>(fs.size()));
  throw Error(ErrorCode::MismatchBug, "frame apartment without opposite chambers");
}

bool is_theta_stable(const flips::QuasiFlip& flip, const TwinApartment& a) {
  for (ChamberId x : a.plus)
    if (!a.contains(flip(x))) return false;
  for (ChamberId x : a.minus)
    if (!a.contains(flip(x))) return false;
  return true;
}

bool is_theta_stable(const FormFlip& m, const Frame& f) {
  const auto& fs = *m.space;
  const auto& F = fs.field();
  const int n = fs.n();
  std::vector<SubspaceId> hyper, perps;
  for (int i = 0; i < n; ++i) {
    std::vector<fm::Vec> vs;
    for (int j = 0; j < n; ++j)
      if (j != i) vs.push_back(fs.point_vector(f[static_cast<std::size_t>(j)]));
    hyper.push_back(fs.index_of(fm::span(F, n, vs)));
    perps.push_back(fs.perp(f[static_cast<std::size_t>(i)], m.form));
  }
  std::sort(hyper.begin(), hyper.end());
  std::sort(perps.begin(), perps.end());
  return hyper == perps;
}

TwinApartment theta_stable_apartment_containing(const FormFlip& m, ChamberId c, bool override_hypotheses) {
  const auto& tb = *m.twin;
  const auto& flip = *m.flip;
  const auto& W = tb.weyl();
  const auto N = static_cast<ChamberId>(tb.half_size());
  if (c >= 2 * N) throw Error(ErrorCode::BadChamber, "chamber " + std::to_string(c));
  const bool gate = locally_fixes_opposite(m);
  if (!gate && !override_hypotheses)
    throw Error(ErrorCode::HypothesisNotMet,
                "theta-stable apartments need a semi-linear flip or odd q; got q = " + std::to_string(m.field->q()));
  const ChamberId c0 = c < N ? c : c - N;

  std::string failure;
  auto recipe = [&]() -> std::optional<TwinApartment> {
    const auto dec = coxeter::twisted_decomposition({W.element(flip.codistance(c0)), flip.twist()});
    const ElemId w = W.from_word(dec.prefix);
    const ElemId wI = W.longest_in(dec.subset);
    ChamberId d = N;
    for (ChamberId x = 0; x < N && d == N; ++x)
      if (tb.delta(c0, x) == w) d = x;
    if (d == N) {
      failure = "no chamber at distance " + W.format(w);
      return std::nullopt;
    }
    if (flip.codistance(d) != wI) {
      failure = "descended chamber " + std::to_string(d) + " has codistance " + W.format(flip.codistance(d));
      return std::nullopt;
    }
    const auto R = tb.residue(d, dec.subset);
    for (ChamberId x : R.members) {
      if (tb.delta(d, x) != wI || twinbuild::proj_residue(tb, R.members, flip(x)) != x) continue;
      if (!tb.opposite(d, flip(x))) continue;
      auto a = twinbuild::twin_apartment_from_opposites(tb, d, flip(x));
      if (is_theta_stable(flip, a) && a.contains(c)) return a;
      failure = "apartment through " + std::to_string(d) + " and theta(" + std::to_string(x) + ") is not stable";
      return std::nullopt;
    }
    failure = "no chamber of the residue of " + std::to_string(d) + " opposite d and fixed by proj theta";
    return std::nullopt;
  };
  if (auto a = recipe()) return *a;
  if (gate) throw Error(ErrorCode::MismatchBug, "chamber " + std::to_string(c) + ": " + failure);
  for (ChamberId e = N; e < 2 * N; ++e) {
    if (!tb.opposite(c0, e)) continue;
    auto a = twinbuild::twin_apartment_from_opposites(tb, c0, e);
    if (is_theta_stable(flip, a) && a.contains(c)) return a;
  }
  throw Error(ErrorCode::NotFound, "no theta-stable twin apartment contains chamber " + std::to_string(c));
}

StableApartments stable_apartment_classes(const FlipGroup& g, std::uint64_t seed) {
  const auto& m = g.model();
  const auto& fs = g.space();
  const auto& F = g.field();
  const int n = g.n();
  StableApartments out;
  for (auto& f : fs.frames())
    if (is_theta_stable(m, f)) out.frames.push_back(std::move(f));
  std::sort(out.frames.begin(), out.frames.end());
  std::map<Frame, std::uint32_t> index;
  for (std::uint32_t i = 0; i < out.frames.size(); ++i) index.emplace(out.frames[i], i);
  UnionFind uf(out.frames.size());
  for (const auto& sp : g.generator_subspace_actions())
    for (std::uint32_t i = 0; i < out.frames.size(); ++i) {
      const auto it = index.find(image_frame(sp, out.frames[i]));
      if (it == index.end()) throw Error(ErrorCode::MismatchBug, "G_theta moves a stable frame to an unstable one");
      uf.unite(i, it->second);
    }
  out.class_of = uf.labels();
  out.classes.resize(count_labels(out.class_of));
  for (std::size_t i = 0; i < out.frames.size(); ++i) out.classes[out.class_of[i]].members.push_back(i);

  std::mt19937_64 rng(seed);
  const auto perms = permutations(n);
  const auto diags = diagonals(F, n);
  for (auto& cl : out.classes) {
    std::size_t pick = 0;
    if (seed != 0) pick = std::uniform_int_distribution<std::size_t>(0, cl.members.size() - 1)(rng);
    cl.representative = out.frames[cl.members[pick]];
    cl.apartment = apartment_of_frame(m, cl.representative);
    std::unordered_map<ChamberId, int> pos;
    for (std::size_t k = 0; k < cl.apartment.plus.size(); ++k) pos.emplace(cl.apartment.plus[k], static_cast<int>(k));
    const Mat B = frame_basis(fs, cl.representative);
    const Mat Bi = fm::mat_inverse(F, n, B);
    std::set<Perm> wg, wgt;
    for (const auto& p : perms) {
      const Mat P = fm::mat_permutation(n, p);
      wg.insert(induced(fs, fm::mat_mul(F, n, fm::mat_mul(F, n, B, P), Bi), cl.apartment.plus, pos));
      for (Mat d : diags) {
        const Mat x = fm::mat_mul(F, n, fm::mat_mul(F, n, B, fm::mat_mul(F, n, d, P)), Bi);
        if (g.theta(x) == x) wgt.insert(induced(fs, x, cl.apartment.plus, pos));
      }
    }
    cl.weyl_G.assign(wg.begin(), wg.end());
    cl.weyl_G_theta.assign(wgt.begin(), wgt.end());
  }
  return out;
}

CheckReport check_stable_apartments(const FlipGroup& g, const StableApartments& s) {
  CheckReport rep;
  const auto& m = g.model();
  const auto& fs = g.space();
  const auto& tb = *m.twin;
  const auto N = static_cast<ChamberId>(fs.size());
  const auto order = tb.weyl().order();

  auto& tests = rep.add("stable.frame_test_agrees");
  {
    std::size_t k = 0;
    for (const auto& f : fs.frames()) {
      if (k++ >= 2000) break;
      ++tests.checked;
      if (is_theta_stable(m, f) != is_theta_stable(*m.flip, apartment_of_frame(m, f))) tests.fail(frame_str(f));
    }
  }
  auto& apts = rep.add("stable.twin_apartments");
  auto& weyl = rep.add("stable.weyl_groups");
  for (const auto& cl : s.classes) {
    ++apts.checked;
    if (!twinbuild::verify_twin_apartment(tb, cl.apartment).ok() || !is_theta_stable(*m.flip, cl.apartment))
      apts.fail(frame_str(cl.representative));
    ++weyl.checked;
    const bool sub = std::all_of(cl.weyl_G_theta.begin(), cl.weyl_G_theta.end(), [&](const Perm& p) {
      return std::binary_search(cl.weyl_G.begin(), cl.weyl_G.end(), p);
    });
    if (cl.weyl_G.size() != order || !sub || (!cl.weyl_G.empty() && cl.weyl_G.front().empty()))
      weyl.fail(frame_str(cl.representative) + ": |W_G| = " + std::to_string(cl.weyl_G.size()) +
                ", |W_Gtheta| = " + std::to_string(cl.weyl_G_theta.size()));
  }

  auto& cover = rep.add("stable.cover");
  std::vector<std::vector<ChamberId>> pluses;
  std::vector<char> covered(N, 0);
  for (const auto& f : s.frames) {
    auto p = fs.apartment_from_frame(f);
    std::sort(p.begin(), p.end());
    for (ChamberId x : p) covered[x] = 1;
    pluses.push_back(std::move(p));
  }
  for (ChamberId c = 0; c < N; ++c) {
    ++cover.checked;
    if (!covered[c]) cover.fail("chamber " + std::to_string(c));
  }

  auto& meet = rep.add("stable.intersecting_conjugate");
  std::unordered_map<ChamberId, std::vector<Mat>> stab;
  auto stabilizer = [&](ChamberId c) -> const std::vector<Mat>& {
    auto it = stab.find(c);
    if (it != stab.end()) return it->second;
    std::vector<Mat> out;
    for (Mat x : g.fixed())
      if (fs.act(x, c) == c) out.push_back(x);
    return stab.emplace(c, std::move(out)).first->second;
  };
  for (const auto& cl : s.classes) {
    auto P = cl.apartment.plus;
    std::sort(P.begin(), P.end());
    for (std::size_t j = 0; j < s.frames.size(); ++j) {
      if (s.frames[j] == cl.representative) continue;
      std::vector<ChamberId> common;
      std::set_intersection(P.begin(), P.end(), pluses[j].begin(), pluses[j].end(), std::back_inserter(common));
      if (common.empty()) continue;
      ++meet.checked;
      bool found = false;
      for (Mat x : stabilizer(common[0])) {
        if (image_frame(fs, x, cl.representative) != s.frames[j]) continue;
        if (std::all_of(common.begin(), common.end(), [&](ChamberId y) { return fs.act(x, y) == y; })) {
          found = true;
          break;
        }
      }
      if (!found) meet.fail(frame_str(cl.representative) + " and " + frame_str(s.frames[j]));
    }
  }
  return rep;
}

// --- double cosets --------------------------------------------------------------------------

DoubleCosetReport double_coset_decomposition(const FlipGroup& g, std::uint64_t seed) {
  DoubleCosetReport out;
  const auto& flip = g.flip();
  const auto N = static_cast<ChamberId>(g.space().size());
  const auto& orb = g.chamber_orbits();
  out.left = g.orbit_count();
  out.representatives.assign(out.left, N);
  out.sizes.assign(out.left, 0);
  for (ChamberId c = 0; c < N; ++c) {
    if (out.representatives[orb[c]] == N) out.representatives[orb[c]] = c;
    ++out.sizes[orb[c]];
  }
  for (ChamberId r : out.representatives) out.fiber.push_back(flip.codistance(r));

  auto& inv = out.report.add("cosets.codistance_invariant");
  for (ChamberId c = 0; c < N; ++c) {
    ++inv.checked;
    if (flip.codistance(c) != out.fiber[orb[c]]) inv.fail("chamber " + std::to_string(c));
  }

  const auto s = stable_apartment_classes(g, seed);
  out.class_of_orbit.assign(out.left, s.classes.size());
  std::vector<int> hit(out.left, 0);
  for (std::size_t i = 0; i < s.classes.size(); ++i) {
    const auto& cl = s.classes[i];
    const auto lab = perm_orbits(cl.apartment.plus.size(), cl.weyl_G_theta);
    const auto k = count_labels(lab);
    out.right += k;
    for (std::size_t o = 0; o < k; ++o) {
      const auto p = static_cast<std::size_t>(std::find(lab.begin(), lab.end(), o) - lab.begin());
      const auto chamber_orbit = orb[cl.apartment.plus[p]];
      out.bijection.push_back({i, o, chamber_orbit});
      ++hit[chamber_orbit];
      out.class_of_orbit[chamber_orbit] = i;
    }
  }
  auto& count = out.report.add("cosets.count_equal");
  count.checked = 1;
  if (out.left != out.right)
    count.fail("G_theta-orbits " + std::to_string(out.left) + ", apartment orbits " + std::to_string(out.right));
  auto& bij = out.report.add("cosets.bijection");
  for (std::size_t o = 0; o < out.left; ++o) {
    ++bij.checked;
    if (hit[o] != 1) bij.fail("orbit " + std::to_string(o) + " hit " + std::to_string(hit[o]) + " times");
  }
  if (out.left != out.right) throw Error(ErrorCode::MismatchBug, count.witness);
  return out;
}

nlohmann::json DoubleCosetReport::to_json(const coxeter::CoxeterSystem& W) const {
  nlohmann::json orbits = nlohmann::json::array();
  for (std::size_t o = 0; o < representatives.size(); ++o)
    orbits.push_back({{"representative", representatives[o]},
                      {"size", sizes[o]},
                      {"codistance", W.format(fiber[o])},
                      {"length", W.length(fiber[o])},
                      {"apartment_class", class_of_orbit[o]}});
  nlohmann::json bij = nlohmann::json::array();
  for (const auto& b : bijection) bij.push_back({b[0], b[1], b[2]});
  return {{"left", left}, {"right", right}, {"orbits", orbits}, {"bijection", bij}, {"checks", report.to_json()}};
}

std::string DoubleCosetReport::to_text(const coxeter::CoxeterSystem& W) const {
  std::string out = "G_theta-orbits on chambers: " + std::to_string(left) + "\n";
  out += "W_{G_theta}-orbits over stable apartment classes: " + std::to_string(right) + "\n";
  for (std::size_t o = 0; o < representatives.size(); ++o)
    out += "  orbit " + std::to_string(o) + ": chamber " + std::to_string(representatives[o]) + ", size " +
           std::to_string(sizes[o]) + ", codistance " + W.format(fiber[o]) + ", class " +
           std::to_string(class_of_orbit[o]) + "\n";
  return out + report.to_text();
}

CheckReport codistance_fiber_check(const FlipGroup& g) {
  CheckReport rep;
  const auto& flip = g.flip();
  const auto& W = flip.weyl();
  const auto N = static_cast<ChamberId>(g.space().size());
  const auto& orb = g.chamber_orbits();
  std::vector<ElemId> value(g.orbit_count(), static_cast<ElemId>(W.order()));
  auto& constant = rep.add("fiber.constant_on_orbits");
  for (ChamberId c = 0; c < N; ++c) {
    ++constant.checked;
    auto& v = value[orb[c]];
    if (v == W.order()) v = flip.codistance(c);
    else if (v != flip.codistance(c)) constant.fail("chamber " + std::to_string(c));
  }
  auto& inj = rep.add("fiber.injective");
  std::map<ElemId, std::size_t> seen;
  for (std::size_t o = 0; o < value.size(); ++o) {
    ++inj.checked;
    if (!seen.emplace(value[o], o).second)
      inj.fail("orbits " + std::to_string(seen[value[o]]) + " and " + std::to_string(o) + " share " + W.format(value[o]));
  }
  auto& onto = rep.add("fiber.surjective");
  for (const auto& t : coxeter::twisted_involutions(W, flip.twist())) {
    ++onto.checked;
    if (!seen.count(t.element.id())) onto.fail(W.format(t.element.id()) + " is not realized");
  }
  return rep;
}

CheckReport twisted_orbit_check(const FlipGroup& g, ElemId w, std::size_t limit) {
  CheckReport rep;
  const auto& m = g.model();
  const auto& fs = g.space();
  const auto& F = g.field();
  const int n = g.n();
  const auto N = static_cast<ChamberId>(fs.size());
  std::vector<ChamberId> fiber;
  for (ChamberId c = 0; c < N; ++c)
    if (g.flip().codistance(c) == w) fiber.push_back(c);
  if (fiber.empty()) throw Error(ErrorCode::NotFound, "codistance " + fs.weyl().format(w) + " is not realized");
  const auto G = group_or_throw(F, n, limit);

  std::set<std::uint32_t> left;
  for (ChamberId c : fiber) left.insert(g.chamber_orbits()[c]);

  const auto apt = theta_stable_apartment_containing(m, fiber.front(), true);
  const auto torus = frame_torus(fs, frame_of(m, apt));
  const std::unordered_set<Mat> tset(torus.begin(), torus.end());
  std::vector<Mat> Y;
  {
    std::unordered_set<Mat> seen;
    for (Mat x : G) {
      const Mat t = g.tau(x);
      if (tset.count(t) && seen.insert(t).second) Y.push_back(t);
    }
  }
  std::sort(Y.begin(), Y.end());
  std::unordered_map<Mat, std::uint32_t> yi;
  for (std::uint32_t i = 0; i < Y.size(); ++i) yi.emplace(Y[i], i);
  UnionFind uf(Y.size());
  auto& closed = rep.add("twisted.action_closed");
  for (Mat t : torus) {
    const Mat ti = fm::mat_inverse(F, n, g.theta(t));
    for (std::uint32_t i = 0; i < Y.size(); ++i) {
      ++closed.checked;
      const auto it = yi.find(fm::mat_mul(F, n, fm::mat_mul(F, n, ti, Y[i]), t));
      if (it == yi.end()) closed.fail(fm::mat_string(F, n, Y[i]));
      else uf.unite(i, it->second);
    }
  }
  const auto right = count_labels(uf.labels());
  auto& eq = rep.add("twisted.orbits_equal");
  eq.checked = 1;
  if (left.size() != right)
    eq.fail("G_theta-orbits " + std::to_string(left.size()) + ", twisted torus orbits " + std::to_string(right));
  return rep;
}

CheckReport springer_parametrization_check(const FlipGroup& g, std::size_t limit, std::size_t* v_size) {
  CheckReport rep;
  const auto& m = g.model();
  const auto& fs = g.space();
  const auto& F = g.field();
  const int n = g.n();
  const auto G = group_or_throw(F, n, limit);
  const ChamberId c0 = fs.standard_flag();
  const auto apt = theta_stable_apartment_containing(m, c0, true);
  const auto frame = frame_of(m, apt);
  const auto stab = frame_stabilizer(fs, frame);
  const auto torus = frame_torus(fs, frame);

  std::vector<Mat> S;
  for (Mat x : G)
    if (std::binary_search(stab.begin(), stab.end(), fm::mat_mul(F, n, fm::mat_inverse(F, n, x), g.theta(x))))
      S.push_back(x);

  std::size_t stable = 0;
  for (const auto& f : fs.frames())
    if (is_theta_stable(m, f)) ++stable;
  auto& count = rep.add("springer.stable_translates");
  count.checked = S.size();
  if (S.size() != stab.size() * stable)
    count.fail(std::to_string(S.size()) + " elements, expected " + std::to_string(stab.size()) + " * " +
               std::to_string(stable));

  auto& chambers = rep.add("springer.onto_chambers");
  std::vector<char> reached(fs.size(), 0);
  for (Mat x : S) reached[fs.act(x, c0)] = 1;
  chambers.checked = reached.size();
  for (ChamberId c = 0; c < reached.size(); ++c)
    if (!reached[c]) chambers.fail("chamber " + std::to_string(c) + " is not g.c0 for any g");

  auto& onto = rep.add("springer.covers_orbits");
  std::vector<char> hit(g.orbit_count(), 0);
  for (Mat x : S) hit[g.chamber_orbits()[fs.act(x, c0)]] = 1;
  onto.checked = hit.size();
  for (std::size_t o = 0; o < hit.size(); ++o)
    if (!hit[o]) onto.fail("orbit " + std::to_string(o) + " misses G_theta V B");

  std::unordered_map<Mat, std::uint32_t> si;
  for (std::uint32_t i = 0; i < S.size(); ++i) si.emplace(S[i], i);
  UnionFind uf(S.size());
  auto& closed = rep.add("springer.double_action_closed");
  const auto tgens = rgd::generating_set(F, n, torus);
  for (std::uint32_t i = 0; i < S.size(); ++i) {
    for (Mat h : g.generators()) {
      ++closed.checked;
      const auto it = si.find(fm::mat_mul(F, n, h, S[i]));
      if (it == si.end()) closed.fail(fm::mat_string(F, n, S[i]));
      else uf.unite(i, it->second);
    }
    for (Mat t : tgens) {
      ++closed.checked;
      const auto it = si.find(fm::mat_mul(F, n, S[i], t));
      if (it == si.end()) closed.fail(fm::mat_string(F, n, S[i]));
      else uf.unite(i, it->second);
    }
  }
  if (v_size) *v_size = count_labels(uf.labels());
  return rep;
}

}  // namespace twinflip::cosets
