#include "twinflip/flips.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "twinflip/error.hpp"

namespace twinflip::flips {

namespace {

using coxeter::CoxeterSystem;

std::string chamber_str(const TwinBuilding& tb, ChamberId x) {
  return tb.positive(x) ? std::to_string(x) : std::to_string(x - tb.half_size()) + "-";
}

std::vector<ChamberId> sorted_unique(std::vector<ChamberId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

const chambersys::ChamberSystem& positive_system(const QuasiFlip& f) {
  return f.building().base().chamber_system();
}

// All positive residues of every type: ids[J][c] and the Phan flag per id.
struct PhanTable {
  std::vector<std::vector<std::uint32_t>> ids;
  std::vector<std::vector<char>> phan;
  std::vector<std::vector<std::vector<ChamberId>>> members;
};

PhanTable phan_table(const QuasiFlip& f) {
  const auto& C = positive_system(f);
  const TypeMask all = C.all_types();
  PhanTable t;
  t.ids.resize(all + 1u);
  t.phan.resize(all + 1u);
  t.members.resize(all + 1u);
  for (TypeMask J = 0; J <= all; ++J) {
    t.ids[J] = C.residue_ids(J);
    const std::size_t m = *std::max_element(t.ids[J].begin(), t.ids[J].end()) + 1u;
    t.members[J].resize(m);
    for (ChamberId c = 0; c < C.size(); ++c) t.members[J][t.ids[J][c]].push_back(c);
    t.phan[J].resize(m);
    for (std::size_t r = 0; r < m; ++r) t.phan[J][r] = is_phan(f, t.members[J][r]) ? 1 : 0;
  }
  return t;
}

bool is_minimal(const PhanTable& t, TypeMask J, std::uint32_t r) {
  if (!t.phan[J][r]) return false;
  if (J == 0) return true;
  for (TypeMask K = (J - 1) & J;; K = (K - 1) & J) {
    for (ChamberId c : t.members[J][r])
      if (t.phan[K][t.ids[K][c]]) return false;
    if (K == 0) break;
  }
  return true;
}

// Descent steps for every positive chamber inside its J-residue.
std::vector<long> all_descent_steps(const QuasiFlip& f, TypeMask J, const std::vector<std::uint32_t>& rid) {
  const std::size_t n = f.size();
  const std::size_t m = *std::max_element(rid.begin(), rid.end()) + 1u;
  std::vector<int> lo(m, INT32_MAX);
  for (ChamberId c = 0; c < n; ++c) lo[rid[c]] = std::min(lo[rid[c]], f.length(c));
  std::vector<ChamberId> order(n);
  std::iota(order.begin(), order.end(), ChamberId{0});
  std::stable_sort(order.begin(), order.end(), [&](ChamberId a, ChamberId b) { return f.length(a) < f.length(b); });
  std::vector<long> step(n, -1);
  const int r = f.weyl().rank();
  for (ChamberId c : order) {
    if (f.length(c) == lo[rid[c]]) {
      step[c] = c;
      continue;
    }
    long best = -1;
    for (int s = 0; s < r; ++s) {
      if (!(J >> s & 1u)) continue;
      for (ChamberId d : f.building().panel(c, s))
        if (f.length(d) < f.length(c) && step[d] >= 0 && (best < 0 || d < best)) best = d;
    }
    step[c] = best;
  }
  return step;
}

}  // namespace

// --- validation -----------------------------------------------------------------

CheckReport check_quasi_flip(const TwinBuilding& tb, const std::vector<ChamberId>& perm, DiagramInvolution* twist) {
  CheckReport rep;
  const auto& W = tb.weyl();
  const std::size_t n = tb.half_size();
  const int r = W.rank();
  auto& inv = rep.add("theta.involution");
  if (perm.size() != tb.size()) {
    inv.fail("table has " + std::to_string(perm.size()) + " entries, expected " + std::to_string(tb.size()));
    return rep;
  }
  for (ChamberId x = 0; x < perm.size(); ++x) {
    ++inv.checked;
    if (perm[x] >= perm.size()) {
      inv.fail("image of " + chamber_str(tb, x) + " out of range");
      return rep;
    }
    if (perm[perm[x]] != x) inv.fail("theta^2 moves " + chamber_str(tb, x));
  }
  auto& halves = rep.add("theta.swaps_halves");
  for (ChamberId x = 0; x < perm.size(); ++x) {
    ++halves.checked;
    if (tb.positive(x) == tb.positive(perm[x]))
      halves.fail(chamber_str(tb, x) + " -> " + chamber_str(tb, perm[x]) + " stays in its half");
  }
  if (!rep.ok()) return rep;

  // Fit the twist on chamber 0.
  auto& tw = rep.add("theta.weyl_twist");
  std::vector<int> gen_of(W.order(), -1);
  for (int s = 0; s < r; ++s) gen_of[W.gen_id(s)] = s;
  std::vector<int> fit(static_cast<std::size_t>(r), -1);
  for (int s = 0; s < r; ++s) {
    ++tw.checked;
    const auto& P = tb.panel(0, s);
    const ChamberId y = P[0] == 0 ? P[1] : P[0];
    const int t = gen_of[tb.delta(perm[0], perm[y])];
    if (t < 0) {
      tw.fail("neighbours 0 ~" + W.format(W.gen_id(s)) + " " + std::to_string(y) + " map to distance " +
              W.format(tb.delta(perm[0], perm[y])));
      return rep;
    }
    fit[static_cast<std::size_t>(s)] = t;
  }
  const DiagramInvolution th(fit);
  const auto valid = coxeter::diagram_involutions(W.matrix());
  if (std::find(valid.begin(), valid.end(), th) == valid.end()) {
    tw.fail("fitted generator map " + th.to_string() + " is not a diagram involution");
    return rep;
  }
  if (twist) *twist = th;
  tw.witness = th.to_string();
  const auto tt = W.twist_table(th);

  auto& adj = rep.add("theta.adjacency");
  for (ChamberId x = 0; x < n; ++x)
    for (int s = 0; s < r; ++s)
      for (ChamberId y : tb.panel(x, s)) {
        if (y == x) continue;
        ++adj.checked;
        if (tb.delta(perm[x], perm[y]) != W.gen_id(th(s)))
          adj.fail(std::to_string(x) + " ~" + W.format(W.gen_id(s)) + " " + std::to_string(y) + " but images at distance " +
                   W.format(tb.delta(perm[x], perm[y])));
      }
  auto& opp = rep.add("theta.opposition");
  auto& dt = rep.add("theta.delta_transport");
  auto& ct = rep.add("theta.codistance_transport");
  for (ChamberId x = 0; x < n; ++x)
    for (ChamberId y = 0; y < n; ++y) {
      ++dt.checked;
      if (tb.delta(perm[x], perm[y]) != tt[tb.delta(x, y)])
        dt.fail("delta(" + std::to_string(x) + "," + std::to_string(y) + ")=" + W.format(tb.delta(x, y)) +
                " but images at " + W.format(tb.delta(perm[x], perm[y])));
      const ChamberId z = y + static_cast<ChamberId>(n);
      ++opp.checked;
      ++ct.checked;
      if (tb.opposite(x, z) != tb.opposite(perm[x], perm[z]))
        opp.fail(chamber_str(tb, x) + ", " + chamber_str(tb, z) + (tb.opposite(x, z) ? " opposite" : " not opposite") +
                 " but images " + (tb.opposite(perm[x], perm[z]) ? "opposite" : "not opposite"));
      if (tb.codistance(perm[x], perm[z]) != tt[tb.codistance(x, z)])
        ct.fail("codistance(" + chamber_str(tb, x) + "," + chamber_str(tb, z) + ")=" + W.format(tb.codistance(x, z)) +
                " but images at " + W.format(tb.codistance(perm[x], perm[z])));
    }
  return rep;
}

QuasiFlip::QuasiFlip(std::shared_ptr<const TwinBuilding> tb, std::vector<ChamberId> perm)
    : tb_(std::move(tb)), perm_(std::move(perm)) {
  const auto rep = check_quasi_flip(*tb_, perm_, &twist_);
  for (const auto& i : rep.items)
    if (!i.pass) throw Error(ErrorCode::ValidationFailed, i.name + ": " + i.witness);
  twist_table_ = weyl().twist_table(twist_);
  codist_.resize(tb_->half_size());
  min_length_ = INT32_MAX;
  for (ChamberId c = 0; c < codist_.size(); ++c) {
    codist_[c] = tb_->codistance(c, perm_[c]);
    min_length_ = std::min(min_length_, weyl().length(codist_[c]));
  }
}

QuasiFlip build_flip_from_form(const flagmodel::FlagSpace& fs, std::shared_ptr<const TwinBuilding> tb,
                               const flagmodel::Form& form) {
  const std::size_t n = fs.size();
  if (tb->half_size() != n || tb->weyl().order() != fs.weyl().order())
    throw Error(ErrorCode::MixedAmbient, "twin building does not belong to this flag space");
  const auto orth = fs.orthogonal_table(form);
  std::vector<ChamberId> perm(2 * n);
  for (ChamberId c = 0; c < n; ++c) {
    perm[c] = orth[c] + static_cast<ChamberId>(n);
    perm[c + n] = orth[c];
  }
  return QuasiFlip(std::move(tb), std::move(perm));
}

FormFlip make_form_flip(int n, int q, flagmodel::FormKind kind, const flagmodel::Mat* gram, std::size_t flag_limit) {
  FormFlip out;
  out.field = std::make_shared<flagmodel::Field>(q, kind == flagmodel::FormKind::Hermitian);
  out.form = flagmodel::make_form(*out.field, n, kind, gram);
  out.space = std::make_shared<flagmodel::FlagSpace>(out.field, n, flag_limit);
  out.twin = std::make_shared<TwinBuilding>(twinbuild::spherical_to_twin(out.space->building()));
  out.flip = std::make_shared<QuasiFlip>(build_flip_from_form(*out.space, out.twin, out.form));
  return out;
}

// --- theta-codistance -------------------------------------------------------------

ThetaCodistanceTable theta_codistance(const QuasiFlip& flip) {
  ThetaCodistanceTable t;
  t.value = flip.codistances();
  for (ElemId w : t.value) t.length.push_back(flip.weyl().length(w));
  std::vector<char> seen(flip.weyl().order(), 0);
  for (ElemId w : t.value) seen[w] = 1;
  for (ElemId w = 0; w < seen.size(); ++w)
    if (seen[w]) t.realized.push_back(w);
  return t;
}

CheckReport check_theta_codistance(const QuasiFlip& flip) {
  CheckReport rep;
  const auto& W = flip.weyl();
  std::vector<char> twisted(W.order(), 0);
  for (const auto& ti : coxeter::twisted_involutions(W, flip.twist())) twisted[ti.element.id()] = 1;
  auto& inv = rep.add("codistance.twisted_involution");
  auto& en = rep.add("codistance.enumerated");
  for (ChamberId c = 0; c < flip.size(); ++c) {
    const ElemId w = flip.codistance(c);
    ++inv.checked;
    ++en.checked;
    if (flip.twist_elem(w) != W.inverse(w))
      inv.fail("chamber " + std::to_string(c) + " has codistance " + W.format(w));
    if (!twisted[w]) en.fail("chamber " + std::to_string(c) + ": " + W.format(w) + " is not listed");
  }
  return rep;
}

// --- classification -----------------------------------------------------------------

std::vector<ChamberId> panel_fixed_set(const QuasiFlip& flip, ChamberId c, int s) {
  const auto& tb = flip.building();
  const auto& P = tb.panel(c, s);
  std::vector<ChamberId> out;
  for (ChamberId x : P)
    if (twinbuild::proj_residue(tb, P, flip(x)) == x) out.push_back(x);
  return out;
}

Classification classify(const QuasiFlip& flip) {
  Classification cl;
  cl.proper = flip.min_length() == 0;
  cl.flip = flip.is_flip();
  cl.strong = true;
  const auto& tb = flip.building();
  for (ChamberId c = 0; c < tb.size() && cl.strong; ++c)
    for (int s = 0; s < flip.weyl().rank(); ++s) {
      const auto& P = tb.panel(c, s);
      if (P.front() != c) continue;
      if (panel_fixed_set(flip, c, s).size() == P.size()) {
        cl.strong = false;
        cl.strong_witness = "proj_P(theta) = P for the " + flip.weyl().format(flip.weyl().gen_id(s)) +
                            "-panel of chamber " + chamber_str(tb, c);
        break;
      }
    }
  return cl;
}

CheckReport verify_panel_trichotomy(const QuasiFlip& flip) {
  CheckReport rep;
  const auto& tb = flip.building();
  const auto& W = flip.weyl();
  auto& cases = rep.add("trichotomy.cases");
  auto& down = rep.add("trichotomy.descent");
  auto& flat = rep.add("trichotomy.parallel");
  auto& up = rep.add("trichotomy.ascent");
  auto& par = rep.add("trichotomy.parallel_iff_fixed");
  auto& eq = rep.add("equal_numerical_codistance");
  for (ChamberId c = 0; c < flip.size(); ++c) {
    const ElemId w = flip.codistance(c);
    for (int s = 0; s < W.rank(); ++s) {
      const ElemId u = W.left_mul(s, W.right_mul(w, flip.twist_gen(s)));
      const int dl = W.length(u) - W.length(w);
      const auto& P = tb.panel(c, s);
      std::vector<ChamberId> thP;
      for (ChamberId x : P) thP.push_back(flip(x));
      std::vector<ChamberId> onP, onThP;
      for (ChamberId x : P) {
        onP.push_back(twinbuild::proj_residue(tb, P, flip(x)));
        onThP.push_back(twinbuild::proj_residue(tb, thP, x));
      }
      onP = sorted_unique(onP);
      onThP = sorted_unique(onThP);
      const auto thPs = sorted_unique(thP);
      const bool parallel = onP == P && onThP == thPs;
      const std::string where = "chamber " + std::to_string(c) + ", " + W.format(W.gen_id(s)) + "-panel, w=" + W.format(w);
      ++cases.checked;
      ++par.checked;
      if (parallel != (dl == 0) || parallel != (u == w)) par.fail(where);
      for (ChamberId d : P) {
        if (d == c || flip.length(d) != flip.length(c)) continue;
        ++eq.checked;
        if (flip.codistance(d) != w) eq.fail(where + ", neighbour " + std::to_string(d) + " has " + W.format(flip.codistance(d)));
      }
      if (dl == -2) {
        ++down.checked;
        for (ChamberId d : P)
          if (d != c && flip.codistance(d) != u) down.fail(where + ": neighbour " + std::to_string(d) + " has " + W.format(flip.codistance(d)));
        if (onP != std::vector<ChamberId>{c} || onThP != std::vector<ChamberId>{flip(c)}) down.fail(where + ": projections");
      } else if (dl == 0) {
        ++flat.checked;
        if (!parallel) flat.fail(where + ": panels not parallel");
        const bool fixed = twinbuild::proj_residue(tb, P, flip(c)) == c;
        if (fixed != (W.length(W.left_mul(s, w)) < W.length(w))) flat.fail(where + ": projection of theta(c)");
      } else if (dl == 2) {
        ++up.checked;
        std::vector<ChamberId> hits;
        for (ChamberId d : P)
          if (flip.codistance(d) == u) hits.push_back(d);
        if (hits.size() != 1) {
          up.fail(where + ": " + std::to_string(hits.size()) + " chambers at " + W.format(u));
        } else if (onP != hits || onThP != std::vector<ChamberId>{flip(hits[0])}) {
          up.fail(where + ": projections");
        }
      } else {
        cases.fail(where + ": length changes by " + std::to_string(dl));
      }
    }
  }
  return rep;
}

// --- Phan residues ------------------------------------------------------------------

bool is_phan(const QuasiFlip& flip, const std::vector<ChamberId>& R) {
  const auto& tb = flip.building();
  std::vector<char> col(R.size(), 0);
  for (ChamberId c : R) {
    bool row = false;
    for (std::size_t j = 0; j < R.size(); ++j)
      if (tb.codistance(c, flip(R[j])) == 0) {
        row = true;
        col[j] = 1;
      }
    if (!row) return false;
  }
  return std::all_of(col.begin(), col.end(), [](char x) { return x != 0; });
}

std::vector<PhanResidue> phan_residues(const QuasiFlip& flip, TypeMask J) {
  const auto& C = positive_system(flip);
  const auto ids = C.residue_ids(J);
  const std::size_t m = *std::max_element(ids.begin(), ids.end()) + 1u;
  std::vector<std::vector<ChamberId>> mem(m);
  for (ChamberId c = 0; c < C.size(); ++c) mem[ids[c]].push_back(c);
  std::vector<PhanResidue> out;
  for (auto& R : mem)
    if (is_phan(flip, R)) out.push_back({J, std::move(R)});
  return out;
}

std::vector<PhanResidue> minimal_phan_residues(const QuasiFlip& flip) {
  const auto t = phan_table(flip);
  std::vector<PhanResidue> out;
  for (TypeMask J = 0; J < t.ids.size(); ++J)
    for (std::uint32_t r = 0; r < t.members[J].size(); ++r)
      if (is_minimal(t, J, r)) out.push_back({J, t.members[J][r]});
  std::sort(out.begin(), out.end(), [](const PhanResidue& a, const PhanResidue& b) {
    return a.members.front() != b.members.front() ? a.members.front() < b.members.front() : a.type < b.type;
  });
  return out;
}

CheckReport check_phan_residues(const QuasiFlip& flip) {
  CheckReport rep;
  const auto& W = flip.weyl();
  const auto t = phan_table(flip);
  const TypeMask all = W.all_types();
  auto& upward = rep.add("phan.upward_closed");
  auto& inWI = rep.add("phan.codistance_in_W_I");
  auto& meet = rep.add("phan.intersection");
  auto& minimal = rep.add("phan.minimal_constant");
  for (ChamberId c = 0; c < flip.size(); ++c) {
    const TypeMask I = W.support(flip.codistance(c));
    for (TypeMask J = 0; J <= all; ++J) {
      const bool ph = t.phan[J][t.ids[J][c]];
      if ((J & I) == I) {
        ++upward.checked;
        if (!ph) upward.fail("chamber " + std::to_string(c) + ": residue of type " + W.format_mask(J) + " is not Phan");
      }
      if (ph) {
        ++inWI.checked;
        if (!W.in_parabolic(flip.codistance(c), J))
          inWI.fail("chamber " + std::to_string(c) + " in a Phan residue of type " + W.format_mask(J));
        for (TypeMask K = 0; K <= all; ++K) {
          if (!t.phan[K][t.ids[K][c]]) continue;
          ++meet.checked;
          if (!t.phan[J & K][t.ids[J & K][c]])
            meet.fail("chamber " + std::to_string(c) + ", types " + W.format_mask(J) + " and " + W.format_mask(K));
        }
      }
    }
  }
  for (TypeMask J = 0; J <= all; ++J) {
    const ElemId wJ = W.longest_in(J);
    for (std::uint32_t r = 0; r < t.members[J].size(); ++r) {
      if (!is_minimal(t, J, r)) continue;
      for (ChamberId c : t.members[J][r]) {
        ++minimal.checked;
        if (flip.codistance(c) != wJ)
          minimal.fail("minimal Phan residue of type " + W.format_mask(J) + " at chamber " + std::to_string(c) +
                       " has codistance " + W.format(flip.codistance(c)));
      }
    }
  }
  return rep;
}

// --- flip-flop systems and descent ---------------------------------------------------

FlipFlop flip_flop_system(const QuasiFlip& flip, const std::vector<ChamberId>& R) {
  std::vector<ChamberId> all;
  if (R.empty()) {
    all.resize(flip.size());
    std::iota(all.begin(), all.end(), ChamberId{0});
  }
  const auto& src = R.empty() ? all : R;
  FlipFlop ff;
  ff.min_length = INT32_MAX;
  for (ChamberId c : src) ff.min_length = std::min(ff.min_length, flip.length(c));
  for (ChamberId c : src)
    if (flip.length(c) == ff.min_length) ff.members.push_back(c);
  ff.members = sorted_unique(ff.members);
  ff.system = positive_system(flip).induced(ff.members);
  return ff;
}

std::vector<long> descent_steps(const QuasiFlip& flip, const Residue& R) {
  const auto rid = positive_system(flip).residue_ids(R.types);
  auto all = all_descent_steps(flip, R.types, rid);
  std::vector<long> out(flip.size(), -1);
  for (ChamberId c : R.members) out[c] = all[c];
  return out;
}

bool admits_direct_descent(const QuasiFlip& flip, const Residue& R, std::string* witness) {
  const auto st = descent_steps(flip, R);
  for (ChamberId c : R.members)
    if (st[c] < 0) {
      if (witness) *witness = "chamber " + std::to_string(c) + " has no strictly descending gallery";
      return false;
    }
  return true;
}

std::vector<ChamberId> descent_gallery(const QuasiFlip& flip, const Residue& R, ChamberId c) {
  const auto st = descent_steps(flip, R);
  if (st.at(c) < 0) throw Error(ErrorCode::NotFound, "no direct descent from chamber " + std::to_string(c));
  std::vector<ChamberId> g{c};
  while (static_cast<ChamberId>(st[g.back()]) != g.back()) g.push_back(static_cast<ChamberId>(st[g.back()]));
  return g;
}

Homogeneity homogeneity_type(const QuasiFlip& flip) {
  const auto mins = minimal_phan_residues(flip);
  Homogeneity h;
  if (mins.empty()) {
    h.witness = "no minimal Phan residue";
    return h;
  }
  h.homogeneous = true;
  h.K = mins.front().type;
  const auto& W = flip.weyl();
  for (const auto& R : mins)
    if (R.type != h.K) {
      h.homogeneous = false;
      h.witness = "type " + W.format_mask(h.K) + " at chamber " + std::to_string(mins.front().members.front()) +
                  " and type " + W.format_mask(R.type) + " at chamber " + std::to_string(R.members.front());
      break;
    }
  return h;
}

std::vector<ChamberId> bypass_gallery(const QuasiFlip& flip, const Residue& R, ChamberId c0, ChamberId c1,
                                      ChamberId c2) {
  const auto& C = positive_system(flip);
  if (coxeter::popcount(R.types) != 2) throw Error(ErrorCode::NoBypass, "residue is not of rank two");
  for (ChamberId x : {c0, c1, c2})
    if (!R.contains(x)) throw Error(ErrorCode::NoBypass, "chamber " + std::to_string(x) + " is outside the residue");
  auto adjacent = [&](ChamberId a, ChamberId b) {
    if (a == b) return false;
    for (int s = 0; s < C.rank(); ++s)
      if ((R.types >> s & 1u) && C.adjacent(s, a, b)) return true;
    return false;
  };
  if (!adjacent(c0, c1) || !adjacent(c1, c2)) throw Error(ErrorCode::NoBypass, "not a gallery");
  if (!(flip.length(c0) < flip.length(c1)) || !(flip.length(c1) >= flip.length(c2)))
    throw Error(ErrorCode::NoBypass, "numerical codistances do not form a peak or plateau");
  const auto st = descent_steps(flip, R);
  for (ChamberId c : R.members)
    if (st[c] < 0) throw Error(ErrorCode::NoBypass, "residue does not admit direct descent");
  const auto ff = flip_flop_system(flip, R.members);
  std::vector<char> allowed(C.size(), 0);
  for (ChamberId c : ff.members) allowed[c] = 1;
  for (ChamberId c : ff.members)
    if (C.gallery(ff.members.front(), c, R.types, allowed).empty())
      throw Error(ErrorCode::NoBypass, "flip-flop system of the residue is not connected");
  auto descend = [&](ChamberId c) {
    std::vector<ChamberId> g{c};
    while (static_cast<ChamberId>(st[g.back()]) != g.back()) g.push_back(static_cast<ChamberId>(st[g.back()]));
    return g;
  };
  auto g0 = descend(c0);
  auto g2 = descend(c2);
  const auto g1 = C.gallery(g0.back(), g2.back(), R.types, allowed);
  std::vector<ChamberId> out = g0;
  out.insert(out.end(), g1.begin() + 1, g1.end());
  out.insert(out.end(), g2.rbegin() + 1, g2.rend());
  return out;
}

// --- geometricity -----------------------------------------------------------------------

GeometricityResult geometricity_report(const QuasiFlip& flip, const GeometricityOptions& opt) {
  GeometricityResult res;
  auto& rep = res.report;
  const auto& W = flip.weyl();
  const auto& C = positive_system(flip);
  const int q = opt.root_group_order;
  const bool gate = q >= 5 && q % 2 == 1;
  auto& hyp = rep.add("hypotheses");
  hyp.checked = 1;
  if (!gate) {
    const std::string why = "root groups of order " + std::to_string(q) + " are not of odd order at least five";
    if (!opt.override_hypotheses) throw Error(ErrorCode::HypothesisNotMet, why);
    hyp.witness = "overridden: " + why;
    res.overridden = true;
    std::cerr << "warning: " << why << "; hypothesis gate overridden\n";
  }

  const auto ff = flip_flop_system(flip);
  res.flip_flop_size = ff.members.size();
  res.min_length = ff.min_length;
  auto& conn = rep.add("flipflop.connected");
  conn.checked = 1;
  if (!ff.system.is_connected())
    conn.fail(std::to_string(ff.system.residue_count(ff.system.all_types())) + " components");

  res.homogeneity = homogeneity_type(flip);
  auto& hom = rep.add("homogeneous");
  hom.checked = 1;
  if (res.homogeneity.homogeneous)
    hom.witness = "K = " + W.format_mask(res.homogeneity.K);
  else
    hom.fail(res.homogeneity.witness);

  auto& uni = rep.add("flipflop.union_of_minimal_phan");
  {
    std::vector<ChamberId> u;
    for (const auto& R : minimal_phan_residues(flip)) u.insert(u.end(), R.members.begin(), R.members.end());
    u = sorted_unique(u);
    uni.checked = u.size();
    if (u != ff.members)
      uni.fail("union has " + std::to_string(u.size()) + " chambers, flip-flop system " + std::to_string(ff.members.size()));
  }

  auto& cst = rep.add("flipflop.codistance_constant");
  if (res.homogeneity.homogeneous) {
    const ElemId wK = W.longest_in(res.homogeneity.K);
    for (ChamberId c : ff.members) {
      ++cst.checked;
      if (flip.codistance(c) != wK) cst.fail("chamber " + std::to_string(c) + " has " + W.format(flip.codistance(c)));
    }
  } else {
    cst.fail("not homogeneous");
  }

  auto& r2 = rep.add("rank2.direct_descent");
  auto& all = rep.add("residues.direct_descent");
  for (TypeMask J = 0; J <= W.all_types(); ++J) {
    const auto rid = C.residue_ids(J);
    const auto st = all_descent_steps(flip, J, rid);
    auto& item = coxeter::popcount(J) == 2 ? r2 : all;
    for (ChamberId c = 0; c < flip.size(); ++c) {
      ++item.checked;
      if (st[c] < 0) item.fail("chamber " + std::to_string(c) + " in its " + W.format_mask(J) + "-residue");
    }
    if (coxeter::popcount(J) == 2) {
      std::set<std::uint32_t> done;
      for (ChamberId c = 0; c < flip.size(); ++c) {
        if (!done.insert(rid[c]).second) continue;
        const auto R = C.residue(c, J);
        const auto sub = flip_flop_system(flip, R.members);
        const auto comps = sub.system.residue_count(J);
        if (comps != 1) r2.fail("flip-flop system of the " + W.format_mask(J) + "-residue of " + std::to_string(c) +
                                " has " + std::to_string(comps) + " components");
      }
    }
  }

  auto& inh = rep.add("flipflop.inherits_connectedness");
  inh.checked = ff.members.size();
  {
    std::string w;
    if (!chambersys::inherits_connectedness(ff.members, C, ff.members, &w)) inh.fail(w);
  }

  auto& rc = rep.add("residue_system.residually_connected");
  {
    const auto K = res.homogeneity.K;
    const auto rs = chambersys::residue_chamber_system(ff.system, K);
    const auto rr = chambersys::residual_connectedness(rs.system);
    rc.checked = rr.families_checked;
    rc.witness = "K = " + W.format_mask(K) + ", " + std::to_string(rs.system.size()) + " residues";
    if (!rs.system.is_connected()) rc.fail("residue system is not connected");
    if (!rr.ok) rc.fail(rr.witness);
  }
  return res;
}

CheckReport verify_pretty_cool_descent(const QuasiFlip& flip) {
  CheckReport rep;
  const auto& tb = flip.building();
  const auto& W = flip.weyl();
  const std::size_t n = flip.size();
  auto& p1 = rep.add("descent.forward");
  auto& p2 = rep.add("descent.unique_lift");
  auto& hull = rep.add("descent.hull");
  for (ChamberId d = 0; d < n; ++d) {
    const ElemId v = flip.codistance(d);
    // For each w: the lifts c with delta(c, d) = w and codistance w v theta(w)^-1.
    std::vector<std::vector<ChamberId>> lifts(W.order());
    std::vector<char> valid(W.order(), 0);
    for (ElemId w = 1; w < W.order(); ++w) {
      const ElemId r = W.mul(W.mul(w, v), W.inverse(flip.twist_elem(w)));
      valid[w] = W.length(v) == W.length(r) - 2 * W.length(w);
    }
    for (ChamberId c = 0; c < n; ++c) {
      const ElemId w = tb.delta(c, d);
      const ElemId r = flip.codistance(c);
      const ElemId img = W.mul(W.mul(W.inverse(w), r), flip.twist_elem(w));
      if (W.length(img) == W.length(r) - 2 * W.length(w)) {
        ++p1.checked;
        if (img != v)
          p1.fail("c=" + std::to_string(c) + ", d=" + std::to_string(d) + ": expected " + W.format(img) + ", found " + W.format(v));
      }
      if (w != 0 && valid[w] && r == W.mul(W.mul(w, v), W.inverse(flip.twist_elem(w)))) lifts[w].push_back(c);
    }
    std::vector<ChamberId> h;
    for (ElemId w = 1; w < W.order(); ++w) {
      if (!valid[w]) continue;
      ++p2.checked;
      if (lifts[w].size() != 1) {
        p2.fail("d=" + std::to_string(d) + ", w=" + W.format(w) + ": " + std::to_string(lifts[w].size()) + " lifts");
        continue;
      }
      if (h.empty()) h = twinbuild::convex_hull(tb, d, flip(d));
      const ChamberId c = lifts[w][0];
      ++hull.checked;
      if (!std::binary_search(h.begin(), h.end(), c) || !std::binary_search(h.begin(), h.end(), flip(c)))
        hull.fail("d=" + std::to_string(d) + ", c=" + std::to_string(c) + " outside the hull");
    }
  }
  return rep;
}

// --- Moufang sets ------------------------------------------------------------------------

namespace {

using Perm = std::vector<int>;

Perm compose(const Perm& a, const Perm& b) {  // a after b
  Perm out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = a[static_cast<std::size_t>(b[i])];
  return out;
}

Perm inverse(const Perm& a) {
  Perm out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[static_cast<std::size_t>(a[i])] = static_cast<int>(i);
  return out;
}

std::vector<Perm> sorted_perms(std::vector<Perm> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

MoufangSet projective_line(const flagmodel::FlagSpace& line) {
  if (line.n() != 2) throw Error(ErrorCode::BadType, "a projective line needs n = 2");
  const auto& F = line.field();
  MoufangSet M;
  M.field = line.field_ptr();
  for (ChamberId c = 0; c < line.size(); ++c) M.points.push_back(line.chain(c)[0]);
  for (ChamberId x = 0; x < line.size(); ++x) {
    const flagmodel::Vec v = line.point_vector(M.points[x]);
    const flagmodel::Elt a = flagmodel::vget(v, 0), b = flagmodel::vget(v, 1);
    // N = v u^T with u = (-b, a), so N v = 0 and N^2 = 0.
    const flagmodel::Elt u0 = F.neg(b), u1 = a;
    std::vector<Perm> group;
    for (int t = 0; t < F.q(); ++t) {
      flagmodel::Mat g = flagmodel::mat_identity(2);
      const flagmodel::Elt vs[2] = {a, b}, us[2] = {u0, u1};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          g = flagmodel::mset(g, i, j, F.add(flagmodel::mget(g, i, j), F.mul(static_cast<flagmodel::Elt>(t), F.mul(vs[i], us[j]))));
      const auto fp = line.flag_permutation(g);
      group.emplace_back(fp.begin(), fp.end());
    }
    M.root_groups.push_back(sorted_perms(std::move(group)));
  }
  return M;
}

CheckReport check_moufang_set(const MoufangSet& M) {
  CheckReport rep;
  const std::size_t n = M.root_groups.size();
  auto& fix = rep.add("moufang.fixes_point");
  auto& sharp = rep.add("moufang.sharply_transitive");
  auto& grp = rep.add("moufang.subgroup");
  auto& conj = rep.add("moufang.conjugation");
  for (std::size_t x = 0; x < n; ++x) {
    const auto& U = M.root_groups[x];
    for (const auto& g : U) {
      ++fix.checked;
      if (g[x] != static_cast<int>(x)) fix.fail("U_" + std::to_string(x) + " moves its point");
      for (const auto& h : U) {
        ++grp.checked;
        if (!std::binary_search(U.begin(), U.end(), compose(g, inverse(h)))) grp.fail("U_" + std::to_string(x) + " not closed");
      }
      for (std::size_t y = 0; y < n; ++y) {
        std::vector<Perm> c;
        for (const auto& k : M.root_groups[y]) c.push_back(compose(compose(g, k), inverse(g)));
        ++conj.checked;
        if (sorted_perms(std::move(c)) != M.root_groups[static_cast<std::size_t>(g[y])])
          conj.fail("U_" + std::to_string(y) + " conjugated by an element of U_" + std::to_string(x));
      }
    }
    // |U| = n - 1 and a regular orbit of one point.
    ++sharp.checked;
    if (U.size() != n - 1) sharp.fail("|U_" + std::to_string(x) + "| = " + std::to_string(U.size()));
    const std::size_t base = x == 0 ? 1 : 0;
    std::vector<int> img(n, 0);
    for (const auto& g : U) ++img[static_cast<std::size_t>(g[base])];
    for (std::size_t y = 0; y < n; ++y)
      if (y != x && img[y] != 1) sharp.fail("U_" + std::to_string(x) + " not sharply transitive");
  }
  return rep;
}

std::vector<int> form_involution(const flagmodel::FlagSpace& line, const flagmodel::Form& form) {
  if (line.n() != 2) throw Error(ErrorCode::BadType, "a projective line needs n = 2");
  const auto t = line.orthogonal_table(form);
  return {t.begin(), t.end()};
}

CheckReport check_moufang_automorphism(const MoufangSet& M, const std::vector<int>& phi) {
  CheckReport rep;
  const std::size_t n = M.root_groups.size();
  auto& inv = rep.add("phi.involution");
  auto& norm = rep.add("phi.permutes_root_groups");
  if (phi.size() != n) {
    inv.fail("wrong size");
    return rep;
  }
  for (std::size_t x = 0; x < n; ++x) {
    ++inv.checked;
    if (phi[static_cast<std::size_t>(phi[x])] != static_cast<int>(x)) inv.fail("phi^2 moves " + std::to_string(x));
  }
  if (!inv.pass) return rep;
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<Perm> c;
    for (const auto& g : M.root_groups[x]) c.push_back(compose(compose(phi, g), phi));
    ++norm.checked;
    if (sorted_perms(std::move(c)) != M.root_groups[static_cast<std::size_t>(phi[x])])
      norm.fail("phi U_" + std::to_string(x) + " phi is not U_" + std::to_string(phi[x]));
  }
  return rep;
}

int moufang_second_fixed_point(const MoufangSet& M, const std::vector<int>& phi, int inf, int a) {
  const auto& U = M.root_groups.at(static_cast<std::size_t>(inf));
  if (U.size() % 2 == 0)
    throw Error(ErrorCode::NotDivisible, "root group of order " + std::to_string(U.size()) + " is not uniquely 2-divisible");
  if (phi.at(static_cast<std::size_t>(inf)) != inf) throw Error(ErrorCode::HypothesisNotMet, "phi moves the base point");
  if (a == inf) throw Error(ErrorCode::HypothesisNotMet, "a must differ from the base point");
  const int pa = phi.at(static_cast<std::size_t>(a));
  if (pa == a) return a;
  for (const auto& g : U) {
    if (g[static_cast<std::size_t>(a)] != pa) continue;
    // h = g^((|U|+1)/2) squares to g in a group of odd order.
    Perm h(g.size());
    std::iota(h.begin(), h.end(), 0);
    for (std::size_t k = 0; k < (U.size() + 1) / 2; ++k) h = compose(g, h);
    return h[static_cast<std::size_t>(a)];
  }
  throw Error(ErrorCode::MismatchBug, "root group is not transitive");
}

}  // namespace twinflip::flips
