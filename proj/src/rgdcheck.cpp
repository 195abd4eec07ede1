#include "twinflip/rgdcheck.hpp"

#include <algorithm>
#include <deque>

#include "twinflip/error.hpp"

namespace twinflip::rgd {

using flagmodel::mat_mul;
using flagmodel::mat_string;
using flagmodel::mget;
using flagmodel::mset;

namespace {

std::vector<Mat> sorted(std::vector<Mat> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<Mat> intersect(const std::vector<Mat>& a, const std::vector<Mat>& b) {
  const auto sa = sorted(a), sb = sorted(b);
  std::vector<Mat> out;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(out));
  return out;
}

bool is_member(const std::vector<Mat>& sorted_set, Mat g) { return std::binary_search(sorted_set.begin(), sorted_set.end(), g); }

std::vector<Mat> conjugate_set(const MatrixGroup& G, Mat x, const std::vector<Mat>& U) {
  const Mat xi = G.inv(x);
  std::vector<Mat> out;
  out.reserve(U.size());
  for (Mat u : U) out.push_back(G.mul(G.mul(x, u), xi));
  return sorted(out);
}

Mat elementary(int n, int i, int j, flagmodel::Elt x) {
  return mset(flagmodel::mat_identity(n), i, j, x);
}

Mat root_vector_key(int n, const Root& r) {
  // e_i - e_j as a small integer vector, biased to stay non-negative
  Mat k = 0;
  for (int a = 0; a < n; ++a) {
    const int v = (a == r.i) - (a == r.j) + 4;
    k |= static_cast<Mat>(v) << (4 * a);
  }
  return k;
}

std::string root_name(const Root& r) { return "a" + std::to_string(r.i + 1) + std::to_string(r.j + 1); }

}  // namespace

// --- groups ---------------------------------------------------------------------------

MatrixGroup::MatrixGroup(std::shared_ptr<const Field> field, int n, std::vector<Mat> elements)
    : field_(std::move(field)), n_(n), elements_(sorted(std::move(elements))) {
  index_.reserve(elements_.size());
  for (std::uint32_t i = 0; i < elements_.size(); ++i) index_.emplace(elements_[i], i);
}

long MatrixGroup::index(Mat g) const {
  auto it = index_.find(g);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

std::vector<Mat> generated_subgroup(const Field& F, int n, const std::vector<Mat>& gens) {
  std::vector<Mat> out{flagmodel::mat_identity(n)};
  std::unordered_map<Mat, bool> seen{{out[0], true}};
  for (std::size_t k = 0; k < out.size(); ++k)
    for (Mat g : gens) {
      const Mat x = mat_mul(F, n, out[k], g);
      if (seen.emplace(x, true).second) out.push_back(x);
    }
  return sorted(out);
}

std::vector<Mat> generating_set(const Field& F, int n, const std::vector<Mat>& elements) {
  std::vector<Mat> gens;
  std::vector<Mat> span{flagmodel::mat_identity(n)};
  for (Mat g : sorted(elements)) {
    if (is_member(span, g)) continue;
    gens.push_back(g);
    span = generated_subgroup(F, n, gens);
  }
  return gens;
}

// --- root data -----------------------------------------------------------------------------

int RGDData::root_index(int i, int j) const {
  for (std::size_t k = 0; k < roots.size(); ++k)
    if (roots[k].i == i && roots[k].j == j) return static_cast<int>(k);
  throw Error(ErrorCode::NotFound, "no root a" + std::to_string(i + 1) + std::to_string(j + 1));
}

RGDData standard_rgd(std::shared_ptr<const Field> field, int n, std::size_t limit) {
  const Field& F = *field;
  RGDData d;
  d.group = std::make_shared<MatrixGroup>(field, n, flagmodel::group_elements(F, n, flagmodel::GroupKind::GL, nullptr, limit));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      d.roots.push_back({i, j});
      std::vector<Mat> U;
      for (int x = 0; x < F.q(); ++x) U.push_back(elementary(n, i, j, static_cast<flagmodel::Elt>(x)));
      d.root_groups.push_back(sorted(U));
    }
  for (Mat g : d.group->elements()) {
    bool diag = true;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) diag = diag && (i == j || mget(g, i, j) == 0);
    if (diag) d.torus.push_back(g);
  }
  return d;
}

CheckReport check_rgd(const RGDData& data) {
  const MatrixGroup& G = *data.group;
  const Field& F = G.field();
  const int n = G.n();
  const Mat one = flagmodel::mat_identity(n);
  CheckReport rep;

  auto& sub = rep.add("RGD.subgroups");
  for (std::size_t k = 0; k < data.roots.size(); ++k) {
    ++sub.checked;
    if (generated_subgroup(F, n, data.root_groups[k]) != sorted(data.root_groups[k]))
      sub.fail("U_" + root_name(data.roots[k]) + " is not a subgroup");
  }
  ++sub.checked;
  if (generated_subgroup(F, n, data.torus) != sorted(data.torus)) sub.fail("T is not a subgroup");

  auto& r0 = rep.add("RGD0");
  for (std::size_t k = 0; k < data.roots.size(); ++k) {
    ++r0.checked;
    const auto& U = data.root_groups[k];
    if (U.empty() || (U.size() == 1 && U[0] == one)) r0.fail("U_" + root_name(data.roots[k]) + " is trivial");
  }

  // Roots as integer vectors for the interval computation.
  std::unordered_map<Mat, std::size_t> root_at;
  for (std::size_t k = 0; k < data.roots.size(); ++k) root_at.emplace(root_vector_key(n, data.roots[k]), k);
  auto combo = [&](const Root& a, const Root& b, int p, int q) -> long {
    Mat key = 0;
    for (int x = 0; x < n; ++x) {
      const int v = p * ((x == a.i) - (x == a.j)) + q * ((x == b.i) - (x == b.j)) + 4;
      if (v < 0 || v > 15) return -1;
      key |= static_cast<Mat>(v) << (4 * x);
    }
    auto it = root_at.find(key);
    return it == root_at.end() ? -1 : static_cast<long>(it->second);
  };

  auto& r1 = rep.add("RGD1");
  for (std::size_t a = 0; a < data.roots.size(); ++a)
    for (std::size_t b = 0; b < data.roots.size(); ++b) {
      const Root &A = data.roots[a], &B = data.roots[b];
      if (a == b || (A.i == B.j && A.j == B.i)) continue;
      std::vector<Mat> gens;
      std::string interval;
      for (int p = 1; p <= 3; ++p)
        for (int q = 1; q <= 3; ++q) {
          const long c = combo(A, B, p, q);
          if (c < 0) continue;
          interval += root_name(data.roots[static_cast<std::size_t>(c)]) + " ";
          gens.insert(gens.end(), data.root_groups[static_cast<std::size_t>(c)].begin(),
                      data.root_groups[static_cast<std::size_t>(c)].end());
        }
      const auto H = generated_subgroup(F, n, gens);
      for (Mat u : data.root_groups[a])
        for (Mat v : data.root_groups[b]) {
          ++r1.checked;
          const Mat c = G.mul(G.mul(G.inv(u), G.inv(v)), G.mul(u, v));
          if (!is_member(H, c))
            r1.fail("[" + mat_string(F, n, u) + "," + mat_string(F, n, v) + "] not in <U_g : g in ]" + root_name(A) +
                    "," + root_name(B) + "[ = {" + interval + "}>");
        }
    }

  auto& r2 = rep.add("RGD2");
  for (int s = 0; s + 1 < n; ++s) {
    const auto& Ua = data.root_groups[static_cast<std::size_t>(data.root_index(s, s + 1))];
    const auto& Um = data.root_groups[static_cast<std::size_t>(data.root_index(s + 1, s))];
    auto act = [&](int x) { return x == s ? s + 1 : x == s + 1 ? s : x; };
    for (Mat u : Ua) {
      if (u == one) continue;
      ++r2.checked;
      bool found = false;
      for (Mat u1 : Um) {
        for (Mat u2 : Um) {
          const Mat mu = G.mul(G.mul(u1, u), u2);
          bool ok = true;
          for (std::size_t k = 0; k < data.roots.size() && ok; ++k) {
            const Root& b = data.roots[k];
            const auto& target = data.root_groups[static_cast<std::size_t>(data.root_index(act(b.i), act(b.j)))];
            ok = conjugate_set(G, mu, data.root_groups[k]) == target;
          }
          if (ok) {
            found = true;
            break;
          }
        }
        if (found) break;
      }
      if (!found) r2.fail("no mu(u) for u = " + mat_string(F, n, u));
    }
  }

  std::vector<Mat> pos_gens, all_gens;
  for (std::size_t k = 0; k < data.roots.size(); ++k) {
    all_gens.insert(all_gens.end(), data.root_groups[k].begin(), data.root_groups[k].end());
    if (data.roots[k].positive()) pos_gens.insert(pos_gens.end(), data.root_groups[k].begin(), data.root_groups[k].end());
  }
  const auto Uplus = generated_subgroup(F, n, pos_gens);
  auto& r3 = rep.add("RGD3");
  for (int s = 0; s + 1 < n; ++s) {
    ++r3.checked;
    const auto& Um = data.root_groups[static_cast<std::size_t>(data.root_index(s + 1, s))];
    bool outside = false;
    for (Mat u : Um) outside = outside || !is_member(Uplus, u);
    if (!outside) r3.fail("U_-a" + std::to_string(s + 1) + " is contained in U+");
  }

  auto& r4 = rep.add("RGD4");
  {
    const auto core = generated_subgroup(F, n, all_gens);
    std::vector<Mat> prod;
    prod.reserve(core.size() * data.torus.size());
    for (Mat t : data.torus)
      for (Mat x : core) prod.push_back(G.mul(t, x));
    prod = sorted(prod);
    r4.checked = prod.size();
    if (prod != G.elements())
      r4.fail("|T<U_a>| = " + std::to_string(prod.size()) + " but |G| = " + std::to_string(G.size()));
  }

  auto& r5 = rep.add("RGD5");
  for (Mat t : data.torus)
    for (std::size_t k = 0; k < data.roots.size(); ++k) {
      ++r5.checked;
      if (conjugate_set(G, t, data.root_groups[k]) != data.root_groups[k])
        r5.fail(mat_string(F, n, t) + " does not normalize U_" + root_name(data.roots[k]));
    }
  return rep;
}

// --- BN-pairs ------------------------------------------------------------------------------

TwinBNData standard_twin_bn(GroupPtr group) {
  const int n = group->n();
  TwinBNData d;
  d.group = group;
  for (Mat g : group->elements()) {
    bool upper = true, lower = true, mono = true;
    for (int i = 0; i < n; ++i) {
      int nz = 0;
      for (int j = 0; j < n; ++j) {
        const bool z = mget(g, i, j) == 0;
        nz += !z;
        if (!z && j < i) upper = false;
        if (!z && j > i) lower = false;
      }
      mono = mono && nz == 1;
    }
    if (upper) d.plus.push_back(g);
    if (lower) d.minus.push_back(g);
    if (mono) d.N.push_back(g);
  }
  for (int s = 0; s + 1 < n; ++s) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) p[static_cast<std::size_t>(k)] = k;
    std::swap(p[static_cast<std::size_t>(s)], p[static_cast<std::size_t>(s + 1)]);
    d.simple.push_back(flagmodel::mat_permutation(n, p));
  }
  d.weyl = coxeter::build_system(coxeter::standard_matrix("A" + std::to_string(n - 1)));
  return d;
}

TwinBNData standard_twin_bn(std::shared_ptr<const Field> field, int n, std::size_t limit) {
  auto elems = flagmodel::group_elements(*field, n, flagmodel::GroupKind::GL, nullptr, limit);
  return standard_twin_bn(std::make_shared<MatrixGroup>(field, n, std::move(elems)));
}

Mat weyl_rep(const BNData& bn, coxeter::ElemId w) {
  const auto& G = *bn.group;
  Mat m = flagmodel::mat_identity(G.n());
  for (auto s : bn.weyl->word(w)) m = G.mul(m, bn.simple[s]);
  return m;
}

bool CosetPartition::covers() const {
  return std::all_of(label.begin(), label.end(), [](long l) { return l >= 0; });
}

CosetPartition double_cosets(const MatrixGroup& G, const std::vector<Mat>& L, const std::vector<Mat>& R,
                             const std::vector<Mat>& reps) {
  const Field& F = G.field();
  const int n = G.n();
  const auto lg = generating_set(F, n, L), rg = generating_set(F, n, R);
  CosetPartition out;
  out.label.assign(G.size(), -1);
  std::vector<long> stamp(G.size(), -1);
  for (std::size_t k = 0; k < reps.size(); ++k) {
    const long start = G.index(reps[k]);
    if (start < 0) throw Error(ErrorCode::ValidationFailed, "representative outside the group");
    std::deque<std::uint32_t> queue{static_cast<std::uint32_t>(start)};
    stamp[static_cast<std::size_t>(start)] = static_cast<long>(k);
    std::size_t size = 0;
    while (!queue.empty()) {
      const auto x = queue.front();
      queue.pop_front();
      ++size;
      auto& lab = out.label[x];
      if (lab < 0) {
        lab = static_cast<long>(k);
      } else if (out.disjoint) {
        out.disjoint = false;
        out.overlap = mat_string(F, n, G.elements()[x]) + " lies in cells " + std::to_string(lab) + " and " +
                      std::to_string(k);
      }
      const Mat g = G.elements()[x];
      auto visit = [&](Mat y) {
        const long iy = G.index(y);
        if (iy < 0) throw Error(ErrorCode::ValidationFailed, "closure leaves the group");
        if (stamp[static_cast<std::size_t>(iy)] == static_cast<long>(k)) return;
        stamp[static_cast<std::size_t>(iy)] = static_cast<long>(k);
        queue.push_back(static_cast<std::uint32_t>(iy));
      };
      for (Mat a : lg) visit(G.mul(a, g));
      for (Mat b : rg) visit(G.mul(g, b));
    }
    out.sizes.push_back(size);
  }
  return out;
}

CheckReport check_bn(const BNData& bn) {
  const MatrixGroup& G = *bn.group;
  const Field& F = G.field();
  const int n = G.n();
  const auto& W = *bn.weyl;
  const auto B = sorted(bn.B), N = sorted(bn.N);
  const auto T = intersect(B, N);
  CheckReport rep;

  auto& sub = rep.add("BN.subgroups");
  sub.checked = 2;
  if (generated_subgroup(F, n, generating_set(F, n, B)) != B) sub.fail("B is not a subgroup");
  if (generated_subgroup(F, n, generating_set(F, n, N)) != N) sub.fail("N is not a subgroup");

  auto& gen = rep.add("BN.generation");
  {
    auto gens = generating_set(F, n, B);
    const auto ng = generating_set(F, n, N);
    gens.insert(gens.end(), ng.begin(), ng.end());
    const auto H = generated_subgroup(F, n, gens);
    gen.checked = H.size();
    if (H.size() != G.size()) gen.fail("|<B,N>| = " + std::to_string(H.size()) + " < |G| = " + std::to_string(G.size()));
  }

  auto& nor = rep.add("BN.normal");
  for (Mat x : generating_set(F, n, N)) {
    ++nor.checked;
    for (Mat t : T)
      if (!is_member(T, G.mul(G.mul(x, t), G.inv(x)))) {
        nor.fail(mat_string(F, n, x) + " does not normalize T");
        break;
      }
  }

  std::vector<Mat> reps;
  for (coxeter::ElemId w = 0; w < W.order(); ++w) reps.push_back(weyl_rep(bn, w));

  auto& wey = rep.add("BN.weyl");
  {
    for (Mat s : bn.simple)
      if (!is_member(N, s)) wey.fail(mat_string(F, n, s) + " is not in N");
    std::vector<Mat> cosets;
    for (Mat r : reps) {
      std::vector<Mat> c;
      for (Mat t : T) c.push_back(G.mul(r, t));
      c = sorted(c);
      cosets.insert(cosets.end(), c.begin(), c.end());
    }
    wey.checked = cosets.size();
    if (sorted(cosets) != N || cosets.size() != N.size())
      wey.fail("N/T has " + std::to_string(T.empty() ? 0 : N.size() / T.size()) + " cosets, W has " +
               std::to_string(W.order()));
  }

  const auto part = double_cosets(G, B, B, reps);

  auto& bn1 = rep.add("BN1");
  for (coxeter::ElemId w = 0; w < W.order(); ++w)
    for (int s = 0; s < W.rank(); ++s) {
      const auto ws = W.right_mul(w, s);
      for (Mat b : B) {
        ++bn1.checked;
        const long l = part.label[static_cast<std::size_t>(G.index(G.mul(G.mul(reps[w], b), bn.simple[static_cast<std::size_t>(s)])))];
        if (l != static_cast<long>(w) && l != static_cast<long>(ws)) {
          bn1.fail("w = " + W.format(w) + ", s = s" + std::to_string(s + 1) + ", b = " + mat_string(F, n, b));
          break;
        }
      }
    }

  auto& bn2 = rep.add("BN2");
  for (std::size_t s = 0; s < bn.simple.size(); ++s) {
    ++bn2.checked;
    const Mat x = bn.simple[s], xi = G.inv(x);
    bool escapes = false;
    for (Mat b : B) escapes = escapes || !is_member(B, G.mul(G.mul(x, b), xi));
    if (!escapes) bn2.fail("s" + std::to_string(s + 1) + " normalizes B");
  }

  auto& bp = rep.add("bruhat.partition");
  bp.checked = G.size();
  if (!part.disjoint) bp.fail(part.overlap);
  if (!part.covers()) bp.fail("some elements lie in no BwB");

  auto& bs = rep.add("bruhat.sizes");
  for (coxeter::ElemId w = 0; w < W.order(); ++w) {
    ++bs.checked;
    std::size_t expect = B.size();
    for (int i = 0; i < W.length(w); ++i) expect *= static_cast<std::size_t>(F.q());
    if (part.sizes[w] != expect)
      bs.fail("|B" + W.format(w) + "B| = " + std::to_string(part.sizes[w]) + ", expected " + std::to_string(expect));
  }
  return rep;
}

CheckReport check_twin_bn(const TwinBNData& tbn) {
  const MatrixGroup& G = *tbn.group;
  const Field& F = G.field();
  const int n = G.n();
  const auto& W = *tbn.weyl;
  CheckReport rep;
  rep.merge(check_bn(tbn.bn(+1)), "plus.");
  rep.merge(check_bn(tbn.bn(-1)), "minus.");

  const auto Bp = sorted(tbn.plus), Bm = sorted(tbn.minus);
  const auto T = intersect(Bp, tbn.N);
  auto& ct = rep.add("TBN.torus");
  ct.checked = 1;
  if (T != intersect(Bm, tbn.N)) ct.fail("B+ n N != B- n N");

  std::vector<Mat> reps;
  for (coxeter::ElemId w = 0; w < W.order(); ++w) reps.push_back(weyl_rep(tbn.bn(+1), w));

  auto& t1 = rep.add("TBN1");
  auto& bk = rep.add("birkhoff.partition");
  for (int eps : {+1, -1}) {
    const auto& L = eps > 0 ? Bp : Bm;
    const auto& R = eps > 0 ? Bm : Bp;
    const auto part = double_cosets(G, L, R, reps);
    const std::string tag = eps > 0 ? "+" : "-";
    bk.checked += G.size();
    if (!part.disjoint) bk.fail("B" + tag + " cells overlap: " + part.overlap);
    if (!part.covers()) bk.fail("B" + tag + " cells do not cover G");
    // Both sides are unions of cells, so it suffices that every x s with x in
    // the w-cell lands in the ws-cell.
    for (coxeter::ElemId w = 0; w < W.order(); ++w)
      for (int s = 0; s < W.rank(); ++s) {
        const auto ws = W.right_mul(w, s);
        if (W.length(ws) > W.length(w)) continue;
        for (std::size_t x = 0; x < G.size(); ++x) {
          if (part.label[x] != static_cast<long>(w)) continue;
          ++t1.checked;
          const long l = part.label[static_cast<std::size_t>(G.index(G.mul(G.elements()[x], tbn.simple[static_cast<std::size_t>(s)])))];
          if (l != static_cast<long>(ws)) {
            t1.fail("eps = " + tag + ", w = " + W.format(w) + ", s = s" + std::to_string(s + 1) + ", x = " +
                    mat_string(F, n, G.elements()[x]));
            break;
          }
        }
      }
  }

  auto& t2 = rep.add("TBN2");
  for (std::size_t s = 0; s < tbn.simple.size(); ++s)
    for (Mat b : Bp) {
      ++t2.checked;
      if (is_member(Bm, G.mul(b, tbn.simple[s]))) {
        t2.fail("B+ s" + std::to_string(s + 1) + " meets B- in " + mat_string(F, n, G.mul(b, tbn.simple[s])));
        break;
      }
    }

  auto& sat = rep.add("saturation");
  sat.checked = 1;
  if (intersect(Bp, Bm) != T)
    sat.fail("|B+ n B-| = " + std::to_string(intersect(Bp, Bm).size()) + ", |T| = " + std::to_string(T.size()));
  return rep;
}

coxeter::ElemId bruhat_cell(const flagmodel::FlagSpace& fs, Mat g) {
  const auto E = fs.standard_flag();
  return fs.relative_position(E, fs.act(g, E));
}

coxeter::ElemId birkhoff_cell(const flagmodel::FlagSpace& fs, Mat g) {
  const auto& W = fs.weyl();
  const Mat n0 = flagmodel::mat_permutation(fs.n(), fs.element_perm(W.longest()));
  const auto E = fs.standard_flag();
  const auto v = fs.relative_position(E, fs.act(mat_mul(fs.field(), fs.n(), g, n0), E));
  return W.mul(v, W.longest());
}

}  // namespace twinflip::rgd
