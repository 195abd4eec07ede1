#include "twinflip/twinbuild.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "twinflip/error.hpp"
#include "twinflip/union_find.hpp"

namespace twinflip::twinbuild {

namespace {

// Generator index of each element, or -1.
std::vector<int> generator_index(const coxeter::CoxeterSystem& W) {
  std::vector<int> g(W.order(), -1);
  for (int s = 0; s < W.rank(); ++s) g[W.gen_id(s)] = s;
  return g;
}

// nbr[y * r + s] = chambers z with delta(y, z) = s, read off the raw distances.
template <class Delta>
std::vector<std::vector<ChamberId>> raw_neighbours(std::size_t n, const coxeter::CoxeterSystem& W, Delta delta) {
  const auto gi = generator_index(W);
  const auto r = static_cast<std::size_t>(W.rank());
  std::vector<std::vector<ChamberId>> nbr(n * r);
  for (ChamberId y = 0; y < n; ++y)
    for (ChamberId z = 0; z < n; ++z) {
      const int s = gi[delta(y, z)];
      if (s >= 0) nbr[y * r + static_cast<std::size_t>(s)].push_back(z);
    }
  return nbr;
}

std::string pair_str(const coxeter::CoxeterSystem& W, ChamberId x, ChamberId y, ElemId w) {
  std::ostringstream o;
  o << "delta(" << x << "," << y << ")=" << W.format(w);
  return o.str();
}

// Bu1-Bu3 for an abstract distance function on chambers 0..n-1.
template <class Delta>
void check_bu(CheckReport& rep, std::size_t n, const coxeter::CoxeterSystem& W, Delta delta,
              const std::string& prefix) {
  const auto r = static_cast<std::size_t>(W.rank());
  const auto nbr = raw_neighbours(n, W, delta);
  auto& bu1 = rep.add(prefix + "Bu1");
  auto& bu2 = rep.add(prefix + "Bu2");
  auto& bu3 = rep.add(prefix + "Bu3");
  for (ChamberId x = 0; x < n; ++x) {
    for (ChamberId y = 0; y < n; ++y) {
      const ElemId w = delta(x, y);
      ++bu1.checked;
      if ((w == 0) != (x == y)) bu1.fail(pair_str(W, x, y, w));
      for (std::size_t s = 0; s < r; ++s) {
        const ElemId ws = W.right_mul(w, static_cast<int>(s));
        const bool up = W.length(ws) > W.length(w);
        bool found = false;
        for (ChamberId z : nbr[y * r + s]) {
          const ElemId v = delta(x, z);
          ++bu2.checked;
          if (v == ws) found = true;
          if (v != ws && (up || v != w)) {
            std::ostringstream o;
            o << pair_str(W, x, y, w) << ", delta(" << y << "," << z << ")=" << W.format(W.gen_id(static_cast<int>(s)))
              << " but delta(" << x << "," << z << ")=" << W.format(v);
            bu2.fail(o.str());
          }
        }
        ++bu3.checked;
        if (!found) {
          std::ostringstream o;
          o << pair_str(W, x, y, w) << ": no z with delta(y,z)=" << W.format(W.gen_id(static_cast<int>(s)))
            << " and delta(x,z)=" << W.format(ws);
          bu3.fail(o.str());
        }
      }
    }
  }
}

}  // namespace

// --- Building -----------------------------------------------------------------

Building::Building(SystemPtr weyl, std::size_t n, Oracle delta, std::size_t table_limit)
    : weyl_(std::move(weyl)), n_(n), oracle_(std::move(delta)) {
  if (n_ == 0) throw Error(ErrorCode::BadChamber, "building needs at least one chamber");
  if (n_ <= table_limit) {
    table_.resize(n_ * n_);
    for (ChamberId x = 0; x < n_; ++x)
      for (ChamberId y = 0; y < n_; ++y) table_[static_cast<std::size_t>(x) * n_ + y] = static_cast<std::uint16_t>(oracle_(x, y));
    if (weyl_->order() > 65535) throw Error(ErrorCode::TooLarge, "distance table needs |W| < 65536");
  }
  build_panels();
}

void Building::corrupt(ChamberId x, ChamberId y, ElemId w) {
  if (table_.empty()) throw Error(ErrorCode::Usage, "corrupt() needs a tabulated building");
  table_[static_cast<std::size_t>(x) * n_ + y] = static_cast<std::uint16_t>(w);
}

void Building::build_panels() {
  const auto gi = generator_index(*weyl_);
  const int r = weyl_->rank();
  std::vector<UnionFind> uf(static_cast<std::size_t>(r), UnionFind(n_));
  for (ChamberId x = 0; x < n_; ++x)
    for (ChamberId y = x + 1; y < n_; ++y) {
      const int s = gi[delta(x, y)];
      if (s >= 0) uf[static_cast<std::size_t>(s)].unite(x, y);
    }
  std::vector<std::vector<std::uint32_t>> cls;
  std::vector<std::string> labels;
  for (int s = 0; s < r; ++s) {
    cls.push_back(uf[static_cast<std::size_t>(s)].labels());
    labels.push_back(weyl_->labels()[static_cast<std::size_t>(s)]);
  }
  system_ = chambersys::ChamberSystem(std::move(labels), std::move(cls));
}

const std::vector<ChamberId>& Building::panel(ChamberId c, int s) const {
  return system_.class_members(s, system_.class_of(s, c));
}

Building thin_building(const SystemPtr& weyl) {
  const coxeter::CoxeterSystem* W = weyl.get();
  return Building(weyl, W->order(), [W](ChamberId x, ChamberId y) { return W->mul(W->inverse(x), y); });
}

CheckReport check_building_axioms(const Building& b) {
  CheckReport rep;
  check_bu(rep, b.size(), b.weyl(), [&](ChamberId x, ChamberId y) { return b.delta(x, y); }, "");
  return rep;
}

// --- TwinBuilding -------------------------------------------------------------

TwinBuilding::TwinBuilding(std::shared_ptr<const Building> base)
    : base_(std::move(base)), n_(base_->size()), rank_(static_cast<std::size_t>(base_->weyl().rank())) {
  const auto& W = base_->weyl();
  w0_ = W.longest();
  if (n_ <= kTableLimit) {
    for (int k = 1; k < 4; ++k) tables_[k].resize(n_ * n_);
    for (ChamberId x = 0; x < n_; ++x)
      for (ChamberId y = 0; y < n_; ++y) {
        const ElemId d = base_->delta(x, y);
        const std::size_t i = static_cast<std::size_t>(x) * n_ + y;
        tables_[1][i] = static_cast<std::uint16_t>(W.mul(W.mul(w0_, d), w0_));
        tables_[2][i] = static_cast<std::uint16_t>(W.mul(d, w0_));
        tables_[3][i] = static_cast<std::uint16_t>(W.mul(w0_, d));
      }
  }
  // s-panels of the negative half are (w0 s w0)-panels of the base.
  std::vector<int> conj(rank_);
  for (int s = 0; s < static_cast<int>(rank_); ++s) {
    const ElemId t = W.mul(W.mul(w0_, W.gen_id(s)), w0_);
    for (int u = 0; u < static_cast<int>(rank_); ++u)
      if (W.gen_id(u) == t) conj[static_cast<std::size_t>(s)] = u;
  }
  panels_.resize(2 * n_ * rank_);
  const auto& bs = base_->chamber_system();
  std::vector<std::vector<std::uint32_t>> cls(rank_, std::vector<std::uint32_t>(2 * n_));
  std::vector<std::string> labels;
  for (std::size_t s = 0; s < rank_; ++s) {
    labels.push_back(W.labels()[s]);
    for (ChamberId c = 0; c < n_; ++c) {
      cls[s][c] = bs.class_of(static_cast<int>(s), c);
      panels_[c * rank_ + s] = base_->panel(c, static_cast<int>(s));
      const int t = conj[s];
      cls[s][c + n_] = 2 * static_cast<std::uint32_t>(n_) + bs.class_of(t, c);
      auto& p = panels_[(c + n_) * rank_ + s];
      for (ChamberId y : base_->panel(c, t)) p.push_back(y + static_cast<ChamberId>(n_));
    }
  }
  system_ = chambersys::ChamberSystem(std::move(labels), std::move(cls));
}

ElemId TwinBuilding::table(int kind, ChamberId x, ChamberId y) const {
  if (kind == 0) return base_->delta(x, y);
  if (!tables_[kind].empty()) return tables_[kind][static_cast<std::size_t>(x) * n_ + y];
  const auto& W = base_->weyl();
  const ElemId d = base_->delta(x, y);
  switch (kind) {
    case 1: return W.mul(W.mul(w0_, d), w0_);
    case 2: return W.mul(d, w0_);
    default: return W.mul(w0_, d);
  }
}

void TwinBuilding::corrupt(int kind, ChamberId x, ChamberId y, ElemId w) {
  if (kind < 1 || kind > 3 || tables_[kind].empty()) throw Error(ErrorCode::Usage, "corrupt() needs a tabulated twin building");
  tables_[kind][static_cast<std::size_t>(x % n_) * n_ + y % n_] = static_cast<std::uint16_t>(w);
}

TwinBuilding spherical_to_twin(std::shared_ptr<const Building> b) { return TwinBuilding(std::move(b)); }
TwinBuilding spherical_to_twin(const Building& b) { return TwinBuilding(std::make_shared<Building>(b)); }

CheckReport check_half_axioms(const TwinBuilding& tb) {
  CheckReport rep;
  const auto n = static_cast<ChamberId>(tb.half_size());
  check_bu(rep, n, tb.weyl(), [&](ChamberId x, ChamberId y) { return tb.delta(x, y); }, "positive.");
  check_bu(rep, n, tb.weyl(), [&](ChamberId x, ChamberId y) { return tb.delta(x + n, y + n); }, "negative.");
  return rep;
}

CheckReport check_twin_axioms(const TwinBuilding& tb) {
  CheckReport rep;
  const auto& W = tb.weyl();
  const auto n = static_cast<ChamberId>(tb.half_size());
  const auto r = static_cast<std::size_t>(W.rank());
  auto& tw1 = rep.add("Tw1");
  auto& tw2 = rep.add("Tw2");
  auto& tw3 = rep.add("Tw3");
  for (int eps = 0; eps < 2; ++eps) {
    const ChamberId xo = eps == 0 ? 0 : n;  // offset of x's half
    const ChamberId yo = eps == 0 ? n : 0;  // offset of y's half
    const auto nbr = raw_neighbours(n, W, [&](ChamberId a, ChamberId b) { return tb.delta(a + yo, b + yo); });
    for (ChamberId x = 0; x < n; ++x)
      for (ChamberId y = 0; y < n; ++y) {
        const ElemId w = tb.codistance(x + xo, y + yo);
        ++tw1.checked;
        if (tb.codistance(y + yo, x + xo) != W.inverse(w)) {
          std::ostringstream o;
          o << "codistance(" << x + xo << "," << y + yo << ")=" << W.format(w) << " but reverse is "
            << W.format(tb.codistance(y + yo, x + xo));
          tw1.fail(o.str());
        }
        for (std::size_t s = 0; s < r; ++s) {
          const ElemId ws = W.right_mul(w, static_cast<int>(s));
          const bool down = W.length(ws) < W.length(w);
          bool found = false;
          for (ChamberId z : nbr[y * r + s]) {
            const ElemId v = tb.codistance(x + xo, z + yo);
            if (v == ws) found = true;
            if (down) {
              ++tw2.checked;
              if (v != ws) {
                std::ostringstream o;
                o << "codistance(" << x + xo << "," << y + yo << ")=" << W.format(w) << ", z=" << z + yo
                  << " s-adjacent, codistance(x,z)=" << W.format(v) << " expected " << W.format(ws);
                tw2.fail(o.str());
              }
            }
          }
          ++tw3.checked;
          if (!found) {
            std::ostringstream o;
            o << "codistance(" << x + xo << "," << y + yo << ")=" << W.format(w) << ": no z with codistance "
              << W.format(ws);
            tw3.fail(o.str());
          }
        }
      }
  }
  return rep;
}

// --- projections ----------------------------------------------------------------

ChamberId proj_residue(const TwinBuilding& tb, const std::vector<ChamberId>& R, ChamberId d) {
  if (R.empty()) throw Error(ErrorCode::BadChamber, "empty residue");
  const auto& W = tb.weyl();
  const bool same = tb.positive(R.front()) == tb.positive(d);
  ChamberId best = R.front();
  int best_len = W.length(tb.dist(best, d));
  for (ChamberId c : R) {
    const int l = W.length(tb.dist(c, d));
    if (same ? l < best_len : l > best_len) {
      best = c;
      best_len = l;
    }
  }
  return best;
}

ChamberId proj_residue(const TwinBuilding& tb, const Residue& R, ChamberId d) { return proj_residue(tb, R.members, d); }

ChamberId proj_panel(const TwinBuilding& tb, ChamberId c, int s, ChamberId d) {
  return proj_residue(tb, tb.panel(c, s), d);
}

bool gate_identity(const TwinBuilding& tb, const std::vector<ChamberId>& R, ChamberId d) {
  const auto& W = tb.weyl();
  const ChamberId p = proj_residue(tb, R, d);
  const bool same = tb.positive(p) == tb.positive(d);
  for (ChamberId c : R) {
    const ElemId a = tb.delta(c, p);
    const ElemId b = tb.dist(p, d);
    const ElemId full = tb.dist(c, d);
    if (W.mul(a, b) != full) return false;
    if (same ? W.length(full) != W.length(a) + W.length(b) : W.length(full) != W.length(b) - W.length(a)) return false;
  }
  return true;
}

bool parallel(const TwinBuilding& tb, const Residue& R, const Residue& Q) {
  auto covers = [&](const Residue& A, const Residue& B) {
    std::vector<ChamberId> img;
    for (ChamberId q : B.members) img.push_back(proj_residue(tb, A, q));
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
    return img == A.members;
  };
  return covers(R, Q) && covers(Q, R);
}

std::vector<ChamberId> convex_hull(const TwinBuilding& tb, ChamberId c, ChamberId d) {
  std::vector<char> in(tb.size(), 0);
  std::vector<ChamberId> members{c};
  in[c] = 1;
  if (!in[d]) {
    in[d] = 1;
    members.push_back(d);
  }
  const int r = tb.weyl().rank();
  for (bool grew = true; grew;) {
    grew = false;
    const std::size_t snapshot = members.size();
    for (std::size_t i = 0; i < snapshot; ++i) {
      for (int s = 0; s < r; ++s) {
        const auto& P = tb.panel(members[i], s);
        for (std::size_t j = 0; j < snapshot; ++j) {
          const ChamberId p = proj_residue(tb, P, members[j]);
          if (!in[p]) {
            in[p] = 1;
            members.push_back(p);
            grew = true;
          }
        }
      }
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

// --- apartments -----------------------------------------------------------------

bool TwinApartment::contains(ChamberId x) const {
  return std::binary_search(plus.begin(), plus.end(), x) || std::binary_search(minus.begin(), minus.end(), x);
}

TwinApartment twin_apartment_from_opposites(const TwinBuilding& tb, ChamberId c, ChamberId e) {
  if (c >= tb.size() || e >= tb.size()) throw Error(ErrorCode::BadChamber, "chamber out of range");
  if (!tb.opposite(c, e)) throw Error(ErrorCode::NotOpposite, std::to_string(c) + " and " + std::to_string(e) + " are not opposite");
  if (!tb.positive(c)) std::swap(c, e);
  const auto n = static_cast<ChamberId>(tb.half_size());
  TwinApartment a;
  for (ChamberId x = 0; x < n; ++x)
    if (tb.codistance(x, e) == tb.delta(x, c)) a.plus.push_back(x);
  for (ChamberId y = n; y < 2 * n; ++y)
    if (tb.codistance(y, c) == tb.delta(y, e)) a.minus.push_back(y);
  for (ChamberId x : a.plus)
    for (ChamberId y : a.minus)
      if (tb.codistance(x, y) == 0) {
        a.opposition.emplace_back(x, y);
        break;
      }
  return a;
}

CheckReport verify_twin_apartment(const TwinBuilding& tb, const TwinApartment& a) {
  CheckReport rep;
  const auto& W = tb.weyl();
  auto& size = rep.add("apartment.size");
  size.checked = 2;
  if (a.plus.size() != W.order() || a.minus.size() != W.order())
    size.fail("sizes " + std::to_string(a.plus.size()) + "/" + std::to_string(a.minus.size()) + " differ from |W|");
  auto& iso = rep.add("apartment.isometric");
  for (const auto* half : {&a.plus, &a.minus}) {
    if (half->empty()) continue;
    const ChamberId base = half->front();
    std::vector<char> hit(W.order(), 0);
    for (ChamberId x : *half) {
      ++iso.checked;
      const ElemId w = tb.delta(base, x);
      if (hit[w]) iso.fail("two chambers at distance " + W.format(w) + " from " + std::to_string(base));
      hit[w] = 1;
    }
    // delta(x, y) = delta(base, x)^-1 delta(base, y) inside a thin building.
    for (ChamberId x : *half)
      for (ChamberId y : *half) {
        ++iso.checked;
        if (tb.delta(x, y) != W.mul(W.inverse(tb.delta(base, x)), tb.delta(base, y)))
          iso.fail("distance between " + std::to_string(x) + " and " + std::to_string(y) + " is not thin");
      }
  }
  auto& op = rep.add("apartment.opposition");
  std::vector<ChamberId> all = a.plus;
  all.insert(all.end(), a.minus.begin(), a.minus.end());
  for (ChamberId x : all) {
    ++op.checked;
    int count = 0;
    for (ChamberId y : all) count += tb.opposite(x, y);
    if (count != 1) op.fail("chamber " + std::to_string(x) + " has " + std::to_string(count) + " opposites in the apartment");
  }
  if (a.opposition.size() != a.plus.size()) op.fail("opposition pairing incomplete");
  return rep;
}

// --- dumps ------------------------------------------------------------------------

namespace {

void put32(std::ostream& out, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8 & 0xff), static_cast<char>(v >> 16 & 0xff),
               static_cast<char>(v >> 24 & 0xff)};
  out.write(b, 4);
}

std::uint32_t get32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw Error(ErrorCode::Io, "truncated dump");
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

}  // namespace

void write_dump(std::ostream& out, const TwinBuilding& tb) {
  const auto n = static_cast<ChamberId>(tb.half_size());
  put32(out, n);
  put32(out, static_cast<std::uint32_t>(tb.weyl().order()));
  for (ChamberId x = 0; x < n; ++x)
    for (ChamberId y = 0; y < n; ++y) put32(out, tb.delta(x, y));
  for (ChamberId x = 0; x < n; ++x)
    for (ChamberId y = 0; y < n; ++y) put32(out, tb.delta(x + n, y + n));
  for (ChamberId x = 0; x < n; ++x)
    for (ChamberId y = 0; y < n; ++y) put32(out, tb.codistance(x, y + n));
  for (ChamberId x = 0; x < n; ++x)
    for (ChamberId y = 0; y < n; ++y) put32(out, tb.codistance(x + n, y));
}

Dump read_dump(std::istream& in) {
  Dump d;
  d.n = get32(in);
  d.order = get32(in);
  for (auto& t : d.tables) {
    t.resize(static_cast<std::size_t>(d.n) * d.n);
    for (auto& v : t) v = get32(in);
  }
  return d;
}

}  // namespace twinflip::twinbuild
