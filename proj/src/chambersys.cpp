#include "twinflip/chambersys.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "twinflip/error.hpp"
#include "twinflip/union_find.hpp"

namespace twinflip::chambersys {

namespace {

std::vector<std::uint32_t> renumber(const std::vector<std::uint32_t>& v) {
  std::unordered_map<std::uint32_t, std::uint32_t> m;
  std::vector<std::uint32_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto [it, fresh] = m.emplace(v[i], static_cast<std::uint32_t>(m.size()));
    out[i] = it->second;
  }
  return out;
}

std::string mask_string(const ChamberSystem& C, TypeSet J) {
  std::string s = "{";
  bool first = true;
  for (int i = 0; i < C.rank(); ++i) {
    if (!(J >> i & 1u)) continue;
    if (!first) s += ',';
    s += C.labels()[static_cast<std::size_t>(i)];
    first = false;
  }
  return s + "}";
}

}  // namespace

bool Residue::contains(ChamberId c) const { return std::binary_search(members.begin(), members.end(), c); }

ChamberSystem::ChamberSystem(std::vector<std::string> labels, std::vector<std::vector<std::uint32_t>> classes)
    : labels_(std::move(labels)) {
  if (labels_.size() != classes.size()) throw Error(ErrorCode::BadType, "label count differs from partition count");
  if (labels_.size() > 32) throw Error(ErrorCode::BadType, "at most 32 types");
  size_ = classes.empty() ? 0 : classes[0].size();
  for (auto& p : classes) {
    if (p.size() != size_) throw Error(ErrorCode::BadChamber, "partitions of unequal size");
    classes_.push_back(renumber(p));
  }
  if (classes_.empty()) throw Error(ErrorCode::BadType, "empty type set");
  if (size_ == 0) throw Error(ErrorCode::BadChamber, "chamber system needs at least one chamber");
  members_.resize(classes_.size());
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const auto k = *std::max_element(classes_[i].begin(), classes_[i].end()) + 1u;
    members_[i].resize(k);
    for (ChamberId c = 0; c < size_; ++c) members_[i][classes_[i][c]].push_back(c);
  }
}

const std::vector<ChamberId>& ChamberSystem::class_members(int i, std::uint32_t cls) const {
  return members_[static_cast<std::size_t>(i)][cls];
}

void ChamberSystem::check_types(TypeSet J) const {
  if ((J & ~all_types()) != 0) throw Error(ErrorCode::BadType, "type set outside I");
}

Residue ChamberSystem::residue(ChamberId c, TypeSet J) const {
  if (c >= size_) throw Error(ErrorCode::BadChamber, "chamber " + std::to_string(c) + " out of range");
  check_types(J);
  std::vector<char> seen(size_, 0);
  std::vector<ChamberId> stack{c};
  seen[c] = 1;
  Residue r{this, J, {}};
  while (!stack.empty()) {
    const ChamberId x = stack.back();
    stack.pop_back();
    r.members.push_back(x);
    for (int i = 0; i < rank(); ++i) {
      if (!(J >> i & 1u)) continue;
      for (ChamberId y : class_members(i, class_of(i, x)))
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
    }
  }
  std::sort(r.members.begin(), r.members.end());
  return r;
}

std::vector<std::uint32_t> ChamberSystem::residue_ids(TypeSet J) const {
  check_types(J);
  UnionFind uf(size_);
  for (int i = 0; i < rank(); ++i) {
    if (!(J >> i & 1u)) continue;
    for (const auto& cls : members_[static_cast<std::size_t>(i)])
      for (std::size_t k = 1; k < cls.size(); ++k) uf.unite(cls[0], cls[k]);
  }
  return uf.labels();
}

std::size_t ChamberSystem::residue_count(TypeSet J) const {
  const auto ids = residue_ids(J);
  return ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1u;
}

std::vector<ChamberId> ChamberSystem::gallery(ChamberId c, ChamberId d, TypeSet J,
                                              const std::vector<char>& allowed) const {
  if (c >= size_ || d >= size_) throw Error(ErrorCode::BadChamber, "chamber out of range");
  check_types(J);
  auto ok = [&](ChamberId x) { return allowed.empty() || allowed[x]; };
  if (!ok(c) || !ok(d)) return {};
  std::vector<ChamberId> prev(size_, UINT32_MAX);
  std::deque<ChamberId> q{c};
  prev[c] = c;
  while (!q.empty()) {
    const ChamberId x = q.front();
    q.pop_front();
    if (x == d) break;
    std::vector<ChamberId> nb;
    for (int i = 0; i < rank(); ++i) {
      if (!(J >> i & 1u)) continue;
      for (ChamberId y : class_members(i, class_of(i, x)))
        if (prev[y] == UINT32_MAX && ok(y)) nb.push_back(y);
    }
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    for (ChamberId y : nb) {
      prev[y] = x;
      q.push_back(y);
    }
  }
  if (prev[d] == UINT32_MAX) return {};
  std::vector<ChamberId> path{d};
  while (path.back() != c) path.push_back(prev[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

ChamberSystem ChamberSystem::induced(const std::vector<ChamberId>& subset) const {
  std::vector<std::vector<std::uint32_t>> cls(static_cast<std::size_t>(rank()));
  for (int i = 0; i < rank(); ++i)
    for (ChamberId c : subset) {
      if (c >= size_) throw Error(ErrorCode::BadChamber, "chamber out of range");
      cls[static_cast<std::size_t>(i)].push_back(class_of(i, c));
    }
  return ChamberSystem(labels_, std::move(cls));
}

void ChamberSystem::write(std::ostream& out) const {
  out << size_ << ' ' << rank();
  for (const auto& l : labels_) out << ' ' << l;
  out << '\n';
  for (const auto& p : classes_) {
    for (std::size_t c = 0; c < p.size(); ++c) out << (c ? " " : "") << p[c];
    out << '\n';
  }
}

ChamberSystem ChamberSystem::read(std::istream& in) {
  std::size_t n = 0;
  int k = 0;
  if (!(in >> n >> k) || k < 1) throw Error(ErrorCode::Io, "bad chamber system header");
  std::vector<std::string> labels(static_cast<std::size_t>(k));
  for (auto& l : labels)
    if (!(in >> l)) throw Error(ErrorCode::Io, "missing type label");
  std::vector<std::vector<std::uint32_t>> cls(static_cast<std::size_t>(k), std::vector<std::uint32_t>(n));
  for (auto& p : cls)
    for (auto& v : p)
      if (!(in >> v)) throw Error(ErrorCode::Io, "truncated class table");
  return ChamberSystem(std::move(labels), std::move(cls));
}

ResidueSystem residue_chamber_system(const ChamberSystem& C, TypeSet K) {
  ResidueSystem out;
  out.residue_of = C.residue_ids(K);
  const std::size_t m = *std::max_element(out.residue_of.begin(), out.residue_of.end()) + 1u;
  std::vector<ChamberId> rep(m, UINT32_MAX);
  for (ChamberId c = 0; c < C.size(); ++c)
    if (rep[out.residue_of[c]] == UINT32_MAX) rep[out.residue_of[c]] = c;
  std::vector<std::string> labels;
  std::vector<std::vector<std::uint32_t>> cls;
  for (int i = 0; i < C.rank(); ++i) {
    if (K >> i & 1u) continue;
    const auto big = C.residue_ids(K | (TypeSet{1} << i));
    std::vector<std::uint32_t> p(m);
    for (std::size_t r = 0; r < m; ++r) p[r] = big[rep[r]];
    labels.push_back(C.labels()[static_cast<std::size_t>(i)]);
    cls.push_back(std::move(p));
    out.type_map.push_back(i);
  }
  if (labels.empty()) {
    // K = I: keep one dummy type so the result is still a chamber system.
    labels.push_back("*");
    cls.emplace_back(m);
    for (std::size_t r = 0; r < m; ++r) cls.back()[r] = static_cast<std::uint32_t>(r);
    out.type_map.push_back(-1);
  }
  out.system = ChamberSystem(std::move(labels), std::move(cls));
  return out;
}

ResidualReport residual_connectedness(const ChamberSystem& C) {
  ResidualReport rep;
  const int n = C.rank();
  const TypeSet all = C.all_types();
  if (!C.is_connected()) {
    rep.ok = false;
    rep.witness = "J={}: system is not connected";
    return rep;
  }
  // Corank-one residue ids per type j.
  std::vector<std::vector<std::uint32_t>> co(static_cast<std::size_t>(n));
  std::vector<std::uint32_t> co_count(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    co[static_cast<std::size_t>(j)] = C.residue_ids(all & ~(TypeSet{1} << j));
    co_count[static_cast<std::size_t>(j)] =
        *std::max_element(co[static_cast<std::size_t>(j)].begin(), co[static_cast<std::size_t>(j)].end()) + 1u;
  }
  // meets[j][k][a] = sorted residue ids of type k meeting residue a of type j.
  std::vector<std::vector<std::vector<std::vector<std::uint32_t>>>> meets(
      static_cast<std::size_t>(n), std::vector<std::vector<std::vector<std::uint32_t>>>(static_cast<std::size_t>(n)));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      auto& m = meets[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      m.resize(co_count[static_cast<std::size_t>(j)]);
      for (ChamberId c = 0; c < C.size(); ++c) m[co[static_cast<std::size_t>(j)][c]].push_back(co[static_cast<std::size_t>(k)][c]);
      for (auto& v : m) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
      }
    }

  for (TypeSet J = 1; J <= all; ++J) {
    std::vector<int> js;
    for (int j = 0; j < n; ++j)
      if (J >> j & 1u) js.push_back(j);
    if (js.size() == 1) {
      ++rep.families_checked;
      continue;  // a single corank-one residue is its own intersection
    }
    const auto rest = C.residue_ids(all & ~J);
    // tuple of corank-one ids -> set of (I \ J)-residue ids inside the intersection
    std::map<std::vector<std::uint32_t>, std::vector<std::uint32_t>> inter;
    for (ChamberId c = 0; c < C.size(); ++c) {
      std::vector<std::uint32_t> key;
      for (int j : js) key.push_back(co[static_cast<std::size_t>(j)][c]);
      auto& v = inter[key];
      if (std::find(v.begin(), v.end(), rest[c]) == v.end()) v.push_back(rest[c]);
    }
    std::vector<std::uint32_t> choice(js.size());
    bool failed = false;
    auto rec = [&](auto&& self, std::size_t pos) -> void {
      if (failed) return;
      if (pos == js.size()) {
        ++rep.families_checked;
        auto it = inter.find(choice);
        if (it == inter.end() || it->second.size() != 1) {
          failed = true;
          std::ostringstream w;
          w << "J=" << mask_string(C, J) << " family";
          for (std::size_t t = 0; t < js.size(); ++t) w << ' ' << C.labels()[static_cast<std::size_t>(js[t])] << ':' << choice[t];
          w << (it == inter.end() ? " has empty intersection" : " meets several residues");
          rep.witness = w.str();
        }
        return;
      }
      const int j = js[pos];
      for (std::uint32_t a = 0; a < co_count[static_cast<std::size_t>(j)]; ++a) {
        bool ok = true;
        for (std::size_t t = 0; t < pos && ok; ++t) {
          const auto& v = meets[static_cast<std::size_t>(js[t])][static_cast<std::size_t>(j)][choice[t]];
          ok = std::binary_search(v.begin(), v.end(), a);
        }
        if (!ok) continue;
        choice[pos] = a;
        self(self, pos + 1);
        if (failed) return;
      }
    };
    rec(rec, 0);
    if (failed) {
      rep.ok = false;
      return rep;
    }
  }
  return rep;
}

bool is_residually_connected(const ChamberSystem& C) { return residual_connectedness(C).ok; }

bool inherits_connectedness(const std::vector<ChamberId>& sub, const ChamberSystem& C,
                            const std::vector<ChamberId>& X, std::string* witness) {
  std::vector<char> in_sub(C.size(), 0);
  for (ChamberId c : sub) {
    if (c >= C.size()) throw Error(ErrorCode::BadChamber, "chamber out of range");
    in_sub[c] = 1;
  }
  for (ChamberId x : X)
    if (x >= C.size() || !in_sub[x]) throw Error(ErrorCode::BadChamber, "X is not contained in the subsystem");
  const ChamberSystem S = C.induced(sub);
  std::vector<std::uint32_t> local(C.size(), UINT32_MAX);
  for (std::size_t k = 0; k < sub.size(); ++k) local[sub[k]] = static_cast<std::uint32_t>(k);
  for (TypeSet J = 0; J <= C.all_types(); ++J) {
    const auto big = C.residue_ids(J);
    const auto small = S.residue_ids(J);
    std::unordered_map<std::uint32_t, std::pair<std::uint32_t, ChamberId>> seen;
    for (ChamberId x : X) {
      auto [it, fresh] = seen.emplace(big[x], std::make_pair(small[local[x]], x));
      if (!fresh && it->second.first != small[local[x]]) {
        if (witness) {
          std::ostringstream w;
          w << "chambers " << it->second.second << " and " << x << " share a " << mask_string(C, J)
            << "-residue but are not joined inside the subsystem";
          *witness = w.str();
        }
        return false;
      }
    }
  }
  return true;
}

}  // namespace twinflip::chambersys
