#include "twinflip/coxeter.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "twinflip/error.hpp"

namespace twinflip::coxeter {

namespace {

constexpr double kEps = 1e-9;
constexpr std::size_t kFullTableLimit = 1024;
constexpr std::size_t kRootLimit = 1u << 20;

struct KeyHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto x : v) h = (h ^ x) * 1099511628211ull;
    return h;
  }
};

// Bilinear form of the geometric representation.
std::vector<double> bilinear_form(const CoxeterMatrix& m) {
  const int n = m.rank();
  std::vector<double> b(static_cast<std::size_t>(n * n));
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) {
      const int e = m.at(s, t);
      double v;
      if (s == t) v = 1.0;
      else if (e == kInfinity) v = -1.0;
      else v = -std::cos(std::numbers::pi / e);
      b[static_cast<std::size_t>(s * n + t)] = v;
    }
  }
  return b;
}

bool positive_definite(std::vector<double> a, int n) {
  for (int j = 0; j < n; ++j) {
    double d = a[static_cast<std::size_t>(j * n + j)];
    for (int k = 0; k < j; ++k) d -= a[static_cast<std::size_t>(j * n + k)] * a[static_cast<std::size_t>(j * n + k)];
    if (d <= kEps) return false;
    d = std::sqrt(d);
    a[static_cast<std::size_t>(j * n + j)] = d;
    for (int i = j + 1; i < n; ++i) {
      double v = a[static_cast<std::size_t>(i * n + j)];
      for (int k = 0; k < j; ++k) v -= a[static_cast<std::size_t>(i * n + k)] * a[static_cast<std::size_t>(j * n + k)];
      a[static_cast<std::size_t>(i * n + j)] = v / d;
    }
  }
  return true;
}

std::vector<std::string> default_labels(int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back("s" + std::to_string(i));
  return out;
}

// Block-diagonal product of two matrices.
CoxeterMatrix direct_sum(const CoxeterMatrix& a, const CoxeterMatrix& b) {
  const int n = a.rank() + b.rank();
  std::vector<int> e(static_cast<std::size_t>(n * n), 2);
  for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i * n + i)] = 1;
  for (int i = 0; i < a.rank(); ++i)
    for (int j = 0; j < a.rank(); ++j) e[static_cast<std::size_t>(i * n + j)] = a.at(i, j);
  for (int i = 0; i < b.rank(); ++i)
    for (int j = 0; j < b.rank(); ++j)
      e[static_cast<std::size_t>((i + a.rank()) * n + j + a.rank())] = b.at(i, j);
  return CoxeterMatrix(n, std::move(e));
}

CoxeterMatrix irreducible(char family, int n, int m) {
  auto bad = [&] { throw Error(ErrorCode::MalformedMatrix, std::string("unknown type ") + family + std::to_string(n)); };
  if (n < 1) bad();
  std::vector<int> e(static_cast<std::size_t>(n * n), 2);
  auto set = [&](int i, int j, int v) {
    e[static_cast<std::size_t>(i * n + j)] = v;
    e[static_cast<std::size_t>(j * n + i)] = v;
  };
  for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i * n + i)] = 1;
  switch (family) {
    case 'A':
      for (int i = 0; i + 1 < n; ++i) set(i, i + 1, 3);
      break;
    case 'B':
    case 'C':
      if (n < 2) bad();
      for (int i = 0; i + 2 < n; ++i) set(i, i + 1, 3);
      set(n - 2, n - 1, 4);
      break;
    case 'D':
      if (n < 4) bad();
      for (int i = 0; i + 2 < n; ++i) set(i, i + 1, 3);
      set(n - 3, n - 1, 3);
      break;
    case 'E':
      if (n < 6 || n > 8) bad();
      // Bourbaki labelling: 1-3-4-5-6(-7-8), 2 attached to 4.
      set(0, 2, 3);
      set(1, 3, 3);
      for (int i = 2; i + 1 < n; ++i) set(i, i + 1, 3);
      break;
    case 'F':
      if (n != 4) bad();
      set(0, 1, 3);
      set(1, 2, 4);
      set(2, 3, 3);
      break;
    case 'G':
      if (n != 2) bad();
      set(0, 1, 6);
      break;
    case 'H':
      if (n < 2 || n > 4) bad();
      set(0, 1, 5);
      for (int i = 1; i + 1 < n; ++i) set(i, i + 1, 3);
      break;
    case 'I':
      if (n != 2 || m < 2) bad();
      set(0, 1, m);
      break;
    default:
      bad();
  }
  return CoxeterMatrix(n, std::move(e));
}

}  // namespace

CoxeterMatrix::CoxeterMatrix(int rank, std::vector<int> entries) : rank_(rank), entries_(std::move(entries)) {
  validate();
}

void CoxeterMatrix::validate() const {
  if (rank_ < 1 || rank_ > 31) throw Error(ErrorCode::MalformedMatrix, "rank must be in 1..31");
  if (entries_.size() != static_cast<std::size_t>(rank_ * rank_))
    throw Error(ErrorCode::MalformedMatrix, "entry count does not match rank");
  for (int s = 0; s < rank_; ++s) {
    for (int t = 0; t < rank_; ++t) {
      const int v = at(s, t);
      if (v != at(t, s)) throw Error(ErrorCode::MalformedMatrix, "matrix not symmetric");
      if (s == t && v != 1) throw Error(ErrorCode::MalformedMatrix, "diagonal entry is not 1");
      if (s != t && v != kInfinity && v < 2) throw Error(ErrorCode::MalformedMatrix, "off-diagonal entry below 2");
    }
  }
}

CoxeterMatrix standard_matrix(const std::string& type) {
  std::string t;
  for (char c : type)
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  if (t.empty()) throw Error(ErrorCode::MalformedMatrix, "empty type");
  CoxeterMatrix acc;
  bool first = true;
  std::size_t pos = 0;
  while (pos <= t.size()) {
    std::size_t end = t.find_first_of("xX*", pos);
    if (end == std::string::npos) end = t.size();
    const std::string part = t.substr(pos, end - pos);
    if (part.size() < 2) throw Error(ErrorCode::MalformedMatrix, "bad type component '" + part + "'");
    const char fam = static_cast<char>(std::toupper(static_cast<unsigned char>(part[0])));
    int n = 0, m = 0;
    try {
      if (fam == 'I') {
        const auto lp = part.find('(');
        const auto rp = part.find(')');
        if (lp == std::string::npos || rp == std::string::npos || rp < lp)
          throw Error(ErrorCode::MalformedMatrix, "I2 needs I2(m)");
        n = std::stoi(part.substr(1, lp - 1));
        m = std::stoi(part.substr(lp + 1, rp - lp - 1));
      } else {
        std::size_t used = 0;
        n = std::stoi(part.substr(1), &used);
        if (used + 1 != part.size()) throw Error(ErrorCode::MalformedMatrix, "bad type component '" + part + "'");
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::MalformedMatrix, "bad type component '" + part + "'");
    }
    CoxeterMatrix c = irreducible(fam, n, m);
    acc = first ? c : direct_sum(acc, c);
    first = false;
    if (end == t.size()) break;
    pos = end + 1;
  }
  return acc;
}

CoxeterMatrix read_matrix(std::istream& in) {
  int n = 0;
  if (!(in >> n) || n < 1 || n > 31) throw Error(ErrorCode::MalformedMatrix, "missing or invalid rank");
  std::vector<int> e(static_cast<std::size_t>(n * n));
  for (auto& v : e)
    if (!(in >> v)) throw Error(ErrorCode::MalformedMatrix, "too few entries");
  std::string extra;
  if (in >> extra) throw Error(ErrorCode::MalformedMatrix, "trailing data '" + extra + "'");
  return CoxeterMatrix(n, std::move(e));
}

void write_matrix(std::ostream& out, const CoxeterMatrix& m) {
  out << m.rank() << '\n';
  for (int s = 0; s < m.rank(); ++s) {
    for (int t = 0; t < m.rank(); ++t) out << (t ? " " : "") << m.at(s, t);
    out << '\n';
  }
}

// --- DiagramInvolution ------------------------------------------------------

DiagramInvolution DiagramInvolution::identity(int rank) {
  std::vector<int> p(static_cast<std::size_t>(rank));
  for (int i = 0; i < rank; ++i) p[static_cast<std::size_t>(i)] = i;
  return DiagramInvolution(std::move(p));
}

DiagramInvolution DiagramInvolution::parse(const std::string& spec, int rank) {
  DiagramInvolution d = identity(rank);
  if (spec.empty() || spec == "id" || spec == "identity") return d;
  std::string digits;
  auto flush = [&] {
    if (digits.empty()) return;
    if (digits.size() != 2) throw Error(ErrorCode::InvalidTwist, "twist pairs are two generator digits: '" + spec + "'");
    const int a = digits[0] - '1';
    const int b = digits[1] - '1';
    if (a < 0 || b < 0 || a >= rank || b >= rank) throw Error(ErrorCode::InvalidTwist, "generator out of range in '" + spec + "'");
    d.perm_[static_cast<std::size_t>(a)] = b;
    d.perm_[static_cast<std::size_t>(b)] = a;
    digits.clear();
  };
  for (char c : spec) {
    if (std::isdigit(static_cast<unsigned char>(c))) digits.push_back(c);
    else if (c == ',' || c == ' ' || c == ';') flush();
    else throw Error(ErrorCode::InvalidTwist, "bad character in twist '" + spec + "'");
  }
  flush();
  return d;
}

bool DiagramInvolution::is_identity() const {
  for (std::size_t i = 0; i < perm_.size(); ++i)
    if (perm_[i] != static_cast<int>(i)) return false;
  return true;
}

TypeMask DiagramInvolution::apply(TypeMask mask) const {
  TypeMask out = 0;
  for (std::size_t i = 0; i < perm_.size(); ++i)
    if (mask >> i & 1u) out |= TypeMask{1} << perm_[i];
  return out;
}

std::string DiagramInvolution::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < perm_.size(); ++i) {
    const auto j = static_cast<std::size_t>(perm_[i]);
    if (j > i) {
      if (!out.empty()) out += ',';
      out += std::to_string(i + 1) + std::to_string(j + 1);
    }
  }
  return out.empty() ? "id" : out;
}

void DiagramInvolution::validate(const CoxeterMatrix& m) const {
  const int n = m.rank();
  if (static_cast<int>(perm_.size()) != n) throw Error(ErrorCode::InvalidTwist, "twist size differs from rank");
  for (int s = 0; s < n; ++s) {
    const int t = (*this)(s);
    if (t < 0 || t >= n) throw Error(ErrorCode::InvalidTwist, "twist image out of range");
    if ((*this)(t) != s) throw Error(ErrorCode::InvalidTwist, "twist is not an involution");
  }
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t)
      if (m.at((*this)(s), (*this)(t)) != m.at(s, t))
        throw Error(ErrorCode::InvalidTwist, "twist " + to_string() + " does not preserve the Coxeter matrix");
}

std::vector<DiagramInvolution> diagram_involutions(const CoxeterMatrix& m) {
  const int n = m.rank();
  std::vector<DiagramInvolution> out;
  std::vector<int> p(static_cast<std::size_t>(n), -1);
  // Enumerate involutive permutations by pairing the lowest unassigned index.
  auto rec = [&](auto&& self, int i) -> void {
    while (i < n && p[static_cast<std::size_t>(i)] != -1) ++i;
    if (i == n) {
      DiagramInvolution d(p);
      try {
        d.validate(m);
        out.push_back(d);
      } catch (const Error&) {
      }
      return;
    }
    p[static_cast<std::size_t>(i)] = i;
    self(self, i + 1);
    for (int j = i + 1; j < n; ++j) {
      if (p[static_cast<std::size_t>(j)] != -1) continue;
      p[static_cast<std::size_t>(i)] = j;
      p[static_cast<std::size_t>(j)] = i;
      self(self, i + 1);
      p[static_cast<std::size_t>(j)] = -1;
    }
    p[static_cast<std::size_t>(i)] = -1;
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.perm() < b.perm(); });
  return out;
}

// --- CoxeterSystem ----------------------------------------------------------

std::shared_ptr<const CoxeterSystem> CoxeterSystem::build(const CoxeterMatrix& matrix, std::size_t order_bound,
                                                          std::vector<std::string> labels) {
  matrix.validate();
  const int n = matrix.rank();
  if (labels.empty()) labels = default_labels(n);
  if (static_cast<int>(labels.size()) != n) throw Error(ErrorCode::MalformedMatrix, "label count differs from rank");

  const auto form = bilinear_form(matrix);
  if (!positive_definite(form, n))
    throw Error(ErrorCode::NonSphericalOrTooLarge, "Coxeter matrix is not of spherical type");

  // Close the simple roots under the simple reflections.
  std::vector<std::vector<double>> roots;
  auto find_root = [&](const std::vector<double>& v) -> std::int64_t {
    for (std::size_t i = 0; i < roots.size(); ++i) {
      bool eq = true;
      for (int k = 0; k < n && eq; ++k) eq = std::abs(roots[i][static_cast<std::size_t>(k)] - v[static_cast<std::size_t>(k)]) < 1e-7;
      if (eq) return static_cast<std::int64_t>(i);
    }
    return -1;
  };
  for (int s = 0; s < n; ++s) {
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(s)] = 1.0;
    roots.push_back(e);
  }
  std::vector<std::vector<std::uint32_t>> gen(static_cast<std::size_t>(n));
  for (std::size_t r = 0; r < roots.size(); ++r) {
    for (int s = 0; s < n; ++s) {
      std::vector<double> v = roots[r];
      double c = 0;
      for (int t = 0; t < n; ++t) c += form[static_cast<std::size_t>(s * n + t)] * v[static_cast<std::size_t>(t)];
      v[static_cast<std::size_t>(s)] -= 2 * c;
      std::int64_t idx = find_root(v);
      if (idx < 0) {
        if (roots.size() >= kRootLimit) throw Error(ErrorCode::NonSphericalOrTooLarge, "root system too large");
        idx = static_cast<std::int64_t>(roots.size());
        roots.push_back(std::move(v));
      }
      gen[static_cast<std::size_t>(s)].push_back(static_cast<std::uint32_t>(idx));
    }
  }
  const std::size_t nr = roots.size();

  auto sys = std::shared_ptr<CoxeterSystem>(new CoxeterSystem());
  sys->matrix_ = matrix;
  sys->labels_ = std::move(labels);

  // Elements are permutations of the roots; an element is determined by the
  // images of the simple roots, which serve as the hash key.
  std::vector<std::vector<std::uint32_t>> perms;
  std::unordered_map<std::vector<std::uint32_t>, ElemId, KeyHash> index;
  auto key_of = [&](const std::vector<std::uint32_t>& p) {
    return std::vector<std::uint32_t>(p.begin(), p.begin() + n);
  };
  std::vector<std::uint32_t> id(nr);
  for (std::size_t r = 0; r < nr; ++r) id[r] = static_cast<std::uint32_t>(r);
  perms.push_back(id);
  index.emplace(key_of(id), 0);
  sys->words_.push_back({});
  sys->lengths_.push_back(0);

  std::vector<ElemId> right;
  std::size_t level_begin = 0, level_end = 1;
  std::uint16_t level = 0;
  while (level_begin < level_end) {
    for (std::size_t w = level_begin; w < level_end; ++w) {
      for (int s = 0; s < n; ++s) {
        std::vector<std::uint32_t> p(nr);
        const auto& pw = perms[w];
        const auto& gs = gen[static_cast<std::size_t>(s)];
        for (std::size_t r = 0; r < nr; ++r) p[r] = pw[gs[r]];
        auto k = key_of(p);
        auto it = index.find(k);
        if (it == index.end()) {
          if (perms.size() >= order_bound)
            throw Error(ErrorCode::NonSphericalOrTooLarge,
                        "|W| exceeds the configured bound " + std::to_string(order_bound));
          const auto nid = static_cast<ElemId>(perms.size());
          index.emplace(std::move(k), nid);
          perms.push_back(std::move(p));
          Word wd = sys->words_[w];
          wd.push_back(static_cast<std::uint8_t>(s));
          sys->words_.push_back(std::move(wd));
          sys->lengths_.push_back(static_cast<std::uint16_t>(level + 1));
        }
      }
    }
    level_begin = level_end;
    level_end = perms.size();
    ++level;
  }

  const std::size_t N = perms.size();
  sys->right_.resize(N * static_cast<std::size_t>(n));
  sys->left_.resize(N * static_cast<std::size_t>(n));
  sys->inverse_.resize(N);
  sys->support_.resize(N);
  std::vector<std::uint32_t> tmp(static_cast<std::size_t>(n));
  for (std::size_t w = 0; w < N; ++w) {
    const auto& pw = perms[w];
    for (int s = 0; s < n; ++s) {
      const auto& gs = gen[static_cast<std::size_t>(s)];
      for (int t = 0; t < n; ++t) tmp[static_cast<std::size_t>(t)] = pw[gs[static_cast<std::size_t>(t)]];
      sys->right_[w * static_cast<std::size_t>(n) + static_cast<std::size_t>(s)] = index.at(tmp);
      for (int t = 0; t < n; ++t) tmp[static_cast<std::size_t>(t)] = gs[pw[static_cast<std::size_t>(t)]];
      sys->left_[w * static_cast<std::size_t>(n) + static_cast<std::size_t>(s)] = index.at(tmp);
    }
    std::vector<std::uint32_t> inv(nr);
    for (std::size_t r = 0; r < nr; ++r) inv[pw[r]] = static_cast<std::uint32_t>(r);
    sys->inverse_[w] = index.at(key_of(inv));
    TypeMask m = 0;
    for (auto s : sys->words_[w]) m |= TypeMask{1} << s;
    sys->support_[w] = m;
    if (sys->lengths_[w] > sys->lengths_[sys->longest_]) sys->longest_ = static_cast<ElemId>(w);
  }
  for (int s = 0; s < n; ++s) sys->generator_ids_.push_back(sys->right_[static_cast<std::size_t>(s)]);

  if (N <= kFullTableLimit) {
    sys->table_.resize(N * N);
    for (std::size_t u = 0; u < N; ++u)
      for (std::size_t v = 0; v < N; ++v) {
        ElemId x = static_cast<ElemId>(u);
        for (auto s : sys->words_[v]) x = sys->right_mul(x, s);
        sys->table_[u * N + v] = x;
      }
  }
  return sys;
}

ElemId CoxeterSystem::mul(ElemId u, ElemId v) const {
  if (!table_.empty()) return table_[static_cast<std::size_t>(u) * order() + v];
  for (auto s : words_[v]) u = right_mul(u, s);
  return u;
}

ElemId CoxeterSystem::from_word(const Word& w) const {
  ElemId x = 0;
  for (auto s : w) {
    if (s >= rank()) throw Error(ErrorCode::BadType, "generator index out of range");
    x = right_mul(x, s);
  }
  return x;
}

ElemId CoxeterSystem::longest_in(TypeMask subset) const {
  ElemId w = 0;
  for (bool grew = true; grew;) {
    grew = false;
    for (int s = 0; s < rank(); ++s) {
      if (!(subset >> s & 1u)) continue;
      const ElemId ws = right_mul(w, s);
      if (lengths_[ws] > lengths_[w]) {
        w = ws;
        grew = true;
        break;
      }
    }
  }
  return w;
}

TypeMask CoxeterSystem::left_descents(ElemId w) const {
  TypeMask m = 0;
  for (int s = 0; s < rank(); ++s)
    if (lengths_[left_mul(s, w)] < lengths_[w]) m |= TypeMask{1} << s;
  return m;
}

TypeMask CoxeterSystem::right_descents(ElemId w) const {
  TypeMask m = 0;
  for (int s = 0; s < rank(); ++s)
    if (lengths_[right_mul(w, s)] < lengths_[w]) m |= TypeMask{1} << s;
  return m;
}

bool CoxeterSystem::bruhat_leq(ElemId u, ElemId w) const {
  while (true) {
    if (u == w) return true;
    if (lengths_[u] >= lengths_[w]) return false;
    const int s = words_[w].back();
    const ElemId us = right_mul(u, s);
    if (lengths_[us] < lengths_[u]) u = us;
    w = right_mul(w, s);
  }
}

ElemId CoxeterSystem::twist(const DiagramInvolution& theta, ElemId w) const {
  ElemId x = 0;
  for (auto s : words_[w]) x = right_mul(x, theta(s));
  return x;
}

std::vector<ElemId> CoxeterSystem::twist_table(const DiagramInvolution& theta) const {
  theta.validate(matrix_);
  std::vector<ElemId> out(order());
  for (ElemId w = 0; w < order(); ++w) out[w] = twist(theta, w);
  return out;
}

std::string CoxeterSystem::format(ElemId w) const {
  if (words_[w].empty()) return "1";
  std::string out;
  for (auto s : words_[w]) out += labels_[s];
  return out;
}

std::string CoxeterSystem::format_mask(TypeMask mask) const {
  std::string out = "{";
  bool first = true;
  for (int s = 0; s < rank(); ++s) {
    if (!(mask >> s & 1u)) continue;
    if (!first) out += ',';
    out += labels_[static_cast<std::size_t>(s)];
    first = false;
  }
  return out + "}";
}

// --- CoxeterElement ---------------------------------------------------------

int CoxeterElement::length() const { return owner_->length(id_); }
const Word& CoxeterElement::word() const { return owner_->word(id_); }
CoxeterElement CoxeterElement::inverse() const { return CoxeterElement(owner_, owner_->inverse(id_)); }
std::string CoxeterElement::to_string() const { return owner_->format(id_); }

// --- free functions -----------------------------------------------------------

SystemPtr build_system(const CoxeterMatrix& matrix, std::size_t order_bound) {
  return CoxeterSystem::build(matrix, order_bound);
}

CoxeterElement multiply(const CoxeterElement& u, const CoxeterElement& v) {
  if (u.owner() != v.owner() || u.owner() == nullptr) throw Error(ErrorCode::MixedSystems, "elements of different systems");
  return u.owner()->element(u.owner()->mul(u.id(), v.id()));
}

CoxeterElement longest_element(const CoxeterSystem& system, TypeMask subset) {
  return system.element(system.longest_in(subset & system.all_types()));
}

bool bruhat_leq(const CoxeterElement& u, const CoxeterElement& w) {
  if (u.owner() != w.owner() || u.owner() == nullptr) throw Error(ErrorCode::MixedSystems, "elements of different systems");
  return u.owner()->bruhat_leq(u.id(), w.id());
}

bool is_twisted_involution(const CoxeterSystem& system, const DiagramInvolution& theta, ElemId w) {
  return system.twist(theta, w) == system.inverse(w);
}

std::vector<TwistedInvolution> twisted_involutions(const CoxeterSystem& system, const DiagramInvolution& theta) {
  theta.validate(system.matrix());
  std::vector<TwistedInvolution> out;
  for (ElemId w = 0; w < system.order(); ++w)
    if (is_twisted_involution(system, theta, w)) out.push_back({system.element(w), theta});
  return out;
}

TwistedDecomposition twisted_decomposition(const TwistedInvolution& ti) {
  const CoxeterSystem* sys = ti.element.owner();
  if (sys == nullptr) throw Error(ErrorCode::MixedSystems, "element has no owner");
  const auto& theta = ti.twist;
  theta.validate(sys->matrix());
  ElemId w = ti.element.id();
  if (!is_twisted_involution(*sys, theta, w))
    throw Error(ErrorCode::NotTwisted, sys->format(w) + " is not a " + theta.to_string() + "-twisted involution");
  TwistedDecomposition d;
  // Stop as soon as w is w_I for its own left descent set; otherwise strip the
  // lowest-index s with l(s w θ(s)) = l(w) - 2.
  for (bool stripped = true; stripped;) {
    stripped = false;
    if (sys->longest_in(sys->left_descents(w)) == w) break;
    for (int s = 0; s < sys->rank(); ++s) {
      const ElemId v = sys->left_mul(s, sys->right_mul(w, theta(s)));
      if (sys->length(v) == sys->length(w) - 2) {
        d.prefix.push_back(static_cast<std::uint8_t>(s));
        w = v;
        stripped = true;
        break;
      }
    }
  }
  d.subset = sys->left_descents(w);
  if (sys->longest_in(d.subset) != w || theta.apply(d.subset) != d.subset)
    throw Error(ErrorCode::MismatchBug, "terminal element " + sys->format(w) + " is not a theta-stable w_I");
  return d;
}

ElemId reconstruct(const CoxeterSystem& system, const DiagramInvolution& theta, const TwistedDecomposition& d) {
  ElemId x = system.from_word(d.prefix);
  x = system.mul(x, system.longest_in(d.subset));
  for (auto it = d.prefix.rbegin(); it != d.prefix.rend(); ++it) x = system.right_mul(x, theta(*it));
  return x;
}

CheckReport verify_twisted_involutions(const CoxeterSystem& sys, const DiagramInvolution& theta) {
  theta.validate(sys.matrix());
  CheckReport rep;
  const auto inv = twisted_involutions(sys, theta);
  auto& count = rep.add("involutions.enumeration");
  std::size_t filtered = 0;
  for (ElemId w = 0; w < sys.order(); ++w) filtered += sys.twist(theta, w) == sys.inverse(w);
  count.checked = sys.order();
  if (filtered != inv.size())
    count.fail(std::to_string(inv.size()) + " enumerated, " + std::to_string(filtered) + " by filter");
  auto& lengths = rep.add("lemma.lengths");
  auto& fixed = rep.add("lemma.fixed");
  auto& closed = rep.add("lemma.closed");
  auto& rebuild = rep.add("decomposition.reconstruct");
  auto& shape = rep.add("decomposition.shape");
  for (const auto& ti : inv) {
    const ElemId w = ti.element.id();
    for (int s = 0; s < sys.rank(); ++s) {
      const ElemId sw = sys.left_mul(s, w);
      const ElemId wt = sys.right_mul(w, theta(s));
      const ElemId swt = sys.left_mul(s, wt);
      const std::string at = sys.format(w) + ", s" + std::to_string(s + 1);
      ++lengths.checked;
      if (sys.length(sw) != sys.length(wt)) lengths.fail(at);
      ++fixed.checked;
      if (sys.length(swt) == sys.length(w) && swt != w) fixed.fail(at);
      ++closed.checked;
      if (!is_twisted_involution(sys, theta, swt)) closed.fail(at);
    }
    const auto d = twisted_decomposition(ti);
    ++rebuild.checked;
    if (reconstruct(sys, theta, d) != w) rebuild.fail(sys.format(w));
    ++shape.checked;
    if (theta.apply(d.subset) != d.subset ||
        sys.length(w) != sys.length(sys.longest_in(d.subset)) + 2 * static_cast<int>(d.prefix.size()))
      shape.fail(sys.format(w));
  }
  return rep;
}

}  // namespace twinflip::coxeter
