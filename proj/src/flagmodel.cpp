#include "twinflip/flagmodel.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>

#include "twinflip/error.hpp"

namespace twinflip::flagmodel {

namespace {

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

using Rows = std::array<std::array<Elt, kMaxDim>, 2 * kMaxDim>;

// In-place reduced row echelon form of the first m rows; returns the rank.
int rref(const Field& F, int n, Rows& a, int m, int* pivots = nullptr) {
  int r = 0;
  for (int col = 0; col < n && r < m; ++col) {
    int piv = -1;
    for (int i = r; i < m; ++i)
      if (a[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[static_cast<std::size_t>(r)], a[static_cast<std::size_t>(piv)]);
    auto& row = a[static_cast<std::size_t>(r)];
    const Elt s = F.inv(row[static_cast<std::size_t>(col)]);
    for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = F.mul(s, row[static_cast<std::size_t>(j)]);
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      auto& other = a[static_cast<std::size_t>(i)];
      const Elt f = other[static_cast<std::size_t>(col)];
      if (f == 0) continue;
      for (int j = 0; j < n; ++j)
        other[static_cast<std::size_t>(j)] = F.sub(other[static_cast<std::size_t>(j)], F.mul(f, row[static_cast<std::size_t>(j)]));
    }
    if (pivots) pivots[r] = col;
    ++r;
  }
  return r;
}

void load(int n, Rows& a, const std::vector<Vec>& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    for (int j = 0; j < n; ++j) a[i][static_cast<std::size_t>(j)] = vget(v[i], j);
}

Vec pack(int n, const std::array<Elt, kMaxDim>& row) {
  Vec v = 0;
  for (int j = 0; j < n; ++j) v = vset(v, j, row[static_cast<std::size_t>(j)]);
  return v;
}

Vec unit(int k) { return vset(0, k, 1); }

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

// --- Field ----------------------------------------------------------------------

Field::Field(int q, bool frobenius) : q_(q), frob_(false) {
  if (q < 2 || q > 16) throw Error(ErrorCode::Usage, "field order must be in 2..16");
  if (is_prime(q)) {
    p_ = q;
    k_ = 1;
  } else if (q == 4 || q == 9) {
    p_ = q == 4 ? 2 : 3;
    k_ = 2;
  } else {
    throw Error(ErrorCode::Usage, "GF(" + std::to_string(q) + ") is not supported (need p or p^2)");
  }
  auto lo = [&](int a) { return a % p_; };
  auto hi = [&](int a) { return a / p_; };
  if (k_ == 2) {
    // Lowest (c1, c0) with x^2 + c1 x + c0 irreducible.
    bool found = false;
    for (int c1 = 0; c1 < p_ && !found; ++c1)
      for (int c0 = 1; c0 < p_ && !found; ++c0) {
        bool root = false;
        for (int x = 0; x < p_; ++x) root = root || (x * x + c1 * x + c0) % p_ == 0;
        if (!root) {
          c1_ = c1;
          c0_ = c0;
          found = true;
        }
      }
  }
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) {
      const auto i = static_cast<std::size_t>(a * 16 + b);
      if (k_ == 1) {
        add_[i] = static_cast<Elt>((a + b) % p_);
        mul_[i] = static_cast<Elt>((a * b) % p_);
      } else {
        const int s0 = (lo(a) + lo(b)) % p_, s1 = (hi(a) + hi(b)) % p_;
        add_[i] = static_cast<Elt>(s0 + s1 * p_);
        // (a0 + a1 x)(b0 + b1 x) with x^2 = -c1 x - c0
        const int t0 = lo(a) * lo(b), t1 = lo(a) * hi(b) + hi(a) * lo(b), t2 = hi(a) * hi(b);
        const int r0 = ((t0 - t2 * c0_) % p_ + p_ * p_ * 4) % p_;
        const int r1 = ((t1 - t2 * c1_) % p_ + p_ * p_ * 4) % p_;
        mul_[i] = static_cast<Elt>(r0 + r1 * p_);
      }
    }
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      if (add_[static_cast<std::size_t>(a * 16 + b)] == 0) neg_[static_cast<std::size_t>(a)] = static_cast<Elt>(b);
      if (mul_[static_cast<std::size_t>(a * 16 + b)] == 1) inv_[static_cast<std::size_t>(a)] = static_cast<Elt>(b);
    }
  }
  frob_ = frobenius && k_ == 2;
  for (int a = 0; a < q; ++a) sigma_[static_cast<std::size_t>(a)] = frob_ ? pow(static_cast<Elt>(a), static_cast<unsigned>(p_)) : static_cast<Elt>(a);
}

std::string Field::name() const { return "GF(" + std::to_string(q_) + ")"; }

Elt Field::inv(Elt a) const {
  if (a == 0) throw Error(ErrorCode::ValidationFailed, "inverse of zero");
  return inv_[a];
}

Elt Field::pow(Elt a, unsigned e) const {
  Elt r = 1;
  for (unsigned i = 0; i < e; ++i) r = mul(r, a);
  return r;
}

CheckReport Field::verify() const {
  CheckReport rep;
  auto& ax = rep.add("field.axioms");
  auto& sg = rep.add("field.sigma");
  for (int a = 0; a < q_; ++a) {
    const Elt x = static_cast<Elt>(a);
    ++ax.checked;
    if (add(x, 0) != x || mul(x, 1) != x || add(x, neg(x)) != 0) ax.fail("identities fail at " + std::to_string(a));
    if (x != 0 && mul(x, inv(x)) != 1) ax.fail("no inverse for " + std::to_string(a));
    if (sigma(sigma(x)) != x) sg.fail("sigma^2 != id at " + std::to_string(a));
    for (int b = 0; b < q_; ++b) {
      const Elt y = static_cast<Elt>(b);
      if (add(x, y) != add(y, x) || mul(x, y) != mul(y, x)) ax.fail("not commutative");
      ++sg.checked;
      if (sigma(add(x, y)) != add(sigma(x), sigma(y)) || sigma(mul(x, y)) != mul(sigma(x), sigma(y)))
        sg.fail("sigma is not a ring map");
      for (int c = 0; c < q_; ++c) {
        const Elt z = static_cast<Elt>(c);
        ++ax.checked;
        if (add(add(x, y), z) != add(x, add(y, z)) || mul(mul(x, y), z) != mul(x, mul(y, z)) ||
            mul(x, add(y, z)) != add(mul(x, y), mul(x, z)))
          ax.fail("associativity or distributivity fails at " + std::to_string(a) + "," + std::to_string(b) + "," +
                  std::to_string(c));
      }
    }
  }
  if (frob_) {
    bool nontrivial = false;
    for (int a = 0; a < q_; ++a) nontrivial = nontrivial || sigma(static_cast<Elt>(a)) != a;
    if (!nontrivial) sg.fail("Frobenius acts trivially");
  }
  return rep;
}

// --- linear algebra -------------------------------------------------------------------

Vec vadd(const Field& F, int n, Vec a, Vec b) {
  Vec r = 0;
  for (int i = 0; i < n; ++i) r = vset(r, i, F.add(vget(a, i), vget(b, i)));
  return r;
}

Vec vscale(const Field& F, int n, Elt c, Vec a) {
  Vec r = 0;
  for (int i = 0; i < n; ++i) r = vset(r, i, F.mul(c, vget(a, i)));
  return r;
}

Vec vsigma(const Field& F, int n, Vec a) {
  Vec r = 0;
  for (int i = 0; i < n; ++i) r = vset(r, i, F.sigma(vget(a, i)));
  return r;
}

Mat mat_identity(int n) {
  Mat m = 0;
  for (int i = 0; i < n; ++i) m = mset(m, i, i, 1);
  return m;
}

Mat mat_mul(const Field& F, int n, Mat a, Mat b) {
  Mat r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Elt s = 0;
      for (int k = 0; k < n; ++k) s = F.add(s, F.mul(mget(a, i, k), mget(b, k, j)));
      r = mset(r, i, j, s);
    }
  return r;
}

Mat mat_transpose(int n, Mat a) {
  Mat r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r = mset(r, j, i, mget(a, i, j));
  return r;
}

Mat mat_sigma(const Field& F, int n, Mat a) {
  Mat r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r = mset(r, i, j, F.sigma(mget(a, i, j)));
  return r;
}

Mat mat_inverse(const Field& F, int n, Mat a) {
  std::array<std::array<Elt, 2 * kMaxDim>, kMaxDim> aug{};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = mget(a, i, j);
    aug[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + i)] = 1;
  }
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int i = col; i < n; ++i)
      if (aug[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) throw Error(ErrorCode::ValidationFailed, "singular matrix");
    std::swap(aug[static_cast<std::size_t>(col)], aug[static_cast<std::size_t>(piv)]);
    auto& row = aug[static_cast<std::size_t>(col)];
    const Elt s = F.inv(row[static_cast<std::size_t>(col)]);
    for (int j = 0; j < 2 * n; ++j) row[static_cast<std::size_t>(j)] = F.mul(s, row[static_cast<std::size_t>(j)]);
    for (int i = 0; i < n; ++i) {
      if (i == col) continue;
      auto& other = aug[static_cast<std::size_t>(i)];
      const Elt f = other[static_cast<std::size_t>(col)];
      if (f == 0) continue;
      for (int j = 0; j < 2 * n; ++j)
        other[static_cast<std::size_t>(j)] = F.sub(other[static_cast<std::size_t>(j)], F.mul(f, row[static_cast<std::size_t>(j)]));
    }
  }
  Mat r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r = mset(r, i, j, aug[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + j)]);
  return r;
}

int mat_rank(const Field& F, int n, Mat a) {
  Rows m{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = mget(a, i, j);
  return rref(F, n, m, n);
}

Vec mat_apply(const Field& F, int n, Mat a, Vec v) {
  Vec r = 0;
  for (int i = 0; i < n; ++i) {
    Elt s = 0;
    for (int k = 0; k < n; ++k) s = F.add(s, F.mul(mget(a, i, k), vget(v, k)));
    r = vset(r, i, s);
  }
  return r;
}

Vec mat_column(int n, Mat a, int j) {
  Vec v = 0;
  for (int i = 0; i < n; ++i) v = vset(v, i, mget(a, i, j));
  return v;
}

Mat mat_from_columns(int n, const std::vector<Vec>& cols) {
  Mat m = 0;
  for (int j = 0; j < static_cast<int>(cols.size()); ++j)
    for (int i = 0; i < n; ++i) m = mset(m, i, j, vget(cols[static_cast<std::size_t>(j)], i));
  return m;
}

Mat mat_permutation(int n, const std::vector<int>& perm) {
  Mat m = 0;
  for (int k = 0; k < n; ++k) m = mset(m, perm[static_cast<std::size_t>(k)], k, 1);
  return m;
}

std::string mat_string(const Field&, int n, Mat a) {
  std::string s = "[";
  for (int i = 0; i < n; ++i) {
    if (i) s += ';';
    for (int j = 0; j < n; ++j) s += (j ? "," : "") + std::to_string(mget(a, i, j));
  }
  return s + "]";
}

std::uint64_t Subspace::key() const {
  std::uint64_t k = 0;
  for (int r = 0; r < dim; ++r) k |= static_cast<std::uint64_t>(rows[static_cast<std::size_t>(r)]) << (16 * r);
  return k;
}

Subspace span(const Field& F, int n, const std::vector<Vec>& vectors) {
  if (vectors.size() > 2 * kMaxDim) {
    // Reduce in chunks to bound the scratch space.
    Subspace acc = span(F, n, std::vector<Vec>(vectors.begin(), vectors.begin() + kMaxDim));
    for (std::size_t i = kMaxDim; i < vectors.size(); i += kMaxDim) {
      std::vector<Vec> part(acc.rows.begin(), acc.rows.begin() + acc.dim);
      for (std::size_t j = i; j < std::min(vectors.size(), i + kMaxDim); ++j) part.push_back(vectors[j]);
      acc = span(F, n, part);
    }
    return acc;
  }
  Rows a{};
  load(n, a, vectors);
  const int r = rref(F, n, a, static_cast<int>(vectors.size()));
  Subspace s;
  s.n = n;
  s.dim = r;
  for (int i = 0; i < r; ++i) s.rows[static_cast<std::size_t>(i)] = pack(n, a[static_cast<std::size_t>(i)]);
  return s;
}

int rank_of(const Field& F, int n, const std::vector<Vec>& vectors) { return span(F, n, vectors).dim; }

Subspace null_space(const Field& F, int n, const std::vector<Vec>& forms) {
  Rows a{};
  load(n, a, forms);
  int piv[2 * kMaxDim] = {};
  const int r = rref(F, n, a, static_cast<int>(forms.size()), piv);
  std::vector<Vec> basis;
  for (int f = 0; f < n; ++f) {
    bool is_pivot = false;
    for (int i = 0; i < r; ++i) is_pivot = is_pivot || piv[i] == f;
    if (is_pivot) continue;
    Vec v = unit(f);
    for (int i = 0; i < r; ++i) v = vset(v, piv[i], F.neg(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(f)]));
    basis.push_back(v);
  }
  if (basis.empty()) {
    Subspace z;
    z.n = n;
    return z;
  }
  return span(F, n, basis);
}

// --- forms ----------------------------------------------------------------------------

std::string to_string(FormKind k) { return k == FormKind::Hermitian ? "hermitian" : "alternating"; }

FormKind parse_form_kind(const std::string& s) {
  if (s == "hermitian") return FormKind::Hermitian;
  if (s == "alternating" || s == "symplectic") return FormKind::Alternating;
  throw Error(ErrorCode::Usage, "unknown form kind '" + s + "'");
}

Form make_form(const Field& F, int n, FormKind kind, const Mat* gram) {
  Form f;
  f.kind = kind;
  if (gram) {
    f.gram = *gram;
  } else if (kind == FormKind::Hermitian) {
    f.gram = mat_identity(n);
  } else {
    if (n % 2) throw Error(ErrorCode::ValidationFailed, "alternating forms need even dimension");
    const int h = n / 2;
    for (int i = 0; i < h; ++i) {
      f.gram = mset(f.gram, i, h + i, 1);
      f.gram = mset(f.gram, h + i, i, F.neg(1));
    }
  }
  if (mat_rank(F, n, f.gram) != n) throw Error(ErrorCode::ValidationFailed, "degenerate Gram matrix");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Elt a = mget(f.gram, i, j), b = mget(f.gram, j, i);
      if (kind == FormKind::Hermitian && b != F.sigma(a))
        throw Error(ErrorCode::ValidationFailed, "Gram matrix is not hermitian");
      if (kind == FormKind::Alternating && (b != F.neg(a) || (i == j && a != 0)))
        throw Error(ErrorCode::ValidationFailed, "Gram matrix is not alternating");
    }
  return f;
}

Elt pair(const Field& F, int n, const Form& f, Vec u, Vec v) {
  const bool herm = f.kind == FormKind::Hermitian;
  Elt s = 0;
  for (int a = 0; a < n; ++a) {
    const Elt ua = herm ? F.sigma(vget(u, a)) : vget(u, a);
    if (ua == 0) continue;
    Elt t = 0;
    for (int b = 0; b < n; ++b) t = F.add(t, F.mul(mget(f.gram, a, b), vget(v, b)));
    s = F.add(s, F.mul(ua, t));
  }
  return s;
}

Subspace perp(const Field& F, const Form& f, const Subspace& s) {
  const int n = s.n;
  const bool herm = f.kind == FormKind::Hermitian;
  std::vector<Vec> forms;
  for (int r = 0; r < s.dim; ++r) {
    const Vec u = s.rows[static_cast<std::size_t>(r)];
    Vec c = 0;
    for (int b = 0; b < n; ++b) {
      Elt t = 0;
      for (int a = 0; a < n; ++a) {
        const Elt ua = herm ? F.sigma(vget(u, a)) : vget(u, a);
        t = F.add(t, F.mul(ua, mget(f.gram, a, b)));
      }
      c = vset(c, b, t);
    }
    forms.push_back(c);
  }
  if (forms.empty()) {
    std::vector<Vec> all;
    for (int k = 0; k < n; ++k) all.push_back(unit(k));
    return span(F, n, all);
  }
  return null_space(F, n, forms);
}

// --- explicit flags ------------------------------------------------------------------------

namespace {

int meet_dim_explicit(const Field& F, int n, const Subspace& a, const Subspace& b) {
  std::vector<Vec> v(a.rows.begin(), a.rows.begin() + a.dim);
  v.insert(v.end(), b.rows.begin(), b.rows.begin() + b.dim);
  return a.dim + b.dim - rank_of(F, n, v);
}

Subspace map_subspace(const Field& F, Mat g, const Subspace& s) {
  std::vector<Vec> v;
  for (int r = 0; r < s.dim; ++r) v.push_back(mat_apply(F, s.n, g, s.rows[static_cast<std::size_t>(r)]));
  return span(F, s.n, v);
}

// w(j) from the intersection-dimension table d(i, j), 0 <= i, j <= n.
template <class D>
std::vector<int> perm_from_dims(int n, D d) {
  std::vector<int> w(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    for (int i = 1; i <= n; ++i)
      if (d(i, j) - d(i - 1, j) - d(i, j - 1) + d(i - 1, j - 1) == 1) w[static_cast<std::size_t>(j - 1)] = i - 1;
  return w;
}

std::vector<int> word_perm(const coxeter::Word& word, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  for (auto s : word) std::swap(p[s], p[s + 1u]);
  return p;
}

}  // namespace

ElemId relative_position(const Field& F, const coxeter::CoxeterSystem& W, const Flag& a, const Flag& b) {
  if (a.chain.size() != b.chain.size() || a.chain.empty() || a.chain[0].n != b.chain[0].n)
    throw Error(ErrorCode::MixedAmbient, "flags live in different spaces");
  const int n = a.chain[0].n;
  if (W.rank() != n - 1) throw Error(ErrorCode::MixedAmbient, "Weyl group rank does not match the ambient space");
  auto d = [&](int i, int j) {
    if (i == 0 || j == 0) return 0;
    if (i == n) return j;
    if (j == n) return i;
    return meet_dim_explicit(F, n, a.chain[static_cast<std::size_t>(i - 1)], b.chain[static_cast<std::size_t>(j - 1)]);
  };
  const auto w = perm_from_dims(n, d);
  for (ElemId x = 0; x < W.order(); ++x)
    if (word_perm(W.word(x), n) == w) return x;
  throw Error(ErrorCode::MismatchBug, "relative position is not a permutation");
}

Flag orthogonal_flag(const Field& F, const Flag& flag, const Form& form) {
  Flag out;
  for (auto it = flag.chain.rbegin(); it != flag.chain.rend(); ++it) out.chain.push_back(perp(F, form, *it));
  return out;
}

Flag act(const Field& F, Mat g, const Flag& flag) {
  Flag out;
  for (const auto& s : flag.chain) out.chain.push_back(map_subspace(F, g, s));
  return out;
}

std::size_t gaussian_flag_count(int n, int q) {
  std::size_t c = 1;
  for (int i = 1; i <= n; ++i) c *= (ipow(static_cast<std::size_t>(q), i) - 1) / static_cast<std::size_t>(q - 1);
  return c;
}

// --- FlagSpace -------------------------------------------------------------------------------

FlagSpace::FlagSpace(std::shared_ptr<const Field> field, int n, std::size_t flag_limit)
    : field_(std::move(field)), n_(n) {
  if (n < 2 || n > kMaxDim) throw Error(ErrorCode::Usage, "flag model supports 2 <= n <= 4");
  const auto count = gaussian_flag_count(n, field_->q());
  if (count > flag_limit)
    throw Error(ErrorCode::TooLarge, std::to_string(count) + " flags exceed the limit " + std::to_string(flag_limit));
  weyl_ = coxeter::build_system(coxeter::standard_matrix("A" + std::to_string(n - 1)));
  const Field& F = *field_;
  const int q = F.q();

  // Subspaces of each proper dimension, enumerated by pivot pattern.
  by_dim_.resize(static_cast<std::size_t>(n + 1));
  for (int d = 1; d < n; ++d) {
    std::vector<Subspace> found;
    std::vector<int> piv(static_cast<std::size_t>(d));
    auto choose = [&](auto&& self, int idx, int start) -> void {
      if (idx == d) {
        // free positions: row r, column c > piv[r], c not a pivot
        std::vector<std::pair<int, int>> freepos;
        for (int r = 0; r < d; ++r)
          for (int c = piv[static_cast<std::size_t>(r)] + 1; c < n; ++c)
            if (std::find(piv.begin(), piv.end(), c) == piv.end()) freepos.emplace_back(r, c);
        const std::size_t total = ipow(static_cast<std::size_t>(q), static_cast<int>(freepos.size()));
        for (std::size_t code = 0; code < total; ++code) {
          Subspace s;
          s.n = n;
          s.dim = d;
          for (int r = 0; r < d; ++r) s.rows[static_cast<std::size_t>(r)] = unit(piv[static_cast<std::size_t>(r)]);
          std::size_t c = code;
          for (auto [r, col] : freepos) {
            s.rows[static_cast<std::size_t>(r)] = vset(s.rows[static_cast<std::size_t>(r)], col, static_cast<Elt>(c % static_cast<std::size_t>(q)));
            c /= static_cast<std::size_t>(q);
          }
          found.push_back(s);
        }
        return;
      }
      for (int c = start; c < n; ++c) {
        piv[static_cast<std::size_t>(idx)] = c;
        self(self, idx + 1, c + 1);
      }
    };
    choose(choose, 0, 0);
    std::sort(found.begin(), found.end(), [](const Subspace& a, const Subspace& b) { return a.key() < b.key(); });
    for (auto& s : found) {
      const auto id = static_cast<SubspaceId>(subspaces_.size());
      by_dim_[static_cast<std::size_t>(d)].push_back(id);
      sub_index_.emplace(s.key(), id);
      subspaces_.push_back(s);
    }
  }

  const std::size_t S = subspaces_.size();
  if (S <= 4096) {
    meet_.resize(S * S);
    for (SubspaceId a = 0; a < S; ++a)
      for (SubspaceId b = a; b < S; ++b) {
        const auto m = static_cast<std::uint8_t>(meet_dim_explicit(F, n, subspaces_[a], subspaces_[b]));
        meet_[a * S + b] = m;
        meet_[b * S + a] = m;
      }
  }

  // Superspaces one dimension up.
  std::vector<std::vector<SubspaceId>> up(S);
  for (int d = 1; d + 1 < n; ++d)
    for (SubspaceId a : of_dim(d))
      for (SubspaceId b : of_dim(d + 1))
        if (meet_dim(a, b) == d) up[a].push_back(b);

  std::array<SubspaceId, kMaxDim - 1> cur{};
  auto extend = [&](auto&& self, int level) -> void {
    if (level == n - 1) {
      flag_index_.emplace(chain_key(cur), static_cast<ChamberId>(flags_.size()));
      flags_.push_back(cur);
      return;
    }
    const auto& cands = level == 0 ? of_dim(1) : up[cur[static_cast<std::size_t>(level - 1)]];
    for (SubspaceId s : cands) {
      cur[static_cast<std::size_t>(level)] = s;
      self(self, level + 1);
    }
  };
  extend(extend, 0);
  if (flags_.size() != count) throw Error(ErrorCode::MismatchBug, "flag count differs from the Gaussian product");

  perm_to_elem_.assign(ipow(static_cast<std::size_t>(n), n), UINT32_MAX);
  elem_to_perm_.resize(weyl_->order());
  for (ElemId w = 0; w < weyl_->order(); ++w) {
    const auto p = word_perm(weyl_->word(w), n);
    std::size_t code = 0;
    for (int k = n - 1; k >= 0; --k) code = code * static_cast<std::size_t>(n) + static_cast<std::size_t>(p[static_cast<std::size_t>(k)]);
    perm_to_elem_[code] = w;
    elem_to_perm_[w] = p;
  }
}

std::uint64_t FlagSpace::chain_key(const std::array<SubspaceId, kMaxDim - 1>& c) const {
  std::uint64_t k = 0;
  for (int i = 0; i < n_ - 1; ++i) k |= static_cast<std::uint64_t>(c[static_cast<std::size_t>(i)]) << (21 * i);
  return k;
}

SubspaceId FlagSpace::index_of(const Subspace& s) const {
  auto it = sub_index_.find(s.key());
  if (s.n != n_ || s.dim == 0 || s.dim == n_ || it == sub_index_.end())
    throw Error(ErrorCode::NotFound, "subspace is not a proper nonzero subspace of this space");
  return it->second;
}

int FlagSpace::meet_dim(SubspaceId a, SubspaceId b) const {
  if (!meet_.empty()) return meet_[static_cast<std::size_t>(a) * subspaces_.size() + b];
  return meet_dim_explicit(*field_, n_, subspaces_[a], subspaces_[b]);
}

Flag FlagSpace::flag(ChamberId c) const {
  Flag f;
  for (int i = 0; i < n_ - 1; ++i) f.chain.push_back(subspaces_[flags_[c][static_cast<std::size_t>(i)]]);
  return f;
}

ChamberId FlagSpace::index_of_chain(const std::array<SubspaceId, kMaxDim - 1>& chain) const {
  auto it = flag_index_.find(chain_key(chain));
  if (it == flag_index_.end()) throw Error(ErrorCode::NotFound, "not a maximal flag");
  return it->second;
}

ChamberId FlagSpace::index_of(const Flag& f) const {
  if (static_cast<int>(f.chain.size()) != n_ - 1) throw Error(ErrorCode::MixedAmbient, "flag length differs");
  std::array<SubspaceId, kMaxDim - 1> c{};
  for (int i = 0; i < n_ - 1; ++i) c[static_cast<std::size_t>(i)] = index_of(f.chain[static_cast<std::size_t>(i)]);
  return index_of_chain(c);
}

ElemId FlagSpace::relative_position(ChamberId a, ChamberId b) const {
  const auto& A = flags_[a];
  const auto& B = flags_[b];
  const int n = n_;
  auto d = [&](int i, int j) {
    if (i == 0 || j == 0) return 0;
    if (i == n) return j;
    if (j == n) return i;
    return meet_dim(A[static_cast<std::size_t>(i - 1)], B[static_cast<std::size_t>(j - 1)]);
  };
  return perm_element(perm_from_dims(n, d));
}

ElemId FlagSpace::perm_element(const std::vector<int>& perm) const {
  std::size_t code = 0;
  for (int k = n_ - 1; k >= 0; --k) {
    const int v = perm[static_cast<std::size_t>(k)];
    if (v < 0 || v >= n_) throw Error(ErrorCode::MismatchBug, "not a permutation");
    code = code * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v);
  }
  const ElemId w = perm_to_elem_[code];
  if (w == UINT32_MAX) throw Error(ErrorCode::MismatchBug, "not a permutation");
  return w;
}

std::vector<int> FlagSpace::element_perm(ElemId w) const { return elem_to_perm_[w]; }

ChamberId FlagSpace::standard_flag() const {
  std::vector<int> id(static_cast<std::size_t>(n_));
  std::iota(id.begin(), id.end(), 0);
  return coordinate_flag(id);
}

ChamberId FlagSpace::coordinate_flag(const std::vector<int>& perm) const {
  std::array<SubspaceId, kMaxDim - 1> c{};
  std::vector<Vec> v;
  for (int i = 0; i < n_ - 1; ++i) {
    v.push_back(unit(perm[static_cast<std::size_t>(i)]));
    c[static_cast<std::size_t>(i)] = index_of(span(*field_, n_, v));
  }
  return index_of_chain(c);
}

std::shared_ptr<const twinbuild::Building> FlagSpace::building() const {
  return std::make_shared<twinbuild::Building>(weyl_, flags_.size(),
                                               [this](ChamberId a, ChamberId b) { return relative_position(a, b); });
}

SubspaceId FlagSpace::perp(SubspaceId s, const Form& f) const {
  return index_of(flagmodel::perp(*field_, f, subspaces_[s]));
}

std::vector<ChamberId> FlagSpace::orthogonal_table(const Form& f) const {
  std::vector<SubspaceId> sp(subspaces_.size());
  for (SubspaceId s = 0; s < sp.size(); ++s) sp[s] = perp(s, f);
  std::vector<ChamberId> out(flags_.size());
  for (ChamberId c = 0; c < flags_.size(); ++c) {
    std::array<SubspaceId, kMaxDim - 1> o{};
    for (int i = 0; i < n_ - 1; ++i) o[static_cast<std::size_t>(i)] = sp[flags_[c][static_cast<std::size_t>(n_ - 2 - i)]];
    out[c] = index_of_chain(o);
  }
  return out;
}

SubspaceId FlagSpace::act_subspace(Mat g, SubspaceId s) const { return index_of(map_subspace(*field_, g, subspaces_[s])); }

ChamberId FlagSpace::act(Mat g, ChamberId c) const {
  std::array<SubspaceId, kMaxDim - 1> o{};
  for (int i = 0; i < n_ - 1; ++i) o[static_cast<std::size_t>(i)] = act_subspace(g, flags_[c][static_cast<std::size_t>(i)]);
  return index_of_chain(o);
}

std::vector<SubspaceId> FlagSpace::subspace_permutation(Mat g) const {
  std::vector<SubspaceId> out(subspaces_.size());
  for (SubspaceId s = 0; s < out.size(); ++s) out[s] = act_subspace(g, s);
  return out;
}

std::vector<ChamberId> FlagSpace::flag_permutation_from(const std::vector<SubspaceId>& sp) const {
  std::vector<ChamberId> out(flags_.size());
  for (ChamberId c = 0; c < flags_.size(); ++c) {
    std::array<SubspaceId, kMaxDim - 1> o{};
    for (int i = 0; i < n_ - 1; ++i) o[static_cast<std::size_t>(i)] = sp[flags_[c][static_cast<std::size_t>(i)]];
    out[c] = index_of_chain(o);
  }
  return out;
}

std::vector<ChamberId> FlagSpace::flag_permutation(Mat g) const { return flag_permutation_from(subspace_permutation(g)); }

std::vector<ChamberId> FlagSpace::apartment_from_frame(const std::vector<SubspaceId>& points) const {
  if (static_cast<int>(points.size()) != n_) throw Error(ErrorCode::DependentFrame, "a frame has n points");
  std::vector<Vec> vs;
  for (SubspaceId p : points) {
    if (subspaces_.at(p).dim != 1) throw Error(ErrorCode::DependentFrame, "frame members must be points");
    vs.push_back(point_vector(p));
  }
  if (rank_of(*field_, n_, vs) != n_) throw Error(ErrorCode::DependentFrame, "frame points are dependent");
  std::vector<int> perm(static_cast<std::size_t>(n_));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<ChamberId> out;
  do {
    std::array<SubspaceId, kMaxDim - 1> c{};
    std::vector<Vec> v;
    for (int i = 0; i < n_ - 1; ++i) {
      v.push_back(vs[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
      c[static_cast<std::size_t>(i)] = index_of(span(*field_, n_, v));
    }
    out.push_back(index_of_chain(c));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<std::vector<SubspaceId>> FlagSpace::frames() const {
  std::vector<std::vector<SubspaceId>> out;
  const auto& pts = of_dim(1);
  std::vector<SubspaceId> cur;
  std::vector<Vec> vecs;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (static_cast<int>(cur.size()) == n_) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < pts.size(); ++i) {
      vecs.push_back(point_vector(pts[i]));
      if (rank_of(*field_, n_, vecs) == static_cast<int>(vecs.size())) {
        cur.push_back(pts[i]);
        self(self, i + 1);
        cur.pop_back();
      }
      vecs.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

void FlagSpace::export_flags(std::ostream& out) const {
  for (ChamberId c = 0; c < flags_.size(); ++c) {
    for (int i = 0; i < n_ - 1; ++i) {
      if (i) out << " |";
      const auto& s = subspaces_[flags_[c][static_cast<std::size_t>(i)]];
      for (int r = 0; r < s.dim; ++r)
        for (int j = 0; j < n_; ++j) out << ' ' << static_cast<int>(vget(s.rows[static_cast<std::size_t>(r)], j));
    }
    out << '\n';
  }
}

std::vector<Flag> enumerate_flags(int n, const Field& F, std::size_t flag_limit) {
  FlagSpace fs(std::make_shared<Field>(F), n, flag_limit);
  std::vector<Flag> out;
  for (ChamberId c = 0; c < fs.size(); ++c) out.push_back(fs.flag(c));
  return out;
}

// --- groups ------------------------------------------------------------------------------------

std::size_t gl_order(int n, int q) {
  std::size_t o = 1;
  const std::size_t qn = ipow(static_cast<std::size_t>(q), n);
  for (int i = 0; i < n; ++i) o *= qn - ipow(static_cast<std::size_t>(q), i);
  return o;
}

std::vector<Mat> form_group(const Field& F, int n, const Form& form, std::size_t limit) {
  const std::size_t nv = ipow(static_cast<std::size_t>(F.q()), n);
  std::vector<Vec> all;
  for (std::size_t code = 1; code < nv; ++code) {
    Vec v = 0;
    std::size_t c = code;
    for (int i = 0; i < n; ++i) {
      v = vset(v, i, static_cast<Elt>(c % static_cast<std::size_t>(F.q())));
      c /= static_cast<std::size_t>(F.q());
    }
    all.push_back(v);
  }
  std::vector<Mat> out;
  std::vector<Vec> cols;
  auto rec = [&](auto&& self, int j) -> void {
    if (j == n) {
      if (out.size() >= limit) throw Error(ErrorCode::TooLarge, "form group exceeds the limit " + std::to_string(limit));
      out.push_back(mat_from_columns(n, cols));
      return;
    }
    for (Vec v : all) {
      if (pair(F, n, form, v, v) != mget(form.gram, j, j)) continue;
      bool ok = true;
      for (int i = 0; i < j && ok; ++i)
        ok = pair(F, n, form, cols[static_cast<std::size_t>(i)], v) == mget(form.gram, i, j) &&
             pair(F, n, form, v, cols[static_cast<std::size_t>(i)]) == mget(form.gram, j, i);
      if (!ok) continue;
      cols.push_back(v);
      self(self, j + 1);
      cols.pop_back();
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Mat> group_elements(const Field& F, int n, GroupKind kind, const Form* form, std::size_t limit) {
  if (n < 1 || n > kMaxDim) throw Error(ErrorCode::Usage, "matrix size must be in 1..4");
  if (kind != GroupKind::GL) {
    if (form == nullptr) throw Error(ErrorCode::Usage, "form groups need a form");
    if ((kind == GroupKind::Unitary) != (form->kind == FormKind::Hermitian))
      throw Error(ErrorCode::Usage, "group kind does not match the form kind");
    return form_group(F, n, *form, limit);
  }
  const auto order = gl_order(n, F.q());
  if (order > limit)
    throw Error(ErrorCode::TooLarge, "|GL_" + std::to_string(n) + "(" + std::to_string(F.q()) + ")| = " +
                                         std::to_string(order) + " exceeds the limit " + std::to_string(limit));
  const std::size_t nv = ipow(static_cast<std::size_t>(F.q()), n);
  std::vector<Vec> all;
  for (std::size_t code = 1; code < nv; ++code) {
    Vec v = 0;
    std::size_t c = code;
    for (int i = 0; i < n; ++i) {
      v = vset(v, i, static_cast<Elt>(c % static_cast<std::size_t>(F.q())));
      c /= static_cast<std::size_t>(F.q());
    }
    all.push_back(v);
  }
  std::vector<Mat> out;
  out.reserve(order);
  std::vector<Vec> cols;
  auto rec = [&](auto&& self, int j) -> void {
    if (j == n) {
      out.push_back(mat_from_columns(n, cols));
      return;
    }
    for (Vec v : all) {
      cols.push_back(v);
      if (rank_of(F, n, cols) == j + 1) self(self, j + 1);
      cols.pop_back();
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace twinflip::flagmodel
