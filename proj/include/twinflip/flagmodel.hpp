#pragma once

// Buildings of type A_{n-1} realized by maximal flags of GF(q)^n, n <= 4,
// over GF(p) and GF(p^2) with q <= 16.
//
// Field elements are integers 0..q-1: a + b*p stands for a + b*x in
// GF(p)[x]/(f). Vectors pack four bits per coordinate; matrices pack the
// entry (i, j) at bit offset 4 * (4i + j).

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "twinflip/coxeter.hpp"
#include "twinflip/report.hpp"
#include "twinflip/twinbuild.hpp"

namespace twinflip::flagmodel {

using Elt = std::uint8_t;
using Vec = std::uint16_t;
using Mat = std::uint64_t;
using SubspaceId = std::uint32_t;
using twinbuild::ChamberId;
using coxeter::ElemId;

inline constexpr int kMaxDim = 4;
inline constexpr std::size_t kFlagLimit = 1000000;
inline constexpr std::size_t kGroupLimit = 10000000;

class Field {
 public:
  /// GF(q) for q = p or p^2, q <= 16. With frobenius, sigma is x -> x^p on
  /// GF(p^2); otherwise sigma is the identity.
  explicit Field(int q, bool frobenius = true);

  int q() const { return q_; }
  int p() const { return p_; }
  int degree() const { return k_; }
  bool sigma_trivial() const { return !frob_; }
  /// (c1, c0) of the modulus x^2 + c1 x + c0, or (0, 0) for prime fields.
  std::pair<int, int> modulus() const { return {c1_, c0_}; }
  std::string name() const;

  Elt add(Elt a, Elt b) const { return add_[a * 16u + b]; }
  Elt sub(Elt a, Elt b) const { return add_[a * 16u + neg_[b]]; }
  Elt neg(Elt a) const { return neg_[a]; }
  Elt mul(Elt a, Elt b) const { return mul_[a * 16u + b]; }
  Elt inv(Elt a) const;
  Elt sigma(Elt a) const { return sigma_[a]; }
  Elt pow(Elt a, unsigned e) const;

  /// Exhaustive check of the field axioms and of sigma being an involutive automorphism.
  CheckReport verify() const;

 private:
  int q_, p_, k_, c1_ = 0, c0_ = 0;
  bool frob_;
  std::array<Elt, 256> add_{}, mul_{};
  std::array<Elt, 16> neg_{}, inv_{}, sigma_{};
};

inline Elt vget(Vec v, int i) { return static_cast<Elt>(v >> (4 * i) & 15u); }
inline Vec vset(Vec v, int i, Elt x) {
  return static_cast<Vec>((v & ~(Vec{15} << (4 * i))) | static_cast<Vec>(x) << (4 * i));
}
inline Elt mget(Mat m, int i, int j) { return static_cast<Elt>(m >> (4 * (4 * i + j)) & 15u); }
inline Mat mset(Mat m, int i, int j, Elt x) {
  const int o = 4 * (4 * i + j);
  return (m & ~(Mat{15} << o)) | static_cast<Mat>(x) << o;
}

// Linear algebra on packed data of dimension n.
Vec vadd(const Field& F, int n, Vec a, Vec b);
Vec vscale(const Field& F, int n, Elt c, Vec a);
Vec vsigma(const Field& F, int n, Vec a);
Mat mat_identity(int n);
Mat mat_mul(const Field& F, int n, Mat a, Mat b);
Mat mat_transpose(int n, Mat a);
Mat mat_sigma(const Field& F, int n, Mat a);
/// Throws ValidationFailed if singular.
Mat mat_inverse(const Field& F, int n, Mat a);
int mat_rank(const Field& F, int n, Mat a);
Vec mat_apply(const Field& F, int n, Mat a, Vec v);
Vec mat_column(int n, Mat a, int j);
Mat mat_from_columns(int n, const std::vector<Vec>& cols);
/// Permutation matrix with P e_k = e_{perm[k]}.
Mat mat_permutation(int n, const std::vector<int>& perm);
std::string mat_string(const Field& F, int n, Mat a);

/// A subspace in reduced row echelon form; equal subspaces have equal bases.
struct Subspace {
  int n = 0;
  int dim = 0;
  std::array<Vec, kMaxDim> rows{};

  std::uint64_t key() const;
  bool operator==(const Subspace& o) const { return n == o.n && dim == o.dim && rows == o.rows; }
};

/// Span of arbitrary vectors, canonicalized.
Subspace span(const Field& F, int n, const std::vector<Vec>& vectors);
int rank_of(const Field& F, int n, const std::vector<Vec>& vectors);
/// Null space of the given linear forms (as row vectors).
Subspace null_space(const Field& F, int n, const std::vector<Vec>& forms);

enum class FormKind { Hermitian, Alternating };

/// (u, v) = sigma(u)^T G v, with sigma the identity for alternating forms.
struct Form {
  FormKind kind = FormKind::Hermitian;
  Mat gram = 0;
};

/// Builds and validates a form; default Gram is I (hermitian) or [[0,I],[-I,0]].
Form make_form(const Field& F, int n, FormKind kind, const Mat* gram = nullptr);
Elt pair(const Field& F, int n, const Form& f, Vec u, Vec v);
Subspace perp(const Field& F, const Form& f, const Subspace& s);
std::string to_string(FormKind k);
FormKind parse_form_kind(const std::string& s);

/// Explicit flag: V_1 < ... < V_{n-1}.
struct Flag {
  std::vector<Subspace> chain;
  bool operator==(const Flag& o) const { return chain == o.chain; }
};

/// Relative position from intersection dimensions (no tables involved).
/// Throws MixedAmbient when the ambient dimensions differ.
ElemId relative_position(const Field& F, const coxeter::CoxeterSystem& W, const Flag& a, const Flag& b);
Flag orthogonal_flag(const Field& F, const Flag& flag, const Form& form);
Flag act(const Field& F, Mat g, const Flag& flag);

std::size_t gaussian_flag_count(int n, int q);

class FlagSpace {
 public:
  FlagSpace(std::shared_ptr<const Field> field, int n, std::size_t flag_limit = kFlagLimit);

  const Field& field() const { return *field_; }
  const std::shared_ptr<const Field>& field_ptr() const { return field_; }
  int n() const { return n_; }
  const coxeter::SystemPtr& weyl_ptr() const { return weyl_; }
  const coxeter::CoxeterSystem& weyl() const { return *weyl_; }

  std::size_t subspace_count() const { return subspaces_.size(); }
  const Subspace& subspace(SubspaceId i) const { return subspaces_[i]; }
  const std::vector<SubspaceId>& of_dim(int d) const { return by_dim_[static_cast<std::size_t>(d)]; }
  /// Throws NotFound for the zero space, the whole space or a foreign subspace.
  SubspaceId index_of(const Subspace& s) const;
  int meet_dim(SubspaceId a, SubspaceId b) const;

  std::size_t size() const { return flags_.size(); }
  const std::array<SubspaceId, kMaxDim - 1>& chain(ChamberId c) const { return flags_[c]; }
  Flag flag(ChamberId c) const;
  ChamberId index_of(const Flag& f) const;
  ChamberId index_of_chain(const std::array<SubspaceId, kMaxDim - 1>& chain) const;

  ElemId relative_position(ChamberId a, ChamberId b) const;
  ElemId perm_element(const std::vector<int>& perm) const;
  std::vector<int> element_perm(ElemId w) const;
  ChamberId standard_flag() const;
  ChamberId coordinate_flag(const std::vector<int>& perm) const;
  std::shared_ptr<const twinbuild::Building> building() const;

  SubspaceId perp(SubspaceId s, const Form& f) const;
  /// orthogonal flag of every chamber
  std::vector<ChamberId> orthogonal_table(const Form& f) const;

  SubspaceId act_subspace(Mat g, SubspaceId s) const;
  ChamberId act(Mat g, ChamberId c) const;
  std::vector<SubspaceId> subspace_permutation(Mat g) const;
  std::vector<ChamberId> flag_permutation(Mat g) const;
  std::vector<ChamberId> flag_permutation_from(const std::vector<SubspaceId>& sub_perm) const;

  /// The n! flags built from the frame, one per ordering (lexicographic
  /// permutation order). Throws DependentFrame.
  std::vector<ChamberId> apartment_from_frame(const std::vector<SubspaceId>& points) const;
  /// All frames as sorted point lists.
  std::vector<std::vector<SubspaceId>> frames() const;
  /// A basis vector of a point.
  Vec point_vector(SubspaceId p) const { return subspaces_[p].rows[0]; }

  void export_flags(std::ostream& out) const;

 private:
  std::uint64_t chain_key(const std::array<SubspaceId, kMaxDim - 1>& c) const;

  std::shared_ptr<const Field> field_;
  int n_;
  coxeter::SystemPtr weyl_;
  std::vector<Subspace> subspaces_;
  std::vector<std::vector<SubspaceId>> by_dim_;
  std::unordered_map<std::uint64_t, SubspaceId> sub_index_;
  std::vector<std::uint8_t> meet_;  // empty when too many subspaces
  std::vector<std::array<SubspaceId, kMaxDim - 1>> flags_;
  std::unordered_map<std::uint64_t, ChamberId> flag_index_;
  std::vector<ElemId> perm_to_elem_;
  std::vector<std::vector<int>> elem_to_perm_;
};

/// Enumerates all flags. Throws TooLarge beyond the guard.
std::vector<Flag> enumerate_flags(int n, const Field& F, std::size_t flag_limit = kFlagLimit);

enum class GroupKind { GL, Unitary, Symplectic };

std::size_t gl_order(int n, int q);
/// Exhaustive matrix list, sorted. Unitary and symplectic groups preserve the
/// form (sigma(g)^T G g = G). Throws TooLarge beyond the guard.
std::vector<Mat> group_elements(const Field& F, int n, GroupKind kind, const Form* form = nullptr,
                                std::size_t limit = kGroupLimit);
/// Group elements preserving the form, by column backtracking (never lists GL).
std::vector<Mat> form_group(const Field& F, int n, const Form& form, std::size_t limit = kGroupLimit);

}  // namespace twinflip::flagmodel
