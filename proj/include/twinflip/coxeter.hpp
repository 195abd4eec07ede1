#pragma once

// Exact arithmetic in finite Coxeter groups.
//
// A CoxeterSystem enumerates its whole group once, at construction, and
// assigns every element a dense id in shortlex order (id 0 is the identity).
// After that, multiplication, inversion, lengths and diagram automorphisms
// are table lookups.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "twinflip/report.hpp"

namespace twinflip::coxeter {

using ElemId = std::uint32_t;
using Word = std::vector<std::uint8_t>;
/// Bitmask over generator indices.
using TypeMask = std::uint32_t;

inline constexpr int kInfinity = 0;
inline constexpr std::size_t kDefaultOrderBound = 40320;

/// Symmetric table of orders m(s,t). m(s,s) = 1 and an entry of 0 encodes ∞.
class CoxeterMatrix {
 public:
  CoxeterMatrix() = default;
  CoxeterMatrix(int rank, std::vector<int> entries);

  int rank() const { return rank_; }
  int at(int s, int t) const { return entries_[static_cast<std::size_t>(s * rank_ + t)]; }
  const std::vector<int>& entries() const { return entries_; }

  /// Throws MalformedMatrix if the table is not a Coxeter matrix.
  void validate() const;

  bool operator==(const CoxeterMatrix&) const = default;

 private:
  int rank_ = 0;
  std::vector<int> entries_;
};

/// Parses "A3", "B2", "D4", "G2", "I2(5)", "A1xA1" and similar.
CoxeterMatrix standard_matrix(const std::string& type);

/// Plain text: rank on the first line, then rank rows of integers; ∞ is 0.
CoxeterMatrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const CoxeterMatrix& m);

class CoxeterSystem;

/// A group element bound to the system that owns it.
class CoxeterElement {
 public:
  CoxeterElement() = default;
  CoxeterElement(const CoxeterSystem* owner, ElemId id) : owner_(owner), id_(id) {}

  const CoxeterSystem* owner() const { return owner_; }
  ElemId id() const { return id_; }
  int length() const;
  const Word& word() const;
  CoxeterElement inverse() const;
  std::string to_string() const;

  bool operator==(const CoxeterElement& o) const { return owner_ == o.owner_ && id_ == o.id_; }
  bool operator<(const CoxeterElement& o) const { return id_ < o.id_; }

 private:
  const CoxeterSystem* owner_ = nullptr;
  ElemId id_ = 0;
};

/// Permutation of the generators of order at most two preserving the matrix.
class DiagramInvolution {
 public:
  DiagramInvolution() = default;
  explicit DiagramInvolution(std::vector<int> perm) : perm_(std::move(perm)) {}

  static DiagramInvolution identity(int rank);
  /// "id" or digit pairs such as "13" (s1 <-> s3) or "13,24"; 1-based.
  static DiagramInvolution parse(const std::string& spec, int rank);

  int operator()(int s) const { return perm_[static_cast<std::size_t>(s)]; }
  const std::vector<int>& perm() const { return perm_; }
  bool is_identity() const;
  TypeMask apply(TypeMask mask) const;
  std::string to_string() const;

  /// Throws InvalidTwist unless the permutation is a valid diagram involution of m.
  void validate(const CoxeterMatrix& m) const;

  bool operator==(const DiagramInvolution&) const = default;

 private:
  std::vector<int> perm_;
};

struct TwistedInvolution {
  CoxeterElement element;
  DiagramInvolution twist;
};

/// w = s_1 ... s_h * w_I * θ(s_h) ... θ(s_1) with l(w) = l(w_I) + 2h.
struct TwistedDecomposition {
  Word prefix;
  TypeMask subset = 0;
};

class CoxeterSystem {
 public:
  /// Enumerates W. Throws MalformedMatrix or NonSphericalOrTooLarge.
  static std::shared_ptr<const CoxeterSystem> build(const CoxeterMatrix& matrix,
                                                    std::size_t order_bound = kDefaultOrderBound,
                                                    std::vector<std::string> labels = {});

  int rank() const { return matrix_.rank(); }
  std::size_t order() const { return words_.size(); }
  const CoxeterMatrix& matrix() const { return matrix_; }
  const std::vector<std::string>& labels() const { return labels_; }
  TypeMask all_types() const { return rank() == 32 ? ~TypeMask{0} : ((TypeMask{1} << rank()) - 1); }

  CoxeterElement element(ElemId id) const { return CoxeterElement(this, id); }
  CoxeterElement identity() const { return element(0); }
  CoxeterElement generator(int s) const { return element(generator_ids_[static_cast<std::size_t>(s)]); }

  // Raw id interface used by the hot loops of the building layers.
  ElemId gen_id(int s) const { return generator_ids_[static_cast<std::size_t>(s)]; }
  int length(ElemId w) const { return lengths_[w]; }
  const Word& word(ElemId w) const { return words_[w]; }
  ElemId right_mul(ElemId w, int s) const { return right_[w * static_cast<std::size_t>(rank()) + static_cast<std::size_t>(s)]; }
  ElemId left_mul(int s, ElemId w) const { return left_[w * static_cast<std::size_t>(rank()) + static_cast<std::size_t>(s)]; }
  ElemId mul(ElemId u, ElemId v) const;
  ElemId inverse(ElemId w) const { return inverse_[w]; }
  /// Product of an arbitrary (not necessarily reduced) word.
  ElemId from_word(const Word& w) const;
  ElemId longest() const { return longest_; }
  ElemId longest_in(TypeMask subset) const;
  /// Generators occurring in any (equivalently, every) reduced word of w.
  TypeMask support(ElemId w) const { return support_[w]; }
  TypeMask left_descents(ElemId w) const;
  TypeMask right_descents(ElemId w) const;
  bool in_parabolic(ElemId w, TypeMask subset) const { return (support_[w] & ~subset) == 0; }
  bool bruhat_leq(ElemId u, ElemId w) const;
  /// θ applied to an element.
  ElemId twist(const DiagramInvolution& theta, ElemId w) const;
  /// θ applied to every element, indexed by id.
  std::vector<ElemId> twist_table(const DiagramInvolution& theta) const;

  std::string format(ElemId w) const;
  std::string format_mask(TypeMask mask) const;

 private:
  CoxeterSystem() = default;

  CoxeterMatrix matrix_;
  std::vector<std::string> labels_;
  std::vector<Word> words_;
  std::vector<std::uint16_t> lengths_;
  std::vector<TypeMask> support_;
  std::vector<ElemId> right_;
  std::vector<ElemId> left_;
  std::vector<ElemId> inverse_;
  std::vector<ElemId> generator_ids_;
  std::vector<ElemId> table_;  // full product table when |W| is small
  ElemId longest_ = 0;
};

using SystemPtr = std::shared_ptr<const CoxeterSystem>;

// Free-function surface.
SystemPtr build_system(const CoxeterMatrix& matrix, std::size_t order_bound = kDefaultOrderBound);
CoxeterElement multiply(const CoxeterElement& u, const CoxeterElement& v);
CoxeterElement longest_element(const CoxeterSystem& system, TypeMask subset);
bool bruhat_leq(const CoxeterElement& u, const CoxeterElement& w);
std::vector<TwistedInvolution> twisted_involutions(const CoxeterSystem& system,
                                                   const DiagramInvolution& theta);
bool is_twisted_involution(const CoxeterSystem& system, const DiagramInvolution& theta, ElemId w);
/// Lowest-index descent, stopping once w = w_I for I its left descent set.
/// Throws NotTwisted.
TwistedDecomposition twisted_decomposition(const TwistedInvolution& w);
/// Rebuilds the element from its decomposition.
ElemId reconstruct(const CoxeterSystem& system, const DiagramInvolution& theta,
                   const TwistedDecomposition& d);
/// For every twisted involution: l(sw) = l(w theta(s)), s w theta(s) is twisted
/// and equals w when lengths agree, and the decomposition rebuilds w. The
/// enumeration is compared with a filter over all of W.
CheckReport verify_twisted_involutions(const CoxeterSystem& system, const DiagramInvolution& theta);
/// All diagram involutions (including the identity) of the system.
std::vector<DiagramInvolution> diagram_involutions(const CoxeterMatrix& matrix);

inline TypeMask mask_of(std::initializer_list<int> gens) {
  TypeMask m = 0;
  for (int g : gens) m |= TypeMask{1} << g;
  return m;
}

inline int popcount(TypeMask m) { return __builtin_popcount(m); }

}  // namespace twinflip::coxeter
