#pragma once

// Axiom checkers for root group data and (twin) BN-pairs of finite matrix
// groups of type A_{n-1}. Everything is decided set-theoretically on
// enumerated element lists.

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "twinflip/coxeter.hpp"
#include "twinflip/flagmodel.hpp"
#include "twinflip/report.hpp"

namespace twinflip::rgd {

using flagmodel::Field;
using flagmodel::Mat;

class MatrixGroup {
 public:
  /// elements need not be sorted; duplicates are removed.
  MatrixGroup(std::shared_ptr<const Field> field, int n, std::vector<Mat> elements);

  const Field& field() const { return *field_; }
  const std::shared_ptr<const Field>& field_ptr() const { return field_; }
  int n() const { return n_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<Mat>& elements() const { return elements_; }
  /// -1 when g is not an element.
  long index(Mat g) const;
  bool contains(Mat g) const { return index(g) >= 0; }
  Mat mul(Mat a, Mat b) const { return flagmodel::mat_mul(*field_, n_, a, b); }
  Mat inv(Mat a) const { return flagmodel::mat_inverse(*field_, n_, a); }

 private:
  std::shared_ptr<const Field> field_;
  int n_;
  std::vector<Mat> elements_;
  std::unordered_map<Mat, std::uint32_t> index_;
};

using GroupPtr = std::shared_ptr<const MatrixGroup>;

/// Subgroup generated by gens, sorted.
std::vector<Mat> generated_subgroup(const Field& F, int n, const std::vector<Mat>& gens);
/// A short generating list of the subgroup formed by elements (greedy).
std::vector<Mat> generating_set(const Field& F, int n, const std::vector<Mat>& elements);

/// alpha_{i,j}, 0-based, i != j.
struct Root {
  int i = 0, j = 0;
  bool positive() const { return i < j; }
  bool operator==(const Root& o) const { return i == o.i && j == o.j; }
};

struct RGDData {
  GroupPtr group;
  std::vector<Root> roots;
  std::vector<std::vector<Mat>> root_groups;  // parallel to roots
  std::vector<Mat> torus;

  int root_index(int i, int j) const;
};

/// GL_n(F) with U_{i,j} = {1 + x e_ij} and the diagonal torus.
RGDData standard_rgd(std::shared_ptr<const Field> field, int n, std::size_t limit = flagmodel::kGroupLimit);

/// RGD0-RGD5. The interval ]a,b[ of a prenilpotent pair (b != -a) is the set of
/// roots p*a + q*b with p, q positive integers.
CheckReport check_rgd(const RGDData& data);

struct BNData {
  GroupPtr group;
  std::vector<Mat> B, N;
  std::vector<Mat> simple;  // representatives in N of s_1..s_{n-1}
  coxeter::SystemPtr weyl;
};

struct TwinBNData {
  GroupPtr group;
  std::vector<Mat> plus, minus, N;
  std::vector<Mat> simple;
  coxeter::SystemPtr weyl;

  BNData bn(int sign) const { return {group, sign > 0 ? plus : minus, N, simple, weyl}; }
};

/// Upper/lower triangular Borels, monomial N, permutation matrices for S.
TwinBNData standard_twin_bn(std::shared_ptr<const Field> field, int n, std::size_t limit = flagmodel::kGroupLimit);
TwinBNData standard_twin_bn(GroupPtr group);

/// Representative of w in N as the product of the simple representatives.
Mat weyl_rep(const BNData& bn, coxeter::ElemId w);

/// Double cosets L rep[k] R, found by closure from each representative.
struct CosetPartition {
  std::vector<long> label;  // per element of G: first k containing it, or -1
  std::vector<std::size_t> sizes;
  bool disjoint = true;
  std::string overlap;
  bool covers() const;
};
CosetPartition double_cosets(const MatrixGroup& G, const std::vector<Mat>& L, const std::vector<Mat>& R,
                             const std::vector<Mat>& reps);

/// Generation, T normal in N, N/T = W, BN1, BN2 and the Bruhat partition
/// with cell sizes |B| q^l(w).
CheckReport check_bn(const BNData& bn);
/// Both BN-pairs, TBN1, TBN2, saturation and the Birkhoff partitions.
CheckReport check_twin_bn(const TwinBNData& tbn);

/// w with g in B w B (B upper triangular), via delta(E, gE).
coxeter::ElemId bruhat_cell(const flagmodel::FlagSpace& fs, Mat g);
/// w with g in B+ w B-, via delta(E, g n0 E) = w w0.
coxeter::ElemId birkhoff_cell(const flagmodel::FlagSpace& fs, Mat g);

}  // namespace twinflip::rgd
