#pragma once

// Quasi-flips of finite spherical twin buildings: validation, theta-codistance,
// Phan residues, flip-flop systems, descent and homogeneity, plus the
// fixed-point doubling on Moufang sets.

#include <memory>
#include <string>
#include <vector>

#include "twinflip/chambersys.hpp"
#include "twinflip/coxeter.hpp"
#include "twinflip/flagmodel.hpp"
#include "twinflip/report.hpp"
#include "twinflip/twinbuild.hpp"

namespace twinflip::flips {

using chambersys::ChamberId;
using chambersys::Residue;
using coxeter::DiagramInvolution;
using coxeter::ElemId;
using coxeter::TypeMask;
using twinbuild::TwinBuilding;

/// Involution axioms, adjacency, opposition and transport of delta and
/// codistance by the fitted twist. The twist is taken from chamber 0.
CheckReport check_quasi_flip(const TwinBuilding& tb, const std::vector<ChamberId>& perm,
                             DiagramInvolution* twist = nullptr);

class QuasiFlip {
 public:
  /// perm acts on global chamber ids. Throws ValidationFailed with the first
  /// failing check as witness.
  QuasiFlip(std::shared_ptr<const TwinBuilding> tb, std::vector<ChamberId> perm);

  const TwinBuilding& building() const { return *tb_; }
  const std::shared_ptr<const TwinBuilding>& building_ptr() const { return tb_; }
  const coxeter::CoxeterSystem& weyl() const { return tb_->weyl(); }
  std::size_t size() const { return tb_->half_size(); }
  ChamberId operator()(ChamberId x) const { return perm_[x]; }
  const std::vector<ChamberId>& table() const { return perm_; }
  const DiagramInvolution& twist() const { return twist_; }
  bool is_flip() const { return twist_.is_identity(); }
  int twist_gen(int s) const { return twist_(s); }
  ElemId twist_elem(ElemId w) const { return twist_table_[w]; }

  /// delta*(c, theta(c)) for a positive chamber c.
  ElemId codistance(ChamberId c) const { return codist_[c]; }
  int length(ChamberId c) const { return weyl().length(codist_[c]); }
  const std::vector<ElemId>& codistances() const { return codist_; }
  int min_length() const { return min_length_; }

 private:
  std::shared_ptr<const TwinBuilding> tb_;
  std::vector<ChamberId> perm_;
  DiagramInvolution twist_;
  std::vector<ElemId> twist_table_;
  std::vector<ElemId> codist_;
  int min_length_ = 0;
};

/// theta(c) = orthogonal flag of c in the other half.
QuasiFlip build_flip_from_form(const flagmodel::FlagSpace& fs, std::shared_ptr<const TwinBuilding> tb,
                               const flagmodel::Form& form);

/// A flag model, its twin building and the flip of a form, built together.
struct FormFlip {
  std::shared_ptr<const flagmodel::Field> field;
  std::shared_ptr<const flagmodel::FlagSpace> space;
  std::shared_ptr<const TwinBuilding> twin;
  flagmodel::Form form;
  std::shared_ptr<const QuasiFlip> flip;
};

/// Hermitian forms use GF(q) with Frobenius, alternating forms a trivial sigma.
FormFlip make_form_flip(int n, int q, flagmodel::FormKind kind, const flagmodel::Mat* gram = nullptr,
                        std::size_t flag_limit = flagmodel::kFlagLimit);

struct ThetaCodistanceTable {
  std::vector<ElemId> value;
  std::vector<int> length;
  /// Realized values, sorted by id.
  std::vector<ElemId> realized;
};

ThetaCodistanceTable theta_codistance(const QuasiFlip& flip);
/// Every value is a twisted involution and lies in the enumerated set.
CheckReport check_theta_codistance(const QuasiFlip& flip);

/// proj_P(theta) = {c in P : proj_P(theta(c)) = c} for the s-panel of c.
std::vector<ChamberId> panel_fixed_set(const QuasiFlip& flip, ChamberId c, int s);

struct Classification {
  bool proper = false;
  bool strong = false;
  bool flip = false;
  std::string strong_witness;
};

Classification classify(const QuasiFlip& flip);

/// The three cases of the panel lemma for every positive chamber and type,
/// plus equal numerical codistance on adjacent chambers forcing equality.
CheckReport verify_panel_trichotomy(const QuasiFlip& flip);

/// Positive J-residues R with R opposite theta(R).
struct PhanResidue {
  TypeMask type = 0;
  std::vector<ChamberId> members;
};

bool is_phan(const QuasiFlip& flip, const std::vector<ChamberId>& R);
std::vector<PhanResidue> phan_residues(const QuasiFlip& flip, TypeMask J);
std::vector<PhanResidue> minimal_phan_residues(const QuasiFlip& flip);
/// Sphericity, constant codistance w_I on minimal ones, the W_I containment,
/// closure under intersection and the upward closure from codistances in W_I.
CheckReport check_phan_residues(const QuasiFlip& flip);

struct FlipFlop {
  int min_length = 0;
  std::vector<ChamberId> members;  // sorted
  chambersys::ChamberSystem system;
};

/// Chambers of R (default: the positive half) with minimal numerical codistance.
FlipFlop flip_flop_system(const QuasiFlip& flip, const std::vector<ChamberId>& R = {});

/// Per chamber of R: the next chamber of a strictly descending gallery into
/// R^theta (itself inside R^theta), or -1 when none exists. Ties go to the
/// lowest id.
std::vector<long> descent_steps(const QuasiFlip& flip, const Residue& R);
bool admits_direct_descent(const QuasiFlip& flip, const Residue& R, std::string* witness = nullptr);
/// Strictly descending gallery from c into R^theta. Throws NotFound.
std::vector<ChamberId> descent_gallery(const QuasiFlip& flip, const Residue& R, ChamberId c);

struct Homogeneity {
  bool homogeneous = false;
  TypeMask K = 0;
  std::string witness;  // two minimal Phan residues of different types
};

Homogeneity homogeneity_type(const QuasiFlip& flip);

/// Gallery in R from c0 to c2 staying strictly below c1 except at c2.
/// Throws NoBypass if the hypotheses fail.
std::vector<ChamberId> bypass_gallery(const QuasiFlip& flip, const Residue& R, ChamberId c0, ChamberId c1,
                                      ChamberId c2);

/// Root groups must have odd order at least five unless overridden.
struct GeometricityOptions {
  int root_group_order = 0;  // 0: unknown, treated as failing the gate
  bool override_hypotheses = false;
};

struct GeometricityResult {
  CheckReport report;
  Homogeneity homogeneity;
  std::size_t flip_flop_size = 0;
  int min_length = 0;
  bool overridden = false;
};

/// Throws HypothesisNotMet when the gate fails and is not overridden.
GeometricityResult geometricity_report(const QuasiFlip& flip, const GeometricityOptions& opt);

/// For every positive d and every realized ascent, the chamber c of the
/// descent lemma exists, is unique and lies with theta(c) in the hull of d and theta(d).
CheckReport verify_pretty_cool_descent(const QuasiFlip& flip);

/// Moufang set on the points of PG(1, q): U_x are the unipotent elations of
/// PGL_2 fixing x, stored as point permutations.
struct MoufangSet {
  std::shared_ptr<const flagmodel::Field> field;
  std::vector<flagmodel::SubspaceId> points;  // ids in the n = 2 flag space
  std::vector<std::vector<std::vector<int>>> root_groups;
};

MoufangSet projective_line(const flagmodel::FlagSpace& line);
/// U_x fixes x, is sharply transitive on the rest, and the family is permuted by conjugation.
CheckReport check_moufang_set(const MoufangSet& M);
/// The involution x -> x^perp of the line.
std::vector<int> form_involution(const flagmodel::FlagSpace& line, const flagmodel::Form& form);
/// phi must be an involution permuting the root groups by conjugation.
CheckReport check_moufang_automorphism(const MoufangSet& M, const std::vector<int>& phi);
/// h.a with g in U_inf, g.a = phi(a), h^2 = g. Throws NotDivisible for even
/// root groups and HypothesisNotMet when phi moves inf or a = inf.
int moufang_second_fixed_point(const MoufangSet& M, const std::vector<int>& phi, int inf, int a);

}  // namespace twinflip::flips
