#pragma once

// theta-stable twin apartments, orbits of the fixed group G_theta and the
// double coset decompositions of G_theta \ G / B for flips of form type.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "twinflip/flips.hpp"

namespace twinflip::cosets {

using flagmodel::Mat;
using flagmodel::SubspaceId;
using flips::ChamberId;
using flips::ElemId;
using flips::FormFlip;
using twinbuild::TwinApartment;

using Frame = std::vector<SubspaceId>;  // sorted points
using Perm = std::vector<int>;

/// The flip on the group level and its fixed points.
class FlipGroup {
 public:
  /// G_theta is filtered from GL when |GL| <= limit and enumerated from the
  /// form otherwise.
  explicit FlipGroup(FormFlip model, std::size_t limit = flagmodel::kGroupLimit);

  const FormFlip& model() const { return m_; }
  const flips::QuasiFlip& flip() const { return *m_.flip; }
  const flagmodel::FlagSpace& space() const { return *m_.space; }
  const flagmodel::Field& field() const { return *m_.field; }
  int n() const { return m_.space->n(); }

  /// G^-1 sigma(g)^-T G.
  Mat theta(Mat g) const;
  /// theta(g^-1) g.
  Mat tau(Mat g) const;

  const std::vector<Mat>& fixed() const { return fixed_; }
  const std::vector<Mat>& generators() const { return gens_; }
  /// Chamber permutation of each generator.
  const std::vector<std::vector<ChamberId>>& generator_actions() const { return gen_chambers_; }
  const std::vector<std::vector<SubspaceId>>& generator_subspace_actions() const { return gen_subspaces_; }
  /// G_theta-orbit label of each positive chamber, numbered by first occurrence.
  const std::vector<std::uint32_t>& chamber_orbits() const { return orbits_; }
  std::size_t orbit_count() const { return orbit_count_; }

 private:
  FormFlip m_;
  Mat gram_inv_ = 0;
  std::vector<Mat> fixed_, gens_;
  std::vector<std::vector<ChamberId>> gen_chambers_;
  std::vector<std::vector<SubspaceId>> gen_subspaces_;
  std::vector<std::uint32_t> orbits_;
  std::size_t orbit_count_ = 0;
};

/// G_theta by the route FlipGroup uses. Throws TooLarge.
std::vector<Mat> fixed_group(const FormFlip& m, std::size_t limit = flagmodel::kGroupLimit);
/// theta on the group is an involutive automorphism compatible with the
/// chamber flip, and the fixed group equals the form's isometry group.
CheckReport check_group_flip(const FlipGroup& g, std::uint64_t seed = 1, int samples = 200);

/// Semi-linear hermitian flips, or root groups of odd order.
bool locally_fixes_opposite(const FormFlip& m);

Frame frame_of(const FormFlip& m, const TwinApartment& a);
TwinApartment apartment_of_frame(const FormFlip& m, const Frame& f);
bool is_theta_stable(const flips::QuasiFlip& flip, const TwinApartment& a);
/// Frame test: perp maps the points of the frame onto its coordinate hyperplanes.
bool is_theta_stable(const FormFlip& m, const Frame& f);

/// Descend to d with codistance w_I, pick d' opposite d in R_I(d) fixed by
/// proj o theta and span d, theta(d'). With the gate overridden a failing
/// recipe falls back to searching apartments through c.
/// Throws HypothesisNotMet, NotFound (override only) or MismatchBug.
TwinApartment theta_stable_apartment_containing(const FormFlip& m, ChamberId c, bool override_hypotheses = false);

struct StableApartmentClass {
  Frame representative;
  TwinApartment apartment;
  std::vector<std::size_t> members;  // indices into StableApartments::frames
  /// Induced permutations on the positions of apartment.plus.
  std::vector<Perm> weyl_G, weyl_G_theta;
};

struct StableApartments {
  std::vector<Frame> frames;  // all theta-stable frames, sorted
  std::vector<std::uint32_t> class_of;
  std::vector<StableApartmentClass> classes;
};

/// seed 0 takes the lowest member of each class as representative, any other
/// seed a pseudo-random member.
StableApartments stable_apartment_classes(const FlipGroup& g, std::uint64_t seed = 0);
/// Every stable apartment meeting a class representative is its image under
/// an element of G_theta fixing the intersection; every chamber lies in one.
CheckReport check_stable_apartments(const FlipGroup& g, const StableApartments& s);

struct DoubleCosetReport {
  std::vector<ChamberId> representatives;  // lowest chamber per orbit
  std::vector<std::size_t> sizes;
  std::vector<ElemId> fiber;
  std::vector<std::size_t> class_of_orbit;
  std::size_t left = 0, right = 0;
  /// (class, orbit of W_{G_theta} on the class apartment, chamber orbit).
  std::vector<std::array<std::size_t, 3>> bijection;
  CheckReport report;

  nlohmann::json to_json(const coxeter::CoxeterSystem& W) const;
  std::string to_text(const coxeter::CoxeterSystem& W) const;
};

/// Throws MismatchBug when the two sides differ.
DoubleCosetReport double_coset_decomposition(const FlipGroup& g, std::uint64_t seed = 0);

/// Orbits correspond to codistances and every involution of W occurs.
CheckReport codistance_fiber_check(const FlipGroup& g);

/// G_theta-orbits on the chambers of codistance w against twisted orbits of
/// Fix_G(Sigma) on tau(G) within it. Throws TooLarge or NotFound.
CheckReport twisted_orbit_check(const FlipGroup& g, ElemId w, std::size_t limit = 1000000);

/// G/B against {g Fix(Sigma) : g^-1 theta(g) in Stab(Sigma)} for Sigma through
/// the standard flag, plus G = G_theta V B. Throws TooLarge.
CheckReport springer_parametrization_check(const FlipGroup& g, std::size_t limit = 1000000,
                                           std::size_t* v_size = nullptr);

}  // namespace twinflip::cosets
