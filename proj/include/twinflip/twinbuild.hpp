#pragma once

// W-metric buildings and spherical twin buildings on finite chamber sets.
//
// A TwinBuilding numbers its chambers globally: 0..N-1 form the positive half
// and N..2N-1 the negative half, with c and c + N the two copies of one
// chamber of the underlying spherical building.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "twinflip/chambersys.hpp"
#include "twinflip/coxeter.hpp"
#include "twinflip/report.hpp"

namespace twinflip::twinbuild {

using chambersys::ChamberId;
using chambersys::Residue;
using chambersys::TypeSet;
using coxeter::ElemId;
using coxeter::SystemPtr;

inline constexpr std::size_t kTableLimit = 4000;

class Building {
 public:
  using Oracle = std::function<ElemId(ChamberId, ChamberId)>;

  /// Distances are tabulated when n <= table_limit, otherwise the oracle is
  /// queried on demand.
  Building(SystemPtr weyl, std::size_t n, Oracle delta, std::size_t table_limit = kTableLimit);

  const coxeter::CoxeterSystem& weyl() const { return *weyl_; }
  const SystemPtr& weyl_ptr() const { return weyl_; }
  std::size_t size() const { return n_; }
  ElemId delta(ChamberId x, ChamberId y) const {
    return table_.empty() ? oracle_(x, y) : table_[static_cast<std::size_t>(x) * n_ + y];
  }
  bool tabulated() const { return !table_.empty(); }
  /// Overwrites one table entry; used to inject faults in tests.
  void corrupt(ChamberId x, ChamberId y, ElemId w);

  /// Members of the s-panel of c, sorted, c included.
  const std::vector<ChamberId>& panel(ChamberId c, int s) const;
  const chambersys::ChamberSystem& chamber_system() const { return system_; }

 private:
  void build_panels();

  SystemPtr weyl_;
  std::size_t n_;
  Oracle oracle_;
  std::vector<std::uint16_t> table_;
  chambersys::ChamberSystem system_;
};

Building thin_building(const SystemPtr& weyl);

/// Verifies Bu1-Bu3 exhaustively.
CheckReport check_building_axioms(const Building& b);

class TwinBuilding {
 public:
  TwinBuilding(std::shared_ptr<const Building> base);

  const coxeter::CoxeterSystem& weyl() const { return base_->weyl(); }
  const SystemPtr& weyl_ptr() const { return base_->weyl_ptr(); }
  const Building& base() const { return *base_; }
  std::size_t half_size() const { return n_; }
  std::size_t size() const { return 2 * n_; }
  bool positive(ChamberId x) const { return x < n_; }
  ChamberId twin_copy(ChamberId x) const { return x < n_ ? x + static_cast<ChamberId>(n_) : x - static_cast<ChamberId>(n_); }

  /// Distance inside one half.
  ElemId delta(ChamberId x, ChamberId y) const {
    return table(x < n_ ? 0 : 1, x % n_, y % n_);
  }
  /// Codistance between halves.
  ElemId codistance(ChamberId x, ChamberId y) const {
    return table(x < n_ ? 2 : 3, x % n_, y % n_);
  }
  /// delta or codistance depending on the halves of x and y.
  ElemId dist(ChamberId x, ChamberId y) const {
    return (x < n_) == (y < n_) ? delta(x, y) : codistance(x, y);
  }
  bool opposite(ChamberId x, ChamberId y) const { return (x < n_) != (y < n_) && codistance(x, y) == 0; }

  const std::vector<ChamberId>& panel(ChamberId c, int s) const { return panels_[static_cast<std::size_t>(c) * rank_ + static_cast<std::size_t>(s)]; }
  const chambersys::ChamberSystem& chamber_system() const { return system_; }
  Residue residue(ChamberId c, TypeSet J) const { return system_.residue(c, J); }

  /// Overwrite one entry of delta (kind 0/1) or codistance (kind 2/3); for fault injection.
  void corrupt(int kind, ChamberId x, ChamberId y, ElemId w);

 private:
  ElemId table(int kind, ChamberId x, ChamberId y) const;

  std::shared_ptr<const Building> base_;
  std::size_t n_;
  std::size_t rank_;
  ElemId w0_;
  std::vector<std::uint16_t> tables_[4];  // delta+, delta-, codist(+,-), codist(-,+)
  std::vector<std::vector<ChamberId>> panels_;
  chambersys::ChamberSystem system_;
};

TwinBuilding spherical_to_twin(const Building& b);
TwinBuilding spherical_to_twin(std::shared_ptr<const Building> b);

/// Verifies Tw1-Tw3 exhaustively.
CheckReport check_twin_axioms(const TwinBuilding& tb);
/// Bu1-Bu3 on both halves of a twin building.
CheckReport check_half_axioms(const TwinBuilding& tb);

/// Same-half: the member closest to d. Cross-half: the member at maximal
/// codistance length from d.
ChamberId proj_residue(const TwinBuilding& tb, const std::vector<ChamberId>& R, ChamberId d);
ChamberId proj_residue(const TwinBuilding& tb, const Residue& R, ChamberId d);
/// Projection of d onto the s-panel of c.
ChamberId proj_panel(const TwinBuilding& tb, ChamberId c, int s, ChamberId d);
/// Checks the gate identity for a residue and a chamber.
bool gate_identity(const TwinBuilding& tb, const std::vector<ChamberId>& R, ChamberId d);
bool parallel(const TwinBuilding& tb, const Residue& R, const Residue& Q);

/// Smallest convex set containing c and d, sorted.
std::vector<ChamberId> convex_hull(const TwinBuilding& tb, ChamberId c, ChamberId d);

struct TwinApartment {
  std::vector<ChamberId> plus;
  std::vector<ChamberId> minus;
  /// (x, op(x)) for every x in plus.
  std::vector<std::pair<ChamberId, ChamberId>> opposition;

  bool contains(ChamberId x) const;
  bool operator==(const TwinApartment&) const = default;
};

/// The twin apartment spanned by c and an opposite chamber e. Throws NotOpposite.
TwinApartment twin_apartment_from_opposites(const TwinBuilding& tb, ChamberId c, ChamberId e);
/// Isometry to (W, delta_S) on both halves and the opposition pairing.
CheckReport verify_twin_apartment(const TwinBuilding& tb, const TwinApartment& a);

/// Binary dump: uint32 N, uint32 |W|, then four row-major N x N uint32 tables.
void write_dump(std::ostream& out, const TwinBuilding& tb);
struct Dump {
  std::uint32_t n = 0;
  std::uint32_t order = 0;
  std::vector<std::uint32_t> tables[4];
};
Dump read_dump(std::istream& in);

}  // namespace twinflip::twinbuild
