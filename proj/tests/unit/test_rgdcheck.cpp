#include <algorithm>
#include <random>

#include "doctest.h"
#include "twinflip/error.hpp"
#include "twinflip/rgdcheck.hpp"

using namespace twinflip;
using namespace twinflip::rgd;
namespace fm = twinflip::flagmodel;
using coxeter::ElemId;

namespace {

std::shared_ptr<const Field> gf(int q) { return std::make_shared<Field>(q); }

std::string failures(const CheckReport& r) {
  std::string out;
  for (const auto& i : r.items)
    if (!i.pass) out += i.name + ": " + i.witness + "\n";
  return out;
}

}  // namespace

TEST_CASE("generated subgroups") {
  const Field F(3);
  const auto gl = fm::group_elements(F, 2, fm::GroupKind::GL);
  CHECK(generated_subgroup(F, 2, gl).size() == 48);
  const auto gens = generating_set(F, 2, gl);
  CHECK(gens.size() <= 6);
  CHECK(generated_subgroup(F, 2, gens) == gl);
  CHECK(generated_subgroup(F, 2, {}).size() == 1);
}

TEST_CASE("RGD axioms for GL2(3) and GL3(3)") {
  for (int n : {2, 3}) {
    const auto d = standard_rgd(gf(3), n);
    CHECK(d.group->size() == (n == 2 ? 48u : 11232u));
    CHECK(d.roots.size() == static_cast<std::size_t>(n * (n - 1)));
    const auto rep = check_rgd(d);
    INFO(failures(rep));
    CHECK(rep.ok());
    for (const char* ax : {"RGD0", "RGD1", "RGD2", "RGD3", "RGD4", "RGD5"}) CHECK(rep.passed(ax));
  }
}

TEST_CASE("RGD faults are detected") {
  auto d = standard_rgd(gf(3), 2);
  d.root_groups[0] = {fm::mat_identity(2)};
  const auto rep = check_rgd(d);
  CHECK_FALSE(rep.passed("RGD0"));
  // A torus that does not normalize the root groups.
  auto e = standard_rgd(gf(3), 2);
  e.torus = e.group->elements();
  CHECK_FALSE(check_rgd(e).passed("RGD5"));
  // Commutators leaving the interval: swap in a lower root group for an upper one.
  auto f = standard_rgd(gf(3), 3);
  f.root_groups[static_cast<std::size_t>(f.root_index(0, 2))] = f.root_groups[static_cast<std::size_t>(f.root_index(1, 0))];
  CHECK_FALSE(check_rgd(f).passed("RGD1"));
}

TEST_CASE("BN-pair of GL2(3)") {
  const auto t = standard_twin_bn(gf(3), 2);
  CHECK(t.plus.size() == 12);
  CHECK(t.N.size() == 8);
  const auto rep = check_bn(t.bn(+1));
  INFO(failures(rep));
  CHECK(rep.ok());
  const auto part = double_cosets(*t.group, t.plus, t.plus, {weyl_rep(t.bn(+1), 0), weyl_rep(t.bn(+1), 1)});
  CHECK(part.sizes == std::vector<std::size_t>{12, 36});
  CHECK(part.disjoint);
  CHECK(part.covers());
}

TEST_CASE("BN-pair of GL3(4)") {
  const auto t = standard_twin_bn(gf(4), 3);
  CHECK(t.group->size() == 181440);
  const auto rep = check_bn(t.bn(+1));
  INFO(failures(rep));
  CHECK(rep.ok());
  CHECK(t.weyl->order() == 6);
}

TEST_CASE("BN faults are detected") {
  auto t = standard_twin_bn(gf(3), 2);
  auto bn = t.bn(+1);
  std::vector<Mat> unipotent;
  for (Mat b : bn.B)
    if (fm::mget(b, 0, 0) == 1 && fm::mget(b, 1, 1) == 1) unipotent.push_back(b);
  bn.B = unipotent;
  const auto rep = check_bn(bn);
  CHECK_FALSE(rep.ok());
  CHECK_FALSE(rep.passed("bruhat.partition"));
}

TEST_CASE("twin BN-pairs of GL2(3) and GL3(3)") {
  for (int n : {2, 3}) {
    const auto t = standard_twin_bn(gf(3), n);
    const auto rep = check_twin_bn(t);
    INFO(failures(rep));
    CHECK(rep.ok());
    CHECK(rep.passed("TBN1"));
    CHECK(rep.passed("TBN2"));
    CHECK(rep.passed("saturation"));
  }
  // B- = B+: B+ s and B+ stay disjoint since s is not in B+, but the
  // Birkhoff cells collapse to Bruhat cells.
  auto t = standard_twin_bn(gf(3), 2);
  t.minus = t.plus;
  const auto rep = check_twin_bn(t);
  CHECK(rep.passed("TBN2"));
  CHECK_FALSE(rep.passed("TBN1"));
  CHECK_FALSE(rep.passed("saturation"));
  // B- = stabilizer of <e1+e2> contains s.
  auto u = standard_twin_bn(gf(3), 2);
  const auto& G = *u.group;
  Mat g = fm::mset(fm::mat_identity(2), 1, 0, 1);
  u.minus.clear();
  for (Mat b : u.plus) u.minus.push_back(G.mul(G.mul(g, b), G.inv(g)));
  CHECK(std::count(u.minus.begin(), u.minus.end(), u.simple[0]) == 1);
  CHECK_FALSE(check_twin_bn(u).passed("TBN2"));
}

TEST_CASE("Bruhat cells via flags agree with membership") {
  {
    const auto t = standard_twin_bn(gf(3), 2);
    const fm::FlagSpace fs(t.group->field_ptr(), 2);
    std::vector<Mat> reps;
    for (ElemId w = 0; w < t.weyl->order(); ++w) reps.push_back(weyl_rep(t.bn(+1), w));
    const auto bru = double_cosets(*t.group, t.plus, t.plus, reps);
    const auto bir = double_cosets(*t.group, t.plus, t.minus, reps);
    for (std::size_t i = 0; i < t.group->size(); ++i) {
      const Mat g = t.group->elements()[i];
      CHECK(static_cast<long>(bruhat_cell(fs, g)) == bru.label[i]);
      CHECK(static_cast<long>(birkhoff_cell(fs, g)) == bir.label[i]);
    }
  }
  const auto t = standard_twin_bn(gf(4), 3);
  const fm::FlagSpace fs(t.group->field_ptr(), 3);
  std::vector<Mat> reps;
  for (ElemId w = 0; w < t.weyl->order(); ++w) reps.push_back(weyl_rep(t.bn(+1), w));
  const auto bru = double_cosets(*t.group, t.plus, t.plus, reps);
  const auto bir = double_cosets(*t.group, t.plus, t.minus, reps);
  std::mt19937 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, t.group->size() - 1);
  for (int k = 0; k < 1000; ++k) {
    const auto i = pick(rng);
    const Mat g = t.group->elements()[i];
    CHECK(static_cast<long>(bruhat_cell(fs, g)) == bru.label[i]);
    CHECK(static_cast<long>(birkhoff_cell(fs, g)) == bir.label[i]);
  }
  CHECK(bruhat_cell(fs, fm::mat_identity(3)) == 0);
  CHECK(bruhat_cell(fs, weyl_rep(t.bn(+1), t.weyl->longest())) == t.weyl->longest());
  CHECK(birkhoff_cell(fs, fm::mat_identity(3)) == 0);
}
