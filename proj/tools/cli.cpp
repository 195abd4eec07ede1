#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "twinflip/cosets.hpp"
#include "twinflip/error.hpp"
#include "twinflip/flips.hpp"
#include "twinflip/rgdcheck.hpp"
#include "twinflip/twinbuild.hpp"

namespace twinflip::cli {

namespace fm = flagmodel;
using nlohmann::json;

namespace {

void require_instance(const RunConfig& c) {
  if (c.n < 2 || c.n > fm::kMaxDim) throw Error(ErrorCode::Usage, "--n must be between 2 and 4");
  if (c.q < 2) throw Error(ErrorCode::Usage, "--q is required");
}

fm::Mat read_gram(const std::string& path, int n, int q) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  fm::Mat g = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int x = -1;
      if (!(in >> x) || x < 0 || x >= q)
        throw Error(ErrorCode::Usage, path + ": expected " + std::to_string(n * n) + " field elements in 0.." +
                                          std::to_string(q - 1));
      g = fm::mset(g, i, j, static_cast<fm::Elt>(x));
    }
  return g;
}

flips::FormFlip form_flip(const RunConfig& c) {
  require_instance(c);
  const auto kind = fm::parse_form_kind(c.form);
  if (c.gram_file.empty()) return flips::make_form_flip(c.n, c.q, kind, nullptr, c.max_flags);
  const auto g = read_gram(c.gram_file, c.n, c.q);
  return flips::make_form_flip(c.n, c.q, kind, &g, c.max_flags);
}

void override_notice(const RunConfig& c, std::ostream& log, const std::string& what) {
  if (c.override_hypotheses) log << "warning: hypotheses overridden for " << what << "\n";
}

CheckReport merged(std::initializer_list<std::pair<const char*, CheckReport>> parts) {
  CheckReport out;
  for (const auto& [prefix, r] : parts) out.merge(r, prefix);
  return out;
}

json cmd_coxeter(const RunConfig& c) {
  coxeter::CoxeterMatrix m;
  json doc;
  if (!c.matrix_file.empty()) {
    std::ifstream in(c.matrix_file);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + c.matrix_file);
    m = coxeter::read_matrix(in);
    doc["matrix_file"] = c.matrix_file;
  } else if (!c.type.empty()) {
    m = coxeter::standard_matrix(c.type);
    doc["type"] = c.type;
  } else {
    throw Error(ErrorCode::Usage, "coxeter needs --type or --matrix");
  }
  const auto W = coxeter::build_system(m, c.max_weyl);
  std::vector<coxeter::DiagramInvolution> twists;
  if (c.twist == "all") twists = coxeter::diagram_involutions(m);
  else twists.push_back(coxeter::DiagramInvolution::parse(c.twist, W->rank()));
  doc["rank"] = W->rank();
  doc["order"] = W->order();
  doc["longest"] = W->format(W->longest());
  json per = json::array();
  CheckReport all;
  for (const auto& t : twists) {
    t.validate(m);
    const auto inv = coxeter::twisted_involutions(*W, t);
    json elems = json::array();
    for (const auto& x : inv) elems.push_back(W->format(x.element.id()));
    const auto rep = coxeter::verify_twisted_involutions(*W, t);
    all.merge(rep, t.to_string() + ".");
    per.push_back({{"twist", t.to_string()}, {"count", inv.size()}, {"elements", elems}});
  }
  doc["twisted_involutions"] = per;
  doc["checks"] = all.to_json();
  doc["pass"] = all.ok();
  return doc;
}

json cmd_building(const RunConfig& c) {
  require_instance(c);
  const auto field = std::make_shared<fm::Field>(c.q);
  const auto fs = std::make_shared<fm::FlagSpace>(field, c.n, c.max_flags);
  const auto tb = twinbuild::TwinBuilding(fs->building());
  CheckReport count;
  auto& g = count.add("flags.gaussian_count");
  g.checked = 1;
  if (fs->size() != fm::gaussian_flag_count(c.n, c.q))
    g.fail(std::to_string(fs->size()) + " flags, expected " + std::to_string(fm::gaussian_flag_count(c.n, c.q)));
  const auto rep = merged({{"", count},
                           {"building.", twinbuild::check_building_axioms(*fs->building())},
                           {"twin.", twinbuild::check_twin_axioms(tb)}});
  return {{"field", field->name()},
          {"n", c.n},
          {"flags", fs->size()},
          {"weyl_order", fs->weyl().order()},
          {"checks", rep.to_json()},
          {"pass", rep.ok()}};
}

json cmd_flip(const RunConfig& c, std::ostream& log) {
  const auto m = form_flip(c);
  const auto& flip = *m.flip;
  const auto& W = flip.weyl();
  const auto cls = flips::classify(flip);
  const auto table = flips::theta_codistance(flip);
  override_notice(c, log, "geometricity");
  const auto geo = flips::geometricity_report(flip, {m.field->q(), c.override_hypotheses});
  const auto rep = merged({{"", flips::check_quasi_flip(*m.twin, flip.table())},
                           {"", flips::check_theta_codistance(flip)},
                           {"", flips::verify_panel_trichotomy(flip)},
                           {"", flips::check_phan_residues(flip)},
                           {"", flips::verify_pretty_cool_descent(flip)},
                           {"geometricity.", geo.report}});
  json values = json::array();
  for (auto w : table.realized) values.push_back(W.format(w));
  json connectivity = json::object();
  for (const char* k : {"flipflop.connected", "flipflop.inherits_connectedness", "residue_system.residually_connected"})
    connectivity[k] = geo.report.passed(k);
  return {{"field", m.field->name()},
          {"n", c.n},
          {"form", fm::to_string(m.form.kind)},
          {"gram", fm::mat_string(*m.field, c.n, m.form.gram)},
          {"flip_id", fm::to_string(m.form.kind) + "/" + m.field->name() + "/n" + std::to_string(c.n)},
          {"theta_W", flip.twist().to_string()},
          {"is_flip", flip.is_flip()},
          {"proper", cls.proper},
          {"strong", cls.strong},
          {"strong_witness", cls.strong_witness},
          {"K", W.format_mask(geo.homogeneity.K)},
          {"homogeneous", geo.homogeneity.homogeneous},
          {"homogeneity_witness", geo.homogeneity.witness},
          {"min_length", geo.min_length},
          {"flip_flop_size", geo.flip_flop_size},
          {"codistances", values},
          {"connectivity", connectivity},
          {"overridden", geo.overridden},
          {"checks", rep.to_json()},
          {"pass", rep.ok()}};
}

json cmd_cosets(const RunConfig& c, std::ostream& log) {
  const auto m = form_flip(c);
  const bool gate = cosets::locally_fixes_opposite(m);
  if (!gate && !c.override_hypotheses)
    throw Error(ErrorCode::HypothesisNotMet, "the flip must be semi-linear or q odd (use --override-hypotheses)");
  if (!gate) override_notice(c, log, "theta-stable apartments");
  const cosets::FlipGroup g(m, c.max_group);
  const auto& W = g.flip().weyl();
  const auto N = static_cast<cosets::ChamberId>(g.space().size());

  CheckReport apts;
  auto& every = apts.add("apartments.every_chamber");
  for (cosets::ChamberId x = 0; x < 2 * N; ++x) {
    ++every.checked;
    const auto a = cosets::theta_stable_apartment_containing(m, x, c.override_hypotheses);
    if (!a.contains(x) || !cosets::is_theta_stable(g.flip(), a)) every.fail("chamber " + std::to_string(x));
  }
  const auto dc = cosets::double_coset_decomposition(g, 0);
  const auto classes = cosets::stable_apartment_classes(g, 0);
  CheckReport rep = merged({{"", cosets::check_group_flip(g, c.seed)},
                            {"", apts},
                            {"", cosets::check_stable_apartments(g, classes)},
                            {"", dc.report}});
  // Shuffled class representatives must not change the right side.
  auto& shuffle = rep.add("cosets.representative_independent");
  shuffle.checked = 1;
  const auto dc2 = cosets::double_coset_decomposition(g, c.seed == 0 ? 1 : c.seed);
  if (dc2.right != dc.right) shuffle.fail(std::to_string(dc2.right) + " != " + std::to_string(dc.right));

  json doc = {{"field", m.field->name()},
              {"n", c.n},
              {"form", fm::to_string(m.form.kind)},
              {"fixed_group_order", g.fixed().size()},
              {"stable_frames", classes.frames.size()},
              {"stable_classes", classes.classes.size()},
              {"double_cosets", dc.to_json(W)},
              {"count", dc.left}};
  const bool semilinear = m.form.kind == fm::FormKind::Hermitian && !m.field->sigma_trivial();
  if (semilinear) rep.merge(cosets::codistance_fiber_check(g));
  const bool enumerable = fm::gl_order(c.n, c.q) <= c.max_group;
  if (enumerable) {
    std::vector<coxeter::ElemId> realized;
    for (auto w : flips::theta_codistance(g.flip()).realized) realized.push_back(w);
    for (auto w : realized) rep.merge(cosets::twisted_orbit_check(g, w, c.max_group), W.format(w) + ".");
    std::size_t v = 0;
    rep.merge(cosets::springer_parametrization_check(g, c.max_group, &v));
    doc["springer_V"] = v;
  } else {
    doc["skipped"] = "twisted orbits and Springer parametrization: |GL| = " +
                     std::to_string(fm::gl_order(c.n, c.q)) + " exceeds --max-group";
  }
  doc["overridden"] = !gate;
  doc["checks"] = rep.to_json();
  doc["pass"] = rep.ok();
  return doc;
}

json cmd_rgd(const RunConfig& c) {
  require_instance(c);
  const auto field = std::make_shared<fm::Field>(c.q);
  const auto d = rgd::standard_rgd(field, c.n, c.max_group);
  const auto t = rgd::standard_twin_bn(d.group);
  const auto rep = merged({{"", rgd::check_rgd(d)},
                           {"plus.", rgd::check_bn(t.bn(+1))},
                           {"minus.", rgd::check_bn(t.bn(-1))},
                           {"", rgd::check_twin_bn(t)}});
  return {{"field", field->name()},
          {"n", c.n},
          {"group_order", d.group->size()},
          {"roots", d.roots.size()},
          {"borel_order", t.plus.size()},
          {"checks", rep.to_json()},
          {"pass", rep.ok()}};
}

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooLarge:
    case ErrorCode::NonSphericalOrTooLarge:
      return kGuard;
    case ErrorCode::HypothesisNotMet:
      return kHypothesis;
    case ErrorCode::MismatchBug:
    case ErrorCode::ValidationFailed:
      return kAssertion;
    default:
      return kUsage;
  }
}

void render(const json& j, const std::string& prefix, std::string& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) render(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array() && !j.empty() && j.front().is_object() && j.front().contains("pass")) {
    for (const auto& i : j) {
      out += std::string(i["pass"].get<bool>() ? "PASS " : "FAIL ") + i["name"].get<std::string>() + " (" +
             std::to_string(i["checked"].get<std::uint64_t>()) + " checked)";
      if (!i["pass"].get<bool>()) out += ": " + i["witness"].get<std::string>();
      out += "\n";
    }
  } else {
    out += prefix + ": " + (j.is_string() ? j.get<std::string>() : j.dump()) + "\n";
  }
}

}  // namespace

json execute(const RunConfig& c, std::ostream& log) {
  if (c.threads < 1) throw Error(ErrorCode::Usage, "--threads must be at least 1");
  if (c.max_flags == 0 || c.max_group == 0 || c.max_weyl == 0) throw Error(ErrorCode::Usage, "guards must be positive");
  json report;
  if (c.command == "coxeter") report = cmd_coxeter(c);
  else if (c.command == "building") report = cmd_building(c);
  else if (c.command == "flip") report = cmd_flip(c, log);
  else if (c.command == "cosets") report = cmd_cosets(c, log);
  else if (c.command == "rgd") report = cmd_rgd(c);
  else throw Error(ErrorCode::Usage, "unknown command '" + c.command + "'");
  const bool pass = report["pass"].get<bool>();
  report.erase("pass");
  return {{"schema_version", kReportSchemaVersion},
          {"command", c.command},
          {"seed", c.seed},
          {"pass", pass},
          {"report", report}};
}

std::string render_text(const json& doc) {
  std::string out;
  render(doc, "", out);
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Exact checks for quasi-flips of finite twin buildings", "twinflip"};
  app.set_config("--config", "", "file of key = value lines; flags override it");
  app.require_subcommand(1);
  app.add_option("--out", c.out, "write the report here instead of stdout");
  app.add_option("--format", c.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--seed", c.seed, "seed for sampled checks");
  app.add_option("--threads", c.threads, "worker cap");
  app.add_option("--max-flags", c.max_flags, "flag enumeration guard");
  app.add_option("--max-group", c.max_group, "group enumeration guard");
  app.add_option("--max-weyl", c.max_weyl, "Weyl group order guard");
  app.add_flag("--override-hypotheses", c.override_hypotheses, "run checks whose gates fail");
  app.add_option("--type", c.type, "Coxeter type, e.g. A3, B2, A1xA1");
  app.add_option("--matrix", c.matrix_file, "Coxeter matrix file");
  app.add_option("--twist", c.twist, "diagram involution: id, all, or digit pairs such as 13");
  app.add_option("--n", c.n, "dimension of the vector space");
  app.add_option("--q", c.q, "field order");
  app.add_option("--form", c.form, "hermitian or alternating");
  app.add_option("--gram", c.gram_file, "Gram matrix file: n*n field elements");
  for (const char* name : {"coxeter", "building", "flip", "cosets", "rgd"})
    app.add_subcommand(name, std::string(name) + " checks")->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kPass;
    }
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  c.command = app.get_subcommands().front()->get_name();
  json doc;
  try {
    doc = execute(c, err);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_for(e.code());
  }
  const std::string text = c.format == "json" ? doc.dump(2) + "\n" : render_text(doc);
  if (c.out.empty()) {
    out << text;
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f || !(f << text)) {
      err << "cannot write " << c.out << "\n";
      return kUsage;
    }
  }
  return doc["pass"].get<bool>() ? kPass : kAssertion;
}

}  // namespace twinflip::cli
