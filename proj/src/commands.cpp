#include "apdisc/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "apdisc/fourier.hpp"
#include "apdisc/gamma2.hpp"

namespace apdisc {

namespace {

struct Domain {
  std::optional<BoxSpec> box;
  std::optional<ShiftedBody> body;

  bool is_box() const { return box.has_value(); }
  int dim() const { return is_box() ? box->dim() : body->dim(); }
};

Domain resolve(const Config& c) {
  if (c.box.has_value() == c.polytope.has_value()) throw UsageError("give exactly one of --box or --polytope");
  Domain d;
  if (c.box) {
    if (c.shift) throw UsageError("--shift applies only to --polytope");
    d.box.emplace(*c.box);
  } else {
    d.body.emplace(load_polytope(*c.polytope));
    if (c.shift) d.body->shift = parse_shift(*c.shift, d.body->dim());
  }
  return d;
}

Json config_json(const Config& c) {
  Json j = Json::object();
  if (c.box) j["box"] = *c.box;
  if (c.polytope) j["polytope"] = *c.polytope;
  if (c.shift) j["shift"] = *c.shift;
  j["seed"] = c.seed;
  j["format"] = c.format;
  j["max_sets"] = c.max_sets;
  j["max_scan"] = c.max_scan;
  return j;
}

Json rational_vector_json(const RationalVector& v) {
  Json j = Json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(to_string(v[i]));
  return j;
}

std::string signs(const Coloring& c) {
  std::string s;
  s.reserve(static_cast<std::size_t>(c.size()));
  for (Index i = 0; i < c.size(); ++i) s += c[i] > 0 ? '+' : '-';
  return s;
}

Json f_json(const FBoundResult& f) {
  return {{"sides", f.sides},
          {"f", f.value},
          {"s", f.s()},
          {"s_exact", f.base.str() + "^(1/" + std::to_string(f.root) + ")"},
          {"argmax_subset", f.argmax_subset}};
}

MaximalFamily family_of(const Domain& d, const Config& c) {
  return d.is_box() ? maximal_family(*d.box) : maximal_family(*d.body, c.max_scan);
}

struct BodyCert {
  FactorizationCertificate cert;
  std::string kind;
};

// The cheaper of the two trivial bounds on all APs of a body.
BodyCert best_trivial_cert(const std::shared_ptr<const SetSystem>& target) {
  auto size = size_bound_cert(target);
  auto degree = degree_bound_cert(target);
  if (degree.value < size.value) return {std::move(degree), "degree_bound"};
  return {std::move(size), "size_bound"};
}

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

std::vector<Coord> parse_box(const std::string& text) {
  std::vector<Coord> sides;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
      throw UsageError("malformed box sides '" + text + "'");
    }
    sides.push_back(std::stoll(tok));
  }
  if (sides.empty()) throw UsageError("empty box sides");
  return sides;
}

RationalVector parse_shift(const std::string& text, int dim) {
  std::vector<Rational> parts;
  std::stringstream ss(text);
  std::string tok;
  try {
    while (std::getline(ss, tok, ',')) parts.push_back(parse_rational(tok));
  } catch (const StructuralError&) {
    throw UsageError("malformed shift '" + text + "'");
  }
  if (static_cast<int>(parts.size()) != dim) throw UsageError("shift dimension does not match the polytope");
  RationalVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = parts[i];
  return v;
}

// ------------------------------------------------------------------- bound

Report cmd_bound(const Config& c) {
  Report r{"bound", config_json(c)};
  const Domain d = resolve(c);
  if (d.is_box()) {
    const auto f = f_of_N(*d.box);
    r.add("f_of_N", c.seed, f_json(f));
    const auto vb = ap_value_bound(*d.box);
    r.add("value_bound", c.seed,
          {{"map_value", vb.map_value}, {"prefix_value", vb.prefix_value}, {"ap_value", vb.ap_value},
           {"ap_ratio", vb.ap_value / f.value}});
    return r;
  }
  const Polytope diff = difference_body(d.body->base);
  const auto fk = f_K_of_difference(diff);
  r.add("f_K", c.seed,
        {{"s_star", to_string(fk.s_star)}, {"f_K", fk.f_K}, {"s_lo", to_string(fk.s_lo)},
         {"s_hi", to_string(fk.s_hi)}, {"attained", fk.attained}});
  const GaugeTable table(diff, Rational(1), c.max_scan);
  Json rows = Json::array();
  const Rational* last = nullptr;
  for (const auto& g : table.gauges()) {
    if (last && *last == g) continue;
    last = &g;
    rows.push_back({{"t", to_string(g)}, {"zeta", table.count(g)}});
    if (rows.size() >= 64) break;
  }
  r.add("zeta_table", c.seed, {{"zeta_1", table.count(Rational(1))}, {"breakpoints", rows}});
  return r;
}

// -------------------------------------------------------------------- cert

Report cmd_cert(const Config& c) {
  Report r{"cert", config_json(c)};
  const Domain d = resolve(c);
  if (d.is_box()) {
    const auto f = f_of_N(*d.box);
    const auto mc = map_cert(*d.box);
    Json mj = certificate_json(mc.cert, mc.family.get());
    mj["s"] = f.s();
    mj["large_count"] = mc.large_count;
    mj["bound"] = std::sqrt(f.s() + static_cast<double>(mc.large_count));
    mj["ratio_to_f"] = mc.cert.value / f.value;
    r.add("map_cert", c.seed, mj);

    ApCertOptions opt;
    opt.max_sets = c.max_sets;
    const auto ac = ap_cert(*d.box, opt);
    Json aj = certificate_json(ac.cert, ac.cert.target.get());
    aj["f"] = f.value;
    aj["ratio"] = ac.ratio;
    aj["rounded"] = ac.rounded;
    aj["prefix_value"] = ac.prefix_value;
    bool decay_ok = true;
    for (const auto& dc : ac.decay) decay_ok = decay_ok && dc.holds;
    aj["decay_levels"] = ac.decay.size();
    aj["decay_holds"] = decay_ok;
    r.add("ap_cert", c.seed, aj);
    if (!decay_ok) r.violation = true;
    return r;
  }
  const auto fam = maximal_family(*d.body, c.max_scan);
  auto target = std::make_shared<const SetSystem>(all_aps(fam, c.max_sets));
  for (auto& cert : {size_bound_cert(target), degree_bound_cert(target)}) {
    r.add(cert.provenance ? cert.provenance->kind : "cert", c.seed, certificate_json(cert, target.get()));
  }
  return r;
}

// ------------------------------------------------------------------- color

Report cmd_color(const Config& c) {
  Report r{"color", config_json(c)};
  const Domain d = resolve(c);
  const auto fam = family_of(d, c);
  const Index n = fam.universe->size();
  double f = 1;
  ColoringReport rep{Coloring(Eigen::VectorXi(0), ColoringSource::gswalk), 0, 0, 0};
  std::string cert_kind;
  double cert_value = 0;
  if (d.is_box()) {
    ApCertOptions opt;
    opt.keep_left = false;
    opt.max_sets = c.max_sets;
    const auto ac = ap_cert(*d.box, opt);
    f = ac.f.value;
    cert_kind = "ap_cert";
    cert_value = ac.cert.value;
    const auto m = static_cast<Index>(count_all_aps(fam));
    rep = gamma2_coloring(ac.cert, m, [&](const Coloring& chi) { return all_ap_disc(fam, chi); }, c.seed);
  } else {
    f = f_K(d.body->base).f_K;
    auto target = std::make_shared<const SetSystem>(all_aps(fam, c.max_sets));
    auto bc = best_trivial_cert(target);
    cert_kind = bc.kind;
    cert_value = bc.cert.value;
    rep = gamma2_coloring(*target, bc.cert, c.seed);
  }
  const double bound = std::sqrt(std::log(static_cast<double>(std::max<Index>(n, 1)))) * f;
  const auto baseline = random_coloring(n, c.seed);
  r.add("gamma2_coloring", c.seed,
        {{"points", n},
         {"disc", rep.disc},
         {"certificate", cert_kind},
         {"cert_value", cert_value},
         {"scale", rep.scale},
         {"ratio_to_scale", rep.ratio},
         {"f", f},
         {"bound", bound},
         {"ratio_to_bound", bound > 0 ? Json(rep.disc / bound) : Json(nullptr)},
         {"random_disc", all_ap_disc(fam, baseline)},
         {"coloring", n <= 4096 ? Json(signs(rep.coloring)) : Json(nullptr)}});
  return r;
}

// ------------------------------------------------------------------- brute

Report cmd_brute(const Config& c) {
  Report r{"brute", config_json(c)};
  const Domain d = resolve(c);
  const auto fam = family_of(d, c);
  if (fam.universe->size() > c.brute_max_n) {
    throw ResourceError("brute force universe too large", static_cast<std::uint64_t>(fam.universe->size()),
                        static_cast<std::uint64_t>(c.brute_max_n));
  }
  const SetSystem all = all_aps(fam, c.max_sets);
  const auto res = brute_force_min_disc(all, c.brute_max_n);
  r.add("brute_force_min_disc", c.seed,
        {{"points", fam.universe->size()}, {"sets", all.size()}, {"min_disc", res.min_disc},
         {"evaluated", res.evaluated}, {"witness", signs(res.witness)}});
  return r;
}

// -------------------------------------------------------------- lowerbound

Report cmd_lowerbound(const Config& c) {
  Report r{"lowerbound", config_json(c)};
  const Domain d = resolve(c);
  std::optional<ShiftedBody> body;
  if (d.is_box()) {
    body.emplace(Polytope::box(d.box->sides));
  } else if (c.shift) {
    body = d.body;
  } else {
    const auto search = best_shift_on_grid(d.body->base, c.shift_grid);
    body.emplace(d.body->base, search.best_shift);
    r.add("shift_search", c.seed,
          {{"grid", c.shift_grid}, {"sampled", search.sampled}, {"best_count", search.best_count},
           {"shift", rational_vector_json(search.best_shift)}});
  }
  const auto params = choose_lb_params(body->base);
  const auto lb = certified_lower_bound(*body, params);
  const double fk = std::sqrt(to_double(params.s_star));
  r.add("certified_lower_bound", c.seed,
        {{"value", lb.value},
         {"ell", params.ell},
         {"m", to_string(params.m)},
         {"epsilon", to_string(params.epsilon)},
         {"zeta_half_m", params.zeta_half_m},
         {"zeta_outer", lb.zeta_outer},
         {"zeta_m", lb.zeta_m},
         {"points", lb.omega_size},
         {"shift", rational_vector_json(body->shift)},
         {"f_K", fk},
         {"ratio_to_f", lb.value / fk}});
  if (lb.omega_size <= c.brute_max_n) {
    const auto fam = maximal_family(*body, c.max_scan);
    const auto res = brute_force_min_disc(all_aps(fam, c.max_sets), c.brute_max_n);
    const bool sound = lb.value <= static_cast<double>(res.min_disc);
    r.add("soundness", c.seed, {{"min_disc", res.min_disc}, {"lower_bound", lb.value}, {"holds", sound}});
    if (!sound) r.violation = true;
  }
  return r;
}

// ------------------------------------------------------------------ verify

namespace {

struct Check {
  Report& report;
  const Config& config;

  void record(const std::string& op, bool holds, Json fields = Json::object()) {
    fields["holds"] = holds;
    report.add(op, config.seed, std::move(fields));
    if (!holds) report.violation = true;
  }
};

// AP = residue line of its start intersected with the lex interval of its endpoints.
bool lex_repr_holds(const BoxSpec& box, const Universe& u, const OrderingSigma& sigma, const LatticePoint& a,
                    const LatticePoint& b, Index len) {
  const auto [x, y] = lex_interval_repr(canonicalize({a, b, len}), box);
  const auto sx = sigma(*u.find(x)), sy = sigma(*u.find(y));
  LatticePoint z = a;
  while (true) {
    const LatticePoint prev = z - b;
    if (!u.find(prev)) break;
    z = prev;
  }
  Index inside = 0;
  for (; u.find(z); z += b) {
    const auto sz = sigma(*u.find(z));
    const LatticePoint off = z - a;
    bool on_ap = false;
    for (Index i = 0; i < len; ++i) on_ap = on_ap || off == i * b;
    const bool in_interval = sz >= sx && sz <= sy;
    if (on_ap != in_interval) return false;
    inside += in_interval;
  }
  return inside == len;
}

void verify_lex(Check& chk, const BoxSpec& box) {
  const auto fam = maximal_family(box);
  const auto& u = *fam.universe;
  const auto sigma = lex_order(u);
  Index checked = 0;
  bool ok = true;
  for (Index t = 0; t < fam.chains.size() && ok; ++t) {
    const auto chain = fam.chains.set(t);
    const auto& b = fam.steps[static_cast<std::size_t>(fam.chains.tag(t))];
    for (std::size_t i = 0; i < chain.size() && ok; ++i) {
      for (std::size_t len = 2; i + len <= chain.size() && ok; ++len) {
        ok = lex_repr_holds(box, u, sigma, u.point_vector(chain[i]), b, static_cast<Index>(len));
        ++checked;
      }
    }
  }
  chk.record("lex_interval", ok, {{"box", box.sides}, {"aps_checked", checked}});
}

void verify_reduction(Check& chk, const BoxSpec& box, int trials) {
  const auto fam = maximal_family(box);
  const SetSystem maps = maximal_aps(fam);
  const auto sigma = lex_order(*fam.universe);
  bool ok = true;
  std::int64_t worst_gap = 0;
  for (int k = 0; k < trials; ++k) {
    const auto chi = random_coloring(fam.universe->size(), chk.config.seed + static_cast<std::uint64_t>(k));
    const auto disc = all_ap_disc(fam, chi);
    const auto pdisc = pdisc_eval(maps, sigma, chi);
    ok = ok && disc <= 2 * pdisc;
    worst_gap = std::max(worst_gap, disc - 2 * pdisc);
  }
  chk.record("reduction", ok, {{"box", box.sides}, {"trials", trials}, {"max_disc_minus_2pdisc", worst_gap}});
}

void verify_partition(Check& chk, const BoxSpec& box) {
  const auto u = box_universe(box);
  bool ok = true;
  Index steps = 0;
  for (const auto& b : canonical_box_steps(box)) {
    const SetSystem part = step_partition(u, b);
    std::vector<int> hits(static_cast<std::size_t>(u->size()), 0);
    for (Index t = 0; t < part.size(); ++t) {
      for (auto i : part.set(t)) ++hits[i];
    }
    ok = ok && std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
    ++steps;
  }
  chk.record("step_partition", ok, {{"box", box.sides}, {"steps", steps}});
}

void verify_large_sets(Check& chk, const BoxSpec& box) {
  Json rows = Json::array();
  bool ok = true;
  for (std::int64_t s = 2; s <= std::max<Coord>(2, box.max_side()); ++s) {
    const auto ls = large_step_set(box, s);
    const auto both_signs = count_steps_at_least(box, s);
    const bool holds = static_cast<double>(ls.steps.size()) <= ls.lemma_bound &&
                       static_cast<double>(both_signs) <= ls.lemma_bound;
    ok = ok && holds;
    rows.push_back({{"s", s}, {"large_steps", ls.steps.size()}, {"steps_at_least_s", both_signs},
                    {"bound", ls.lemma_bound}, {"holds", holds}});
  }
  chk.record("large_sets", ok, {{"box", box.sides}, {"table", rows}});
}

void verify_zeta(Check& chk, const BoxSpec& box) {
  const Polytope k = Polytope::box(box.sides);
  const Polytope diff = difference_body(k);
  bool ok = true;
  for (const Rational& t : {Rational(1, 3), Rational(1, 2), Rational(1), Rational(3, 2), Rational(5, 2)}) {
    std::int64_t expect = 1;
    for (Coord n : box.sides) expect *= 2 * floor_to_int(t * (n - 1)) + 1;
    ok = ok && zeta(diff, t).count == expect;
  }
  chk.record("zeta_box_formula", ok, {{"box", box.sides}});

  for (const Rational& t : {Rational(2), Rational(3)}) {
    const auto sc = check_zeta_scaling(diff, t);
    chk.record("zeta_scaling", sc.lower_holds && sc.upper_holds,
               {{"box", box.sides}, {"t", to_string(t)}, {"zeta_1", sc.zeta_one}, {"zeta_t", sc.zeta_t},
                {"upper", to_string(sc.upper)}});
  }
  std::vector<RationalVector> shifts;
  for (int a = 0; a < 3; ++a) {
    RationalVector v = RationalVector::Constant(box.dim(), Rational(a, 3));
    shifts.push_back(v);
  }
  const auto ms = check_zeta_maxshift(k, shifts);
  chk.record("zeta_maxshift", ms.all_hold, {{"box", box.sides}, {"zeta_1", ms.zeta_one}, {"max_ratio", ms.max_ratio}});
}

void verify_certificates(Check& chk, const BoxSpec& box) {
  const auto mc = map_cert(box);
  const double map_res = max_residual(mc.cert, *mc.family);
  const auto f = f_of_N(box);
  const bool map_bound = mc.cert.value * mc.cert.value <= f.s() + static_cast<double>(mc.large_count) + 1e-9;
  chk.record("map_cert", map_res <= 1e-9 && map_bound,
             {{"box", box.sides}, {"max_residual", map_res}, {"value", mc.cert.value}, {"s", f.s()},
              {"large_count", mc.large_count}});

  auto ac = ap_cert(box);
  if (chk.config.inject_fault && ac.cert.R.nonZeros() > 0) ac.cert.R.valuePtr()[0] += 0.25;
  const double ap_res = max_residual(ac.cert, *ac.cert.target);
  bool decay = true;
  for (const auto& dc : ac.decay) decay = decay && dc.holds;
  chk.record("ap_cert", ap_res <= 1e-9 && decay,
             {{"box", box.sides}, {"max_residual", ap_res}, {"value", ac.cert.value}, {"ratio", ac.ratio},
              {"decay_levels", ac.decay.size()}, {"decay_holds", decay}, {"fault_injected", chk.config.inject_fault}});
}

void verify_fourier(Check& chk, const BoxSpec& box, int trials) {
  const auto u = box_universe(box);
  SplitMix64 rng(chk.config.seed);
  bool conv_ok = true, parseval_ok = true;
  double worst = 0;
  for (int k = 0; k < trials; ++k) {
    const auto chi = random_coloring(u->size(), rng.next());
    LatticePoint b(box.dim());
    do {
      for (int i = 0; i < box.dim(); ++i) b[i] = static_cast<Coord>(rng.next() % 5) - 2;
    } while (b.isZero());
    const CombFunction g{b, 1 + static_cast<Index>(rng.next() % 4)};
    conv_ok = conv_ok && convolution_identity_check(*u, chi, g).holds();
    const auto pr = parseval_check(*u, chi, g);
    parseval_ok = parseval_ok && pr.agrees;
    worst = std::max(worst, pr.relative_error);
  }
  chk.record("convolution_identity", conv_ok, {{"box", box.sides}, {"trials", trials}});
  chk.record("parseval", parseval_ok, {{"box", box.sides}, {"trials", trials}, {"max_relative_error", worst}});

  if (box.volume() <= chk.config.brute_max_n) {
    const ShiftedBody body(Polytope::box(box.sides));
    const auto lb = certified_lower_bound(body);
    const auto opt = brute_force_min_disc(enumerate_all_aps(box), chk.config.brute_max_n);
    chk.record("lower_bound_soundness", lb.value <= static_cast<double>(opt.min_disc),
               {{"box", box.sides}, {"lower_bound", lb.value}, {"min_disc", opt.min_disc}});
  }
}

void verify_walk(Check& chk, const BoxSpec& box) {
  ApCertOptions opt;
  opt.keep_left = false;
  const auto ac = ap_cert(box, opt);
  ColSparse r = ac.cert.R;
  r /= ac.cert.right_norm();
  WalkOptions wo;
  wo.record_trace = true;
  const auto w = gs_walk(r, chk.config.seed, wo);
  double drift = 0;
  for (const auto& s : w.trace) {
    drift = std::max(drift, std::abs(s.prob_plus * s.delta_plus - (1 - s.prob_plus) * s.delta_minus));
  }
  const bool signs_ok = (w.x.array().abs() == 1).all();
  chk.record("gs_walk", signs_ok && drift <= 1e-9,
             {{"box", box.sides}, {"steps", w.steps}, {"max_mean_drift", drift}, {"refreshes", w.refreshes},
              {"fallback", w.used_fallback}});
}

}  // namespace

Report cmd_verify(const Config& c) {
  Report r{"verify", config_json(c)};
  r.config["lemma"] = c.lemma;
  r.config["inject_fault"] = c.inject_fault;
  Check chk{r, c};
  if (c.polytope) {
    const Domain d = resolve(c);
    const Polytope diff = difference_body(d.body->base);
    for (const Rational& t : {Rational(2), Rational(3)}) {
      const auto sc = check_zeta_scaling(diff, t);
      chk.record("zeta_scaling", sc.lower_holds && sc.upper_holds,
                 {{"t", to_string(t)}, {"zeta_1", sc.zeta_one}, {"zeta_t", sc.zeta_t}, {"upper", to_string(sc.upper)}});
    }
    std::vector<RationalVector> shifts;
    for (int a = 0; a < 4; ++a) shifts.push_back(RationalVector::Constant(d.dim(), Rational(a, 4)));
    const auto ms = check_zeta_maxshift(d.body->base, shifts);
    chk.record("zeta_maxshift", ms.all_hold, {{"zeta_1", ms.zeta_one}, {"max_ratio", ms.max_ratio}});
    return r;
  }
  const std::optional<BoxSpec> given = c.box ? std::optional<BoxSpec>(BoxSpec(*c.box)) : std::nullopt;
  auto pick = [&](std::vector<Coord> fallback) { return given ? *given : BoxSpec(std::move(fallback)); };
  const std::string& lemma = c.lemma;
  auto want = [&](const char* name) { return lemma == "all" || lemma == name; };
  bool any = false;
  if (want("lex")) {
    any = true;
    if (given) {
      verify_lex(chk, *given);
    } else {
      for (auto sides : {std::vector<Coord>{9}, {4, 5}, {3, 2, 3}}) verify_lex(chk, BoxSpec(sides));
    }
  }
  if (want("reduction")) any = true, verify_reduction(chk, pick({6, 6}), 20);
  if (want("partition")) any = true, verify_partition(chk, pick({5, 4, 2}));
  if (want("large-sets")) any = true, verify_large_sets(chk, pick({16, 16, 4}));
  if (want("zeta")) any = true, verify_zeta(chk, pick({5, 3}));
  if (want("certificates") || c.inject_fault) any = true, verify_certificates(chk, pick({8, 8}));
  if (want("fourier")) any = true, verify_fourier(chk, pick({3, 3}), 20);
  if (want("walk")) any = true, verify_walk(chk, pick({32}));
  if (!any) throw UsageError("unknown lemma '" + lemma + "'");
  return r;
}

// ------------------------------------------------------------------- sweep

Report cmd_sweep(const Config& c) {
  Report r{"sweep", config_json(c)};
  const Domain d = resolve(c);
  std::vector<Rational> scales;
  if (c.scales.empty()) {
    for (int e = 0; e <= 6; ++e) scales.emplace_back(ipow(2, e));
  } else {
    for (const auto& s : c.scales) {
      try {
        scales.push_back(parse_rational(s));
      } catch (const StructuralError&) {
        throw UsageError("malformed scale '" + s + "'");
      }
      if (scales.back() <= 0) throw UsageError("scales must be positive");
    }
  }
  r.config["scales"] = c.scales;
  std::vector<double> xs, ys;
  for (const auto& s : scales) {
    Json row = {{"r", to_string(s)}};
    double f = 0;
    Index points = 0;
    std::optional<ShiftedBody> body;
    if (d.is_box()) {
      if (denominator(s) != 1) throw UsageError("box sweeps need integer scales");
      std::vector<Coord> sides = d.box->sides;
      for (auto& n : sides) n *= static_cast<Coord>(numerator(s));
      const BoxSpec box(sides);
      f = f_of_N(box).value;
      points = box.volume();
      row["sides"] = sides;
      if (points <= c.color_limit) body.emplace(Polytope::box(sides));
    } else {
      const ShiftedBody scaled(d.body->base.scaled(s), d.body->shift);
      f = f_K(scaled.base).f_K;
      points = integer_points(scaled, c.max_scan)->size();
      if (points <= c.color_limit) body = scaled;
    }
    row["f"] = f;
    row["points"] = points;
    if (body) {
      const auto fam = maximal_family(*body, c.max_scan);
      auto target = std::make_shared<const SetSystem>(all_aps(fam, c.max_sets));
      if (d.is_box()) {
        ApCertOptions opt;
        opt.keep_left = false;
        opt.max_sets = c.max_sets;
        const auto ac = ap_cert(BoxSpec(row["sides"].get<std::vector<Coord>>()), opt);
        row["gs_disc"] = gamma2_coloring(*target, ac.cert, c.seed).disc;
      } else {
        row["gs_disc"] = gamma2_coloring(*target, best_trivial_cert(target).cert, c.seed).disc;
      }
      row["lower_bound"] = certified_lower_bound(*body).value;
    }
    xs.push_back(std::log(to_double(s)));
    ys.push_back(std::log(f));
    r.add("sweep_point", c.seed, row);
  }
  const double expected = static_cast<double>(d.dim()) / (2.0 * (d.dim() + 1));
  Json fit = {{"expected_slope", expected}, {"points", xs.size()}};
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (xs.size() < 2 || sxx == 0) {
    fit["degenerate"] = true;
    fit["slope"] = nullptr;
  } else {
    fit["degenerate"] = false;
    fit["slope"] = sxy / sxx;
    fit["deviation"] = std::abs(sxy / sxx - expected);
  }
  r.add("slope_fit", c.seed, fit);
  return r;
}

// ------------------------------------------------------------------ runner

int run_command(const std::string& name, const Config& config, std::ostream& out, std::ostream& err) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  Report report;
  try {
    if (config.format != "json" && config.format != "csv") throw UsageError("--format must be json or csv");
    if (name == "bound") {
      report = cmd_bound(config);
    } else if (name == "cert") {
      report = cmd_cert(config);
    } else if (name == "color") {
      report = cmd_color(config);
    } else if (name == "brute") {
      report = cmd_brute(config);
    } else if (name == "lowerbound") {
      report = cmd_lowerbound(config);
    } else if (name == "verify") {
      report = cmd_verify(config);
    } else if (name == "sweep") {
      report = cmd_sweep(config);
    } else {
      throw UsageError("unknown command '" + name + "'");
    }
  } catch (const ResourceError& e) {
    err << "apdisc: " << e.what() << "\n";
    return kExitResource;
  } catch (const UsageError& e) {
    err << "apdisc: " << e.what() << "\n";
    return kExitUsage;
  } catch (const StructuralError& e) {
    err << "apdisc: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "apdisc: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "apdisc: " << e.what() << "\n";
    return kExitViolation;
  }
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  report.run["timestamp"] = stamp;
  report.run["elapsed_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();

  if (config.out.empty()) {
    write_report(report, config.format, out);
  } else {
    std::ofstream file(config.out);
    if (!file) {
      err << "apdisc: cannot write " << config.out << "\n";
      return kExitUsage;
    }
    write_report(report, config.format, file);
  }
  return report.violation ? kExitViolation : kExitOk;
}

}  // namespace apdisc
