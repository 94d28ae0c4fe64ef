// stodom command-line driver: every experiment and checker behind one entry
// point with explicit seeds and machine-readable output.
//
// Exit codes: 0 success, 1 usage, 2 parameter error, 3 numerical error,
// 4 hypothesis violation.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "stodom/contact.hpp"
#include "stodom/contact_estimators.hpp"
#include "stodom/dominance.hpp"
#include "stodom/exchangeable.hpp"
#include "stodom/ising_lattice.hpp"
#include "stodom/ising_tree.hpp"
#include "stodom/percolation.hpp"

#ifndef STODOM_BUILD_ID
#define STODOM_BUILD_ID "unknown"
#endif

using nlohmann::json;
using namespace stodom;

namespace {

json estimate_json(const EstimateCI& e) {
  return json{{"point", e.point},
              {"stderr", e.stderr_value},
              {"replicas", e.replicas},
              {"seed", e.seed}};
}

// "product:RHO" or a path to a FiniteMeasure JSON file.
FiniteMeasure parse_measure(const std::string& spec, std::optional<int> n_hint = {}) {
  if (spec.rfind("product:", 0) == 0) {
    const double rho = std::stod(spec.substr(8));
    if (!n_hint) throw param_error("product measure needs the site count from the other operand");
    return product_measure(*n_hint, rho);
  }
  std::ifstream in(spec);
  if (!in) throw param_error("cannot open measure file: " + spec);
  json j;
  in >> j;
  return j.get<FiniteMeasure>();
}

std::optional<int> measure_site_count(const std::string& spec) {
  if (spec.rfind("product:", 0) == 0) return std::nullopt;
  std::ifstream in(spec);
  if (!in) throw param_error("cannot open measure file: " + spec);
  json j;
  in >> j;
  return j.at("n").get<int>();
}

UVector parse_uvector(const std::string& csv) {
  std::vector<double> u;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) u.push_back(std::stod(tok));
  if (u.size() < 2) throw param_error("u-vector needs at least two entries");
  const int n = static_cast<int>(u.size()) - 1;
  return UVector(n, std::move(u));
}

MixingLaw parse_atoms(const std::string& spec) {
  MixingLaw law;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw param_error("atom must be w:probability");
    law.atoms.emplace_back(std::stod(tok.substr(0, colon)), std::stod(tok.substr(colon + 1)));
  }
  law.validate();
  return law;
}

struct Emitter {
  std::string command;
  json params = json::object();
  std::optional<std::uint64_t> seed;
  bool csv = false;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void operator()(const json& payload, const std::string& csv_text = "") const {
    if (csv && !csv_text.empty()) {
      std::cout << csv_text;
      return;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json record{{"command", command},
                {"params", params},
                {"build", STODOM_BUILD_ID},
                {"wall_time_s", wall},
                {"payload", payload}};
    if (seed) record["seed"] = *seed;
    std::cout << record.dump() << "\n";
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic-domination toolkit"};
  app.require_subcommand();
  int threads = 0;
  bool csv = false;
  app.add_option("--threads", threads, "cap on worker threads (0 = hardware)");
  app.add_flag("--csv", csv, "emit the tabular projection of the payload as CSV");

  auto make_emitter = [&](const std::string& command) {
    Emitter e;
    e.command = command;
    e.csv = csv;
    return e;
  };

  // ── dom ────────────────────────────────────────────────────────────────────
  auto* dom = app.add_subcommand("dom", "exact finite-lattice domination machinery");

  {
    auto* check = dom->add_subcommand("check", "Strassen domination oracle");
    auto mu = std::make_shared<std::string>();
    auto nu = std::make_shared<std::string>();
    auto n_opt = std::make_shared<int>(0);
    check->add_option("--mu", *mu, "measure (file or product:RHO)")->required();
    check->add_option("--nu", *nu, "measure (file or product:RHO)")->required();
    check->add_option("--n", *n_opt, "site count (when both measures are product specs)");
    check->callback([&, mu, nu, n_opt] {
      Emitter emit = make_emitter("dom check");
      emit.params = {{"mu", *mu}, {"nu", *nu}};
      auto n = measure_site_count(*mu);
      if (!n) n = measure_site_count(*nu);
      if (!n && *n_opt > 0) n = *n_opt;
      const FiniteMeasure m = parse_measure(*mu, n);
      const FiniteMeasure v = parse_measure(*nu, m.n);
      emit(json{{"dominates", dominates(m, v)}, {"n", m.n}});
    });
  }
  {
    auto* upsets = dom->add_subcommand("upsets", "enumerate the up-set family");
    auto n = std::make_shared<int>(3);
    auto list = std::make_shared<bool>(false);
    upsets->add_option("--n", *n, "site count (<= 5)")->required();
    upsets->add_flag("--list", *list, "include the members as configuration masks");
    upsets->callback([&, n, list] {
      Emitter emit = make_emitter("dom upsets");
      emit.params = {{"n", *n}, {"list", *list}};
      const UpSetFamily fam = enumerate_up_sets(*n);
      json payload{{"n", fam.n}, {"count", fam.sets.size()}};
      std::string csv_text = "member\n";
      if (*list) {
        payload["sets"] = fam.sets;
        for (auto m : fam.sets) csv_text += std::to_string(m) + "\n";
      }
      emit(payload, *list ? csv_text : "");
    });
  }
  {
    auto* fkg = dom->add_subcommand("fkg", "FKG lattice condition");
    auto mu = std::make_shared<std::string>();
    fkg->add_option("--mu", *mu, "measure file")->required();
    fkg->callback([&, mu] {
      Emitter emit = make_emitter("dom fkg");
      emit.params = {{"mu", *mu}};
      const FiniteMeasure m = parse_measure(*mu, measure_site_count(*mu));
      emit(json{{"fkg", fkg_lattice_check(m)}});
    });
  }
  {
    auto* dfkg = dom->add_subcommand("downward-fkg", "downward FKG (conditional association)");
    auto mu = std::make_shared<std::string>();
    dfkg->add_option("--mu", *mu, "measure file")->required();
    dfkg->callback([&, mu] {
      Emitter emit = make_emitter("dom downward-fkg");
      emit.params = {{"mu", *mu}};
      const FiniteMeasure m = parse_measure(*mu, measure_site_count(*mu));
      emit(json{{"downward_fkg", downward_fkg_check(m)}});
    });
  }

  // ── exch ───────────────────────────────────────────────────────────────────
  auto* exch = app.add_subcommand("exch", "finite exchangeable FKG laws");
  struct ExchArgs {
    std::string u_csv;
    std::string atoms;
    int n = 0;
    double rho = 0.0;
    int grid = 4001;
  };
  auto exch_uvector = [](const ExchArgs& a) {
    if (!a.u_csv.empty()) return parse_uvector(a.u_csv);
    if (!a.atoms.empty()) {
      if (a.n < 1) throw param_error("--atoms needs --n");
      return definetti_uvector(parse_atoms(a.atoms), a.n);
    }
    throw param_error("need --u or --atoms");
  };
  auto add_exch_inputs = [](CLI::App* cmd, const std::shared_ptr<ExchArgs>& a) {
    cmd->add_option("--u", a->u_csv, "u-vector entries u_0,...,u_n");
    cmd->add_option("--atoms", a->atoms, "mixing atoms w:p,w:p,...");
    cmd->add_option("--n", a->n, "sequence length for --atoms");
  };

  {
    auto* c = exch->add_subcommand("fkg", "log-convexity of the u-vector");
    auto a = std::make_shared<ExchArgs>();
    add_exch_inputs(c, a);
    c->callback([&, a] {
      Emitter emit = make_emitter("exch fkg");
      emit.params = {{"u", a->u_csv}, {"atoms", a->atoms}, {"n", a->n}};
      bool warn = false;
      const bool ok = exch_fkg_check(exch_uvector(*a), &warn);
      emit(json{{"fkg", ok}, {"interior_zero_warning", warn}});
    });
  }
  {
    auto* c = exch->add_subcommand("dominates", "all-zero domination criterion");
    auto a = std::make_shared<ExchArgs>();
    add_exch_inputs(c, a);
    c->add_option("--rho", a->rho, "product density")->required();
    c->callback([&, a] {
      Emitter emit = make_emitter("exch dominates");
      emit.params = {{"u", a->u_csv}, {"atoms", a->atoms}, {"n", a->n}, {"rho", a->rho}};
      emit(json{{"dominates", exch_dominates(exch_uvector(*a), a->rho)}});
    });
  }
  {
    auto* c = exch->add_subcommand("tails", "count-tail domination criterion");
    auto a = std::make_shared<ExchArgs>();
    add_exch_inputs(c, a);
    c->add_option("--rho", a->rho, "product density")->required();
    c->callback([&, a] {
      Emitter emit = make_emitter("exch tails");
      emit.params = {{"u", a->u_csv}, {"atoms", a->atoms}, {"n", a->n}, {"rho", a->rho}};
      emit(json{{"dominates", count_tail_dominance(exch_uvector(*a), a->rho)}});
    });
  }
  {
    auto* c = exch->add_subcommand("maxrho", "largest dominated product density");
    auto a = std::make_shared<ExchArgs>();
    add_exch_inputs(c, a);
    c->callback([&, a] {
      Emitter emit = make_emitter("exch maxrho");
      emit.params = {{"u", a->u_csv}, {"atoms", a->atoms}, {"n", a->n}};
      json payload;
      if (!a->atoms.empty() && a->u_csv.empty()) {
        payload["rho_max"] = max_density_mixture(parse_atoms(a->atoms), a->n);
        payload["rho_max_uvector"] = max_density(exch_uvector(*a));
      } else {
        payload["rho_max"] = max_density(exch_uvector(*a));
      }
      emit(payload);
    });
  }
  {
    auto* c = exch->add_subcommand("conditional", "infimum conditional probability of a 1");
    auto a = std::make_shared<ExchArgs>();
    add_exch_inputs(c, a);
    c->callback([&, a] {
      Emitter emit = make_emitter("exch conditional");
      emit.params = {{"u", a->u_csv}, {"atoms", a->atoms}, {"n", a->n}};
      emit(json{{"inf_conditional", conditional_analogue(exch_uvector(*a))}});
    });
  }
  {
    auto* c = exch->add_subcommand("extendible", "grid feasibility of a mixing law");
    auto a = std::make_shared<ExchArgs>();
    add_exch_inputs(c, a);
    c->add_option("--grid", a->grid, "grid resolution (default 4001)");
    c->callback([&, a] {
      Emitter emit = make_emitter("exch extendible");
      emit.params = {{"u", a->u_csv}, {"atoms", a->atoms}, {"n", a->n}, {"grid", a->grid}};
      emit(json{{"extendible", extendible_check(exch_uvector(*a), a->grid)}});
    });
  }
  {
    auto* c = exch->add_subcommand("definetti", "u-vector of a mixture");
    auto a = std::make_shared<ExchArgs>();
    add_exch_inputs(c, a);
    c->callback([&, a] {
      Emitter emit = make_emitter("exch definetti");
      emit.params = {{"atoms", a->atoms}, {"n", a->n}};
      if (a->atoms.empty()) throw param_error("definetti needs --atoms");
      const UVector u = definetti_uvector(parse_atoms(a->atoms), a->n);
      emit(json(u));
    });
  }

  // ── contact ────────────────────────────────────────────────────────────────
  auto* contact = app.add_subcommand("contact", "asymmetric contact process estimators");
  {
    auto* c = contact->add_subcommand("an", "block-zero probability via duality");
    auto p = std::make_shared<AnParams>();
    c->add_option("--beta", p->beta)->required();
    c->add_option("--p", p->p)->required();
    c->add_option("--n", p->n)->required();
    c->add_option("--reps", p->replicas)->required();
    c->add_option("--horizon", p->horizon);
    c->add_option("--seed", p->seed)->required();
    c->callback([&, p] {
      Emitter emit = make_emitter("contact an");
      p->threads = threads;
      emit.seed = p->seed;
      emit.params = {{"beta", p->beta}, {"p", p->p},       {"n", p->n},
                     {"horizon", p->horizon}, {"reps", p->replicas}, {"seed", p->seed}};
      const AnReport r = a_n_estimate(*p);
      json payload = estimate_json(r.estimate);
      payload["bias"] = r.survived_fraction;
      payload["segment_sites"] = r.segment_sites;
      payload["params"] = emit.params;
      emit(payload);
    });
  }
  {
    auto* c = contact->add_subcommand("rho-interval", "certified density interval");
    auto p = std::make_shared<RhoIntervalParams>();
    c->add_option("--beta", p->beta)->required();
    c->add_option("--p", p->p)->required();
    c->add_option("--nmax", p->n_max);
    c->add_option("--reps", p->replicas)->required();
    c->add_option("--horizon", p->horizon);
    c->add_option("--seed", p->seed)->required();
    c->add_option("--confidence", p->confidence);
    c->callback([&, p] {
      Emitter emit = make_emitter("contact rho-interval");
      p->threads = threads;
      emit.seed = p->seed;
      emit.params = {{"beta", p->beta}, {"p", p->p},           {"nmax", p->n_max},
                     {"horizon", p->horizon}, {"reps", p->replicas}, {"seed", p->seed},
                     {"confidence", p->confidence}};
      const RhoInterval r = rho_interval(*p);
      json blocks = json::array();
      std::string csv_text = "n,point,stderr,bias\n";
      for (std::size_t i = 0; i < r.block_estimates.size(); ++i) {
        const AnReport& b = r.block_estimates[i];
        json e = estimate_json(b.estimate);
        e["n"] = b.params.n;
        e["bias"] = b.survived_fraction;
        blocks.push_back(e);
        csv_text += std::to_string(b.params.n) + "," + std::to_string(b.estimate.point) + "," +
                    std::to_string(b.estimate.stderr_value) + "," +
                    std::to_string(b.survived_fraction) + "\n";
      }
      emit(json{{"rho_lo", r.rho_lo}, {"rho_hi", r.rho_hi}, {"blocks", blocks},
                {"params", emit.params}},
           csv_text);
    });
  }
  {
    auto* c = contact->add_subcommand("star", "half-line with leaves experiment");
    auto p = std::make_shared<StarParams>();
    c->add_option("--lambda", p->lambda)->required();
    c->add_option("--nstar", p->n_star)->required();
    c->add_option("--reps", p->replicas)->required();
    c->add_option("--seed", p->seed)->required();
    c->add_option("--T", p->sample_time);
    c->callback([&, p] {
      Emitter emit = make_emitter("contact star");
      p->threads = threads;
      emit.seed = p->seed;
      emit.params = {{"lambda", p->lambda}, {"nstar", p->n_star}, {"reps", p->replicas},
                     {"T", p->sample_time},  {"seed", p->seed}};
      const StarReport r = star_graph_experiment(*p);
      emit(json{{"p_all_zero", estimate_json(r.p_all_zero)},
                {"rho_certified", r.rho_certified},
                {"bound_pow", r.bound_pow},
                {"p_origin_quiet", estimate_json(r.p_origin_quiet)},
                {"analytic_lower", r.analytic_lower},
                {"m_window", r.m_window},
                {"half_line_length", r.half_line_length},
                {"params", emit.params}});
    });
  }
  {
    auto* c = contact->add_subcommand("rectangle", "space-time rectangle comparison");
    auto p = std::make_shared<RectangleParams>();
    c->add_option("--lambda", p->lambda)->required();
    c->add_option("--rho", p->rho)->required();
    c->add_option("--r", p->flip_rate);
    c->add_option("--N", p->n_sites)->required();
    c->add_option("--T", p->duration)->required();
    c->add_option("--reps", p->replicas)->required();
    c->add_option("--seed", p->seed)->required();
    c->add_option("--burn", p->burn_in);
    c->callback([&, p] {
      Emitter emit = make_emitter("contact rectangle");
      p->threads = threads;
      emit.seed = p->seed;
      emit.params = {{"lambda", p->lambda}, {"rho", p->rho},        {"r", p->flip_rate},
                     {"N", p->n_sites},     {"T", p->duration},     {"reps", p->replicas},
                     {"seed", p->seed},     {"burn", p->burn_in}};
      const RectangleReport r = spacetime_rectangle(*p);
      emit(json{{"flip_exact", r.flip_exact},
                {"contact_estimate", estimate_json(r.contact_estimate)},
                {"analytic_factor", r.analytic_factor},
                {"a_hat_block", r.a_hat_n},
                {"renewal_reference", r.renewal_reference},
                {"burn", r.burn_in},
                {"params", emit.params}});
    });
  }
  {
    auto* c = contact->add_subcommand("renewal", "exact renewal block probability");
    auto beta = std::make_shared<double>();
    auto n = std::make_shared<int>();
    c->add_option("--beta", *beta)->required();
    c->add_option("--n", *n)->required();
    c->callback([&, beta, n] {
      Emitter emit = make_emitter("contact renewal");
      emit.params = {{"beta", *beta}, {"n", *n}};
      emit(json{{"value", renewal_block_prob(*beta, *n)},
                {"certified_rho", certified_rho(*beta, 0.5)}});
    });
  }
  {
    auto* c = contact->add_subcommand("sim", "event-driven run on a segment");
    struct SimArgs {
      double beta = 4.0, p = 0.5, horizon = 10.0;
      int radius = 20;
      std::string init = "single";
      std::uint64_t seed = 1;
    };
    auto a = std::make_shared<SimArgs>();
    c->add_option("--beta", a->beta)->required();
    c->add_option("--p", a->p)->required();
    c->add_option("--L", a->radius, "segment radius (sites -L..L)");
    c->add_option("--T", a->horizon)->required();
    c->add_option("--init", a->init, "single | all-ones");
    c->add_option("--seed", a->seed)->required();
    c->callback([&, a] {
      Emitter emit = make_emitter("contact sim");
      emit.seed = a->seed;
      emit.params = {{"beta", a->beta}, {"p", a->p},       {"L", a->radius},
                     {"T", a->horizon}, {"init", a->init}, {"seed", a->seed}};
      const GraphSpec g = GraphSpec::z_segment(-a->radius, a->radius, a->beta, a->p);
      BitConfig init(static_cast<std::size_t>(g.vertex_count), a->init == "all-ones" ? 1 : 0);
      if (a->init == "single") init[static_cast<std::size_t>(a->radius)] = 1;
      else if (a->init != "all-ones") throw param_error("init must be single or all-ones");
      const Trajectory traj = simulate(g, init, a->horizon, a->seed);
      int ones = 0;
      for (auto b : traj.final_state) ones += b;
      emit(json{{"events", traj.events.size()},
                {"final_ones", ones},
                {"extinct", ones == 0},
                {"sites", g.vertex_count}});
    });
  }

  // ── ising ──────────────────────────────────────────────────────────────────
  auto* ising = app.add_subcommand("ising", "Ising states on the tree and the plane");
  auto* tree = ising->add_subcommand("tree", "degree-3 tree as a tree-indexed chain");
  {
    auto* c = tree->add_subcommand("tpoint", "positive fixed point of the recursion");
    auto j = std::make_shared<double>();
    c->add_option("--J", *j)->required();
    c->callback([&, j] {
      Emitter emit = make_emitter("ising tree tpoint");
      emit.params = {{"J", *j}};
      const FixedPointResult r = solve_t(*j);
      emit(json{{"J", r.j}, {"t", r.t}, {"residual", r.residual},
                {"bracket", {r.bracket_lo, r.bracket_hi}},
                {"critical_J", tree_critical_j()}});
    });
  }
  {
    auto* c = tree->add_subcommand("matrices", "plus/minus/free transition matrices");
    auto j = std::make_shared<double>();
    c->add_option("--J", *j)->required();
    c->callback([&, j] {
      Emitter emit = make_emitter("ising tree matrices");
      emit.params = {{"J", *j}};
      const ChainTriple c3 = chain_matrices(*j);
      auto mat = [](const TreeChainMatrix& m) {
        return json{{"p00", m.p00()}, {"p01", m.p01}, {"p10", m.p10()}, {"p11", m.p11},
                    {"pi0", m.pi0()}, {"pi1", m.pi1()}};
      };
      std::string csv_text = "state,p00,p01,p10,p11\n";
      char buf[160];
      auto row = [&](const char* name, const TreeChainMatrix& m) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g\n", name, m.p00(), m.p01, m.p10(), m.p11);
        csv_text += buf;
      };
      row("plus", c3.plus);
      row("minus", c3.minus);
      row("free", c3.free);
      emit(json{{"plus", mat(c3.plus)}, {"minus", mat(c3.minus)}, {"free", mat(c3.free)},
                {"t", solve_t(*j).t}},
           csv_text);
    });
  }
  {
    auto* c = tree->add_subcommand("alpha", "domination threshold J2 - t_{J2}");
    auto j2 = std::make_shared<double>();
    c->add_option("--J2", *j2)->required();
    c->callback([&, j2] {
      Emitter emit = make_emitter("ising tree alpha");
      emit.params = {{"J2", *j2}};
      emit(json{{"alpha", alpha(*j2)}});
    });
  }
  {
    auto* c = tree->add_subcommand("rho", "largest dominated product density");
    auto j = std::make_shared<double>();
    auto state = std::make_shared<std::string>("plus");
    c->add_option("--J", *j)->required();
    c->add_option("--state", *state, "plus | minus | free");
    c->callback([&, j, state] {
      Emitter emit = make_emitter("ising tree rho");
      emit.params = {{"J", *j}, {"state", *state}};
      const ChainTriple c3 = chain_matrices(*j);
      const TreeChainMatrix& m = *state == "plus" ? c3.plus
                                : *state == "minus" ? c3.minus
                                : *state == "free"  ? c3.free
                                                    : throw param_error("state must be plus|minus|free");
      emit(json{{"rho_max", max_product_density(m)}, {"state", *state}});
    });
  }
  {
    auto* c = tree->add_subcommand("sample", "sample the chain on a finite ball");
    auto j = std::make_shared<double>();
    auto state = std::make_shared<std::string>("plus");
    auto depth = std::make_shared<int>(2);
    auto seed = std::make_shared<std::uint64_t>();
    c->add_option("--J", *j)->required();
    c->add_option("--state", *state);
    c->add_option("--depth", *depth);
    c->add_option("--seed", *seed)->required();
    c->callback([&, j, state, depth, seed] {
      Emitter emit = make_emitter("ising tree sample");
      emit.seed = *seed;
      emit.params = {{"J", *j}, {"state", *state}, {"depth", *depth}, {"seed", *seed}};
      const ChainTriple c3 = chain_matrices(*j);
      const TreeChainMatrix& m = *state == "plus" ? c3.plus
                                : *state == "minus" ? c3.minus
                                : *state == "free"  ? c3.free
                                                    : throw param_error("state must be plus|minus|free");
      const BitConfig cfg = sample_tree_chain(m, *depth, *seed);
      emit(json{{"config", cfg},
                {"vertices", cfg.size()},
                {"all_zero_prob", all_zero_prob_closed_form(m, *depth)}});
    });
  }

  auto* z2 = ising->add_subcommand("z2", "plus/minus states on the square lattice");
  {
    auto* c = z2->add_subcommand("rho", "maximal dominated density from the pressure");
    auto j = std::make_shared<double>();
    auto nodes = std::make_shared<int>(64);
    c->add_option("--J", *j)->required();
    c->add_option("--quad-nodes", *nodes);
    c->callback([&, j, nodes] {
      Emitter emit = make_emitter("ising z2 rho");
      emit.params = {{"J", *j}, {"quad_nodes", *nodes}};
      QuadratureSpec spec;
      spec.nodes = *nodes;
      const QuadratureResult s = sigma_quadrature(*j, spec);
      emit(json{{"rho_max", 1.0 - std::exp(2.0 * *j) / (2.0 * std::exp(s.value))},
                {"sigma", s.value},
                {"quad_error", s.error_estimate},
                {"quad_nodes", s.nodes_used}});
    });
  }
  {
    auto* c = z2->add_subcommand("blockrate", "all-zero window rate under a boxed state");
    auto p = std::make_shared<LatticeGibbsParams>();
    auto window = std::make_shared<int>(2);
    auto boundary = std::make_shared<std::string>("plus");
    c->add_option("--J", p->coupling)->required();
    c->add_option("--n", *window)->required();
    c->add_option("--L", p->side)->required();
    c->add_option("--sweeps", p->sweeps)->required();
    c->add_option("--burn", p->burn_in);
    c->add_option("--thin", p->thin);
    c->add_option("--boundary", *boundary, "plus | minus");
    c->add_option("--seed", p->seed)->required();
    c->callback([&, p, window, boundary] {
      Emitter emit = make_emitter("ising z2 blockrate");
      emit.seed = p->seed;
      p->boundary = *boundary == "minus" ? Boundary::minus : Boundary::plus;
      emit.params = {{"J", p->coupling}, {"n", *window},      {"L", p->side},
                     {"sweeps", p->sweeps}, {"burn", p->burn_in}, {"thin", p->thin},
                     {"boundary", *boundary}, {"seed", p->seed}};
      const BlockRateReport r = block_zero_rate(p->coupling, *window, *p);
      json payload = estimate_json(r.rate);
      payload["prob_hat"] = r.prob_hat;
      payload["zero_count"] = r.zero_count;
      payload["rate_upper_bound"] = r.rate_upper_bound;
      payload["assumes"] =
          "finite-window rate approaches its large-window limit from below (FKG subadditivity)";
      payload["params"] = emit.params;
      emit(payload);
    });
  }
  {
    auto* c = z2->add_subcommand("probe-pm", "plus vs minus boundary diagnostic");
    auto p = std::make_shared<LatticeGibbsParams>();
    auto window = std::make_shared<int>(2);
    c->add_option("--J", p->coupling)->required();
    c->add_option("--n", *window)->required();
    c->add_option("--L", p->side)->required();
    c->add_option("--sweeps", p->sweeps)->required();
    c->add_option("--burn", p->burn_in);
    c->add_option("--seed", p->seed)->required();
    c->callback([&, p, window] {
      Emitter emit = make_emitter("ising z2 probe-pm");
      emit.seed = p->seed;
      emit.params = {{"J", p->coupling}, {"n", *window},      {"L", p->side},
                     {"sweeps", p->sweeps}, {"burn", p->burn_in}, {"seed", p->seed}};
      const PlusMinusProbe probe = plus_minus_probe(p->coupling, *window, *p);
      emit(json{{"plus", {{"prob_hat", probe.plus.prob_hat}, {"rate", estimate_json(probe.plus.rate)}}},
                {"minus", {{"prob_hat", probe.minus.prob_hat}, {"rate", estimate_json(probe.minus.rate)}}},
                {"ratio_rate", probe.ratio_rate},
                {"params", emit.params}});
    });
  }

  // ── perc ───────────────────────────────────────────────────────────────────
  {
    auto* perc = app.add_subcommand("perc", "site-percolation analysis of samples");
    auto* c = perc->add_subcommand("run", "crossing-frequency experiment");
    auto source = std::make_shared<std::string>();
    auto p = std::make_shared<PercParams>();
    c->add_option("--source", *source,
                  "product:RHO | contact:LAMBDA:T | ising:J:plus|minus")
        ->required();
    c->add_option("--L", p->side)->required();
    c->add_option("--reps", p->replicas)->required();
    c->add_option("--seed", p->seed)->required();
    c->callback([&, source, p] {
      Emitter emit = make_emitter("perc run");
      emit.seed = p->seed;
      emit.params = {{"source", *source}, {"L", p->side}, {"reps", p->replicas}, {"seed", p->seed}};
      p->threads = threads;
      std::stringstream ss(*source);
      std::string kind, arg1, arg2;
      std::getline(ss, kind, ':');
      std::getline(ss, arg1, ':');
      std::getline(ss, arg2, ':');
      if (kind == "product") {
        p->source.kind = PercSource::Kind::product;
        p->source.density = std::stod(arg1);
      } else if (kind == "contact") {
        p->source.kind = PercSource::Kind::contact;
        p->source.lambda = std::stod(arg1);
        if (!arg2.empty()) p->source.horizon = std::stod(arg2);
      } else if (kind == "ising") {
        p->source.kind = PercSource::Kind::ising;
        p->source.coupling = std::stod(arg1);
        p->source.boundary = arg2 == "minus" ? Boundary::minus : Boundary::plus;
      } else {
        throw param_error("source must be product:, contact: or ising:");
      }
      const PercReport r = percolation_experiment(*p);
      json payload{{"crossing_frequency", estimate_json(r.crossing_frequency)},
                   {"mean_open_fraction", r.mean_open_fraction},
                   {"params", emit.params}};
      emit(payload);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const size_error& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const param_error& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const hypothesis_error& e) {
    std::cerr << "hypothesis violation: " << e.what() << "\n";
    return 4;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
