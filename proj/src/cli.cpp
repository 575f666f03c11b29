#include "deltaring/cli.hpp"
#include "deltaring/strong_coupling.hpp"
#include "deltaring/wavefunction.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace deltaring::cli {

namespace {

using nlohmann::json;

std::string num(double v) { return fmt::format("{:.17g}", v); }

json params_json(const SystemParams& p) {
  return {{"xi", p.xi}, {"xi_b", p.xi_b}, {"ring_length", p.ring_length}};
}

std::string resolve_format(const RunConfig& cfg, const char* fallback) {
  const std::string f = cfg.output_format.empty() ? fallback : cfg.output_format;
  if (f != "json" && f != "csv")
    throw std::invalid_argument("format must be json or csv");
  return f;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

ScanResult scan(const RunConfig& cfg) {
  return scan_roots(cfg.params, cfg.window, cfg.allow_attractive);
}

CommandResult no_roots_result(const ScanResult& r) {
  std::string msg = "no roots found in the window; try a larger --k-max or --grid-n";
  for (const auto& w : r.warnings) msg += "\n" + w;
  return {no_roots, "", msg};
}

// The pair to act on: explicit --k1/--k2, otherwise the root at --root-index.
struct SelectedRoot {
  std::optional<RapidityPair> pair;
  CommandResult failure;
};

SelectedRoot select_root(const RunConfig& cfg) {
  const auto lens = scattering_lengths(cfg.params);
  if (cfg.k1 || cfg.k2) {
    if (!(cfg.k1 && cfg.k2))
      return {std::nullopt, {usage, "", "--k1 and --k2 must be given together"}};
    return {make_pair(*cfg.k1, *cfg.k2, lens, cfg.params.ring_length), {}};
  }
  const auto r = scan(cfg);
  if (r.roots.empty()) return {std::nullopt, no_roots_result(r)};
  if (cfg.root_index < 0 || cfg.root_index >= static_cast<int>(r.roots.size()))
    return {std::nullopt,
            {usage, "",
             fmt::format("root index {} out of range (found {} roots)",
                         cfg.root_index, r.roots.size())}};
  return {r.roots[cfg.root_index], {}};
}

json pair_json(const RapidityPair& p) {
  return {{"k1", p.k1}, {"k2", p.k2}, {"energy", p.energy},
          {"residual_1", p.residual_1}, {"residual_2", p.residual_2}};
}

std::vector<double> read_matched_energies(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open match file " + path);
  const json j = json::parse(in);
  std::vector<double> energies;
  for (const auto& r : j.at("roots")) energies.push_back(r.at("energy").get<double>());
  return energies;
}

OrbitalPair parse_pair(const RunConfig& cfg) {
  const auto spectrum = orbital_wavenumbers(cfg.params.xi_b, 16, cfg.params.ring_length);
  if (cfg.pair == "auto") {
    const double xi_top = *std::max_element(cfg.xi_samples.begin(), cfg.xi_samples.end());
    SystemParams top = cfg.params;
    top.xi = xi_top;
    const auto r = scan_roots(top, cfg.window, cfg.allow_attractive);
    if (r.roots.empty()) throw NumericalError("no root to anchor the branch");
    return tonks_pair_of(r.roots.front(), top);
  }
  int i = -1, j = -1;
  char comma = 0;
  std::istringstream is(cfg.pair);
  if (!(is >> i >> comma >> j) || comma != ',' || i < 0 || j <= i ||
      j >= static_cast<int>(spectrum.kappas.size()))
    throw std::invalid_argument("--pair expects auto or i,j with 0 <= i < j < 16");
  if (spectrum.parities[i] != spectrum.parities[j])
    throw std::invalid_argument("--pair orbitals must share parity");
  for (const auto& p : allowed_pairs(spectrum))
    if (p.first == i && p.second == j) return p;
  throw std::invalid_argument("--pair not an allowed pair");
}

}  // namespace

CommandResult cmd_spectrum(const RunConfig& cfg) {
  const auto format = resolve_format(cfg, "json");
  const auto r = scan(cfg);
  if (r.roots.empty()) return no_roots_result(r);
  CommandResult out;
  if (format == "csv") {
    if (cfg.emit_contours)
      throw std::invalid_argument("--emit-contours needs --format json");
    std::string doc = "index,k1,k2,energy,residual_1,residual_2,norm\n";
    for (std::size_t i = 0; i < r.roots.size(); ++i) {
      const auto& p = r.roots[i];
      doc += fmt::format("{},{},{},{},{},{},{}\n", i, num(p.k1), num(p.k2),
                         num(p.energy), num(p.residual_1), num(p.residual_2),
                         num(r.norms[i]));
    }
    out.document = doc;
    return out;
  }
  json roots = json::array();
  for (std::size_t i = 0; i < r.roots.size(); ++i) {
    json rec = pair_json(r.roots[i]);
    rec["index"] = i;
    rec["norm"] = r.norms[i];
    roots.push_back(rec);
  }
  json dropped = json::array();
  for (const auto& d : r.dropped)
    dropped.push_back({{"seed_k1", d.seed_k1}, {"seed_k2", d.seed_k2}, {"reason", d.reason}});
  json doc = {{"params", params_json(cfg.params)},
              {"window",
               {{"k_max", cfg.window.k_max}, {"grid_n", cfg.window.grid_n},
                {"newton_tol", cfg.window.newton_tol},
                {"dedup_tol", cfg.window.dedup_tol}}},
              {"roots", roots},
              {"dropped", dropped},
              {"warnings", r.warnings}};
  if (cfg.emit_contours) {
    const auto f = residual_fields(cfg.params, cfg.window.k_max, cfg.contour_n);
    const int n = cfg.contour_n;
    json r1 = json::array(), r2 = json::array();
    for (int i = 0; i < n; ++i) {
      r1.push_back(std::vector<double>(f.residual_1.begin() + i * n,
                                       f.residual_1.begin() + (i + 1) * n));
      r2.push_back(std::vector<double>(f.residual_2.begin() + i * n,
                                       f.residual_2.begin() + (i + 1) * n));
    }
    doc["contours"] = {{"k", f.k}, {"residual_1", r1}, {"residual_2_reduced", r2}};
  }
  out.document = dump(doc);
  return out;
}

CommandResult cmd_wavefunction(const RunConfig& cfg) {
  const auto format = resolve_format(cfg, "csv");
  if (cfg.grid_points < 2) throw std::invalid_argument("--n must be >= 2");
  const auto sel = select_root(cfg);
  if (!sel.pair) return sel.failure;
  const auto ev = normalize(EigenstateEvaluator(
      *sel.pair, scattering_lengths(cfg.params), cfg.params.ring_length));
  const auto grid = sample_grid(ev, cfg.grid_points);
  const int n = grid.n;
  CommandResult out;
  if (format == "csv") {
    std::string doc = "x1,x2,psi\n";
    doc.reserve(static_cast<std::size_t>(n) * n * 64);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        doc += fmt::format("{},{},{}\n", num(grid.axis[i]), num(grid.axis[j]),
                           num(grid.psi[static_cast<std::size_t>(i) * n + j]));
    out.document = std::move(doc);
    return out;
  }
  json rows = json::array();
  for (int i = 0; i < n; ++i)
    rows.push_back(std::vector<double>(grid.psi.begin() + i * n,
                                       grid.psi.begin() + (i + 1) * n));
  out.document = dump({{"params", params_json(cfg.params)},
                       {"root", pair_json(*sel.pair)},
                       {"n", n},
                       {"axis", grid.axis},
                       {"psi", rows}});
  return out;
}

CommandResult cmd_verify(const RunConfig& cfg) {
  resolve_format(cfg, "json");
  if (cfg.output_format == "csv")
    throw std::invalid_argument("verify writes json only");
  const auto sel = select_root(cfg);
  if (!sel.pair) return sel.failure;
  const auto ev = normalize(EigenstateEvaluator(
      *sel.pair, scattering_lengths(cfg.params), cfg.params.ring_length));
  const auto tol = cfg.tol ? ContractTolerances::uniform(*cfg.tol) : ContractTolerances{};
  const auto rep = verify_contracts(ev, tol, cfg.probes, cfg.seed);
  json doc = {
      {"params", params_json(cfg.params)},
      {"root", pair_json(*sel.pair)},
      {"probes", rep.probes},
      {"seed", cfg.seed},
      {"peak", rep.peak},
      {"tolerances",
       {{"symmetry", tol.symmetry}, {"jump", tol.jump},
        {"schrodinger", tol.schrodinger}, {"periodicity", tol.periodicity},
        {"node", tol.node}}},
      {"errors",
       {{"jump_diagonal", rep.jump_diagonal},
        {"jump_barrier_x1", rep.jump_barrier_x1},
        {"jump_barrier_x2", rep.jump_barrier_x2},
        {"symmetry_bosonic", rep.symmetry_bosonic},
        {"symmetry_inversion", rep.symmetry_inversion},
        {"symmetry_antidiagonal", rep.symmetry_antidiagonal},
        {"symmetry_translation", rep.symmetry_translation},
        {"periodicity", rep.periodicity},
        {"schrodinger", rep.schrodinger},
        {"node", rep.node}}},
      {"checks",
       {{"symmetry", rep.symmetry() < tol.symmetry},
        {"jump", rep.jump() < tol.jump},
        {"schrodinger", rep.schrodinger < tol.schrodinger},
        {"periodicity", rep.periodicity < tol.periodicity},
        {"node", rep.node < tol.node}}},
      {"passed", rep.passed()}};
  CommandResult out;
  out.document = dump(doc);
  if (!rep.passed()) {
    out.exit_code = contract_violation;
    out.message = "contract check failed";
  }
  return out;
}

CommandResult cmd_expansion(const RunConfig& cfg) {
  const auto format = resolve_format(cfg, "json");
  if (cfg.xi_samples.empty()) throw std::invalid_argument("--xi-samples is empty");
  if (cfg.params.xi_b == 0.0) throw std::domain_error("expansion singular at zero barrier");
  SystemParams checked = cfg.params;
  checked.xi = *std::max_element(cfg.xi_samples.begin(), cfg.xi_samples.end());
  validate(checked, cfg.allow_attractive);
  const double L = cfg.params.ring_length;
  const auto branch = parse_pair(cfg);
  const auto roots = track_branch(cfg.params.xi_b, branch, cfg.xi_samples, L);
  const auto coeff = expansion_coefficients(branch.eta1, branch.eta2, cfg.params.xi_b);

  json rows = json::array();
  std::string csv =
      "xi,k1,k2,e_exact,e_expansion,leading,first,second,difference,trusted\n";
  for (std::size_t i = 0; i < roots.size(); ++i) {
    ExpansionParams ep{branch.eta1, branch.eta2, cfg.xi_samples[i], cfg.params.xi_b, L};
    const auto e = expansion_energy(ep);
    const double diff = roots[i].energy - e.total;
    rows.push_back({{"xi", cfg.xi_samples[i]},
                    {"k1", roots[i].k1},
                    {"k2", roots[i].k2},
                    {"e_exact", roots[i].energy},
                    {"e_expansion", e.total},
                    {"leading", e.leading},
                    {"first", e.first},
                    {"second", e.second},
                    {"difference", diff},
                    {"trusted", e.trusted}});
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", num(cfg.xi_samples[i]),
                       num(roots[i].k1), num(roots[i].k2), num(roots[i].energy),
                       num(e.total), num(e.leading), num(e.first), num(e.second),
                       num(diff), e.trusted ? 1 : 0);
  }
  json fit_json = nullptr;
  const bool fittable =
      cfg.xi_samples.size() >= 4 &&
      std::all_of(cfg.xi_samples.begin(), cfg.xi_samples.end(),
                  [](double x) { return x >= 100.0; });
  if (fittable) {
    const auto fit = fit_coefficients(cfg.params, cfg.xi_samples, branch);
    fit_json = {{"c0", fit.c0}, {"c1", fit.c1}, {"c2", fit.c2},
                {"c3", fit.c3}, {"residual", fit.residual}};
  }
  CommandResult out;
  if (format == "csv") {
    out.document = csv;
    return out;
  }
  json doc = {{"params", params_json(cfg.params)},
              {"branch",
               {{"eta1", branch.eta1},
                {"eta2", branch.eta2},
                {"parity", branch.barrier_coupled() ? "even" : "odd"},
                {"tonks_energy", branch.tonks_energy},
                {"formula_applicable", branch.barrier_coupled()}}},
              {"rows", rows},
              {"formula", {{"c0", coeff.c0}, {"c1", coeff.c1}, {"c2", coeff.c2}}},
              {"fit", fit_json}};
  out.document = dump(doc);
  return out;
}

CommandResult cmd_oracle(const RunConfig& cfg) {
  resolve_format(cfg, "json");
  if (cfg.output_format == "csv")
    throw std::invalid_argument("oracle writes json only");
  const auto res = odd_sector_spectrum(cfg.params, cfg.oracle_cfg, cfg.allow_attractive);
  json levels = json::array();
  for (std::size_t i = 0; i < res.energies.size(); ++i)
    levels.push_back({{"index", i},
                      {"energy", res.energies[i]},
                      {"estimated_error", res.estimated_error[i]},
                      {"bound", static_cast<bool>(res.bound[i])},
                      {"fine", res.fine[i]},
                      {"coarse", res.coarse[i]}});
  json doc = {{"params", params_json(cfg.params)},
              {"config",
               {{"grid_n", res.grid_n},
                {"coarse_n", res.coarse_n},
                {"levels", cfg.oracle_cfg.levels},
                {"extrapolated", res.extrapolated}}},
              {"levels", levels}};
  if (!cfg.match_path.empty()) {
    const auto energies = read_matched_energies(cfg.match_path);
    auto tolerance = [&](std::size_t level) {
      return std::max(0.01 * std::abs(res.energies[level]), 3.0 * res.estimated_error[level]);
    };
    json by_root = json::array();
    for (std::size_t r = 0; r < energies.size(); ++r) {
      std::size_t best = 0;
      for (std::size_t l = 1; l < res.energies.size(); ++l)
        if (std::abs(res.energies[l] - energies[r]) < std::abs(res.energies[best] - energies[r]))
          best = l;
      const double d = std::abs(res.energies[best] - energies[r]);
      by_root.push_back({{"root", r}, {"energy", energies[r]}, {"level", best},
                         {"level_energy", res.energies[best]}, {"difference", d},
                         {"matched", d <= tolerance(best)}});
    }
    json by_level = json::array();
    for (std::size_t l = 0; l < res.energies.size(); ++l) {
      std::optional<std::size_t> best;
      for (std::size_t r = 0; r < energies.size(); ++r)
        if (!best || std::abs(energies[r] - res.energies[l]) < std::abs(energies[*best] - res.energies[l]))
          best = r;
      json rec = {{"level", l}, {"energy", res.energies[l]}};
      if (best) {
        const double d = std::abs(energies[*best] - res.energies[l]);
        rec["root"] = *best;
        rec["difference"] = d;
        rec["matched"] = d <= tolerance(l);
      } else {
        rec["matched"] = false;
      }
      by_level.push_back(rec);
    }
    doc["match"] = {{"by_root", by_root}, {"by_level", by_level}};
  }
  if (cfg.cusp) {
    const auto state = odd_sector_ground_state(cfg.params, cfg.oracle_cfg.grid_n,
                                               cfg.allow_attractive);
    const auto c = contact_cusp(state, cfg.params);
    doc["cusp"] = {{"grid_n", state.grid_n}, {"ground_energy", state.energy},
                   {"median_slope", c.median_slope}, {"expected", c.expected},
                   {"samples", c.samples}};
  }
  CommandResult out;
  out.document = dump(doc);
  return out;
}

CommandResult execute(const RunConfig& cfg) {
  try {
    if (cfg.subcommand == "spectrum") return cmd_spectrum(cfg);
    if (cfg.subcommand == "wavefunction") return cmd_wavefunction(cfg);
    if (cfg.subcommand == "verify") return cmd_verify(cfg);
    if (cfg.subcommand == "expansion") return cmd_expansion(cfg);
    if (cfg.subcommand == "oracle") return cmd_oracle(cfg);
    return {usage, "", "unknown subcommand '" + cfg.subcommand + "'"};
  } catch (const NumericalError& e) {
    return {numerical_failure, "", e.what()};
  } catch (const std::domain_error& e) {
    return {numerical_failure, "", e.what()};
  } catch (const std::invalid_argument& e) {
    return {usage, "", e.what()};
  } catch (const json::exception& e) {
    return {usage, "", e.what()};
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two δ-interacting bosons on a ring with a δ barrier, inversion-odd sector"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub, bool needs_xi) {
    auto* xi = sub->add_option("--xi", cfg.params.xi, "particle-particle coupling ξ");
    if (needs_xi) xi->required();
    sub->add_option("--xi-b", cfg.params.xi_b, "particle-barrier coupling ξ_B")->required();
    sub->add_option("--ring-length", cfg.params.ring_length, "ring length L");
    sub->add_option("--output", cfg.output_path, "output file (default: stdout)");
    sub->add_option("--format", cfg.output_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--allow-attractive", cfg.allow_attractive,
                  "accept non-positive couplings");
  };
  auto window = [&](CLI::App* sub) {
    sub->add_option("--k-max", cfg.window.k_max, "upper bound on k2 (1/L)");
    sub->add_option("--grid-n", cfg.window.grid_n, "scan lattice per axis");
    sub->add_option("--newton-tol", cfg.window.newton_tol, "root residual tolerance");
  };
  auto root_choice = [&](CLI::App* sub) {
    sub->add_option("--root-index", cfg.root_index, "energy rank of the root");
    sub->add_option("--k1", cfg.k1, "explicit rapidity k1 (with --k2)");
    sub->add_option("--k2", cfg.k2, "explicit rapidity k2 (with --k1)");
  };

  auto* spectrum = app.add_subcommand("spectrum", "enumerate rapidity pairs");
  common(spectrum, true);
  window(spectrum);
  spectrum->add_flag("--emit-contours", cfg.emit_contours, "include residual fields");
  spectrum->add_option("--contour-n", cfg.contour_n, "residual field resolution");

  auto* wave = app.add_subcommand("wavefunction", "normalized eigenstate on a grid");
  common(wave, true);
  window(wave);
  root_choice(wave);
  wave->add_option("--n", cfg.grid_points, "grid points per axis");

  auto* verify = app.add_subcommand("verify", "contract report for one root");
  common(verify, true);
  window(verify);
  root_choice(verify);
  verify->add_option("--tol", cfg.tol, "tolerance for jump, periodicity, Schrödinger");
  verify->add_option("--seed", cfg.seed, "probe-point seed");
  verify->add_option("--probes", cfg.probes, "probe count");

  auto* expansion = app.add_subcommand("expansion", "strong-coupling expansion vs exact");
  common(expansion, false);
  window(expansion);
  expansion->add_option("--xi-samples", cfg.xi_samples, "couplings to evaluate")
      ->delimiter(',');
  expansion->add_option("--pair", cfg.pair, "auto or orbital indices i,j");

  auto* oracle = app.add_subcommand("oracle", "finite-difference odd-sector levels");
  common(oracle, true);
  oracle->add_option("--grid-n", cfg.oracle_cfg.grid_n, "grid points per axis");
  oracle->add_option("--levels", cfg.oracle_cfg.levels, "levels to compute");
  oracle->add_flag("--no-extrapolate{false}", cfg.oracle_cfg.extrapolate,
                   "report raw fine-grid levels");
  oracle->add_option("--match", cfg.match_path, "spectrum json to compare against");
  oracle->add_flag("--cusp", cfg.cusp, "report the ground-state contact cusp");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream sink_out, sink_err;
    const int code = app.exit(e, sink_out, sink_err);
    out << sink_out.str();
    err << sink_err.str();
    return code == 0 ? ok : usage;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  const auto result = execute(cfg);
  if (!result.message.empty()) err << result.message << "\n";
  if (!result.document.empty()) {
    if (cfg.output_path.empty()) {
      out << result.document;
    } else {
      std::ofstream file(cfg.output_path, std::ios::binary);
      if (!file) {
        err << "cannot write " << cfg.output_path << "\n";
        return usage;
      }
      file << result.document;
    }
  }
  return result.exit_code;
}

}  // namespace deltaring::cli
