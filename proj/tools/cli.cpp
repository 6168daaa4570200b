#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "cfqkd/analytic.hpp"
#include "cfqkd/errors.hpp"
#include "cfqkd/montecarlo.hpp"
#include "cfqkd/optimizer.hpp"

namespace cfqkd::cli {
namespace {

enum class Format { Markdown, Csv };

// Shortest text that parses back to the same double.
std::string full(double v) {
  std::ostringstream s;
  s << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return s.str();
}

std::string fixed5(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(5) << v;
  return s.str();
}

std::string sig6(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::string format = "markdown";
};

struct ParamFlags {
  std::optional<double> x, y, z, z0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Config file (key = value per line)");
  cmd->add_option("--set", c.sets, "Override a config key, e.g. --set mean_photon_number=0")->type_name("KEY=VALUE");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"markdown", "csv"}));
}

void add_params(CLI::App* cmd, ParamFlags& p) {
  cmd->add_option("--x", p.x, "Probability Eve measures Alice's pulse");
  cmd->add_option("--y", p.y, "Forced D2 click probability (default: solved from x)");
  cmd->add_option("--z", p.z, "Faked-state probability after a vacuum measurement");
  cmd->add_option("--z0", p.z0, "Forced D0 click probability (default: solved from x)");
}

Format format_of(const Common& c) { return c.format == "csv" ? Format::Csv : Format::Markdown; }

ProtocolConfig load(const Common& c) {
  RawConfig raw = c.config_path.empty() ? default_config() : load_config_file(c.config_path);
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError(kv, "override must look like key=value");
    apply_setting(raw, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return validate_config(raw);
}

AttackParams resolve_params(const ProtocolConfig& cfg, AttackScenario scenario, const ParamFlags& f) {
  AttackParams p;
  if (!is_combined(scenario)) return p;
  if (!f.x) throw ValidationError("x", "required for " + std::string(to_string(scenario)));
  p.x = *f.x;
  p.validate();
  p.y = f.y ? *f.y : solve_y(cfg, p.x);
  if (scenario == AttackScenario::CombinedNoDisc) p.z = f.z.value_or(0.0);
  if (scenario == AttackScenario::CombinedD0D2) p.z0 = f.z0 ? *f.z0 : solve_z0(cfg, p.x);
  p.validate();
  return p;
}

void print_key_values(std::ostream& out, Format fmt, const std::vector<std::pair<std::string, double>>& rows) {
  if (fmt == Format::Csv) {
    for (std::size_t i = 0; i < rows.size(); ++i) out << (i ? "," : "") << rows[i].first;
    out << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) out << (i ? "," : "") << full(rows[i].second);
    out << '\n';
    return;
  }
  out << "| quantity | value |\n|---|---|\n";
  for (const auto& [k, v] : rows) out << "| " << k << " | " << sig6(v) << " |\n";
}

std::vector<std::pair<std::string, double>> stats_rows(const DetectionStats& s) {
  return {{"p_d0", s.p_d0}, {"p_d1", s.p_d1}, {"p_d2", s.p_d2}, {"p_d0_opp", s.p_d0_opp}};
}

std::vector<std::pair<std::string, double>> ratio_rows(const RatioReport& r, const AttackParams& p) {
  return {{"r_d0", r.r_d0}, {"r_d1", r.r_d1}, {"r_d2", r.r_d2}, {"r_d0_opp", r.r_d0_opp}, {"x", p.x},
          {"y", p.y},       {"z", p.z},       {"z0", p.z0},     {"max_deviation", r.max_deviation}};
}

int cmd_baseline(const Common& c, std::ostream& out) {
  print_key_values(out, format_of(c), stats_rows(baseline_stats(load(c))));
  return kOk;
}

int cmd_attack(const Common& c, const std::string& scenario_name, const ParamFlags& f, std::ostream& out) {
  const ProtocolConfig cfg = load(c);
  const AttackScenario scenario = parse_scenario(scenario_name);
  const AttackParams p = resolve_params(cfg, scenario, f);
  const DetectionStats attacked = attack_stats(cfg, scenario, p);
  auto rows = stats_rows(attacked);
  const auto ratios = ratio_rows(ratio_report(attacked, baseline_stats(cfg)), p);
  rows.insert(rows.end(), ratios.begin(), ratios.end());
  print_key_values(out, format_of(c), rows);
  return kOk;
}

int cmd_optimize(const Common& c, const std::string& scenario_name, const OptimizerOptions& opts,
                 std::ostream& out) {
  const ProtocolConfig cfg = load(c);
  const AttackScenario scenario =
      scenario_name.empty() ? combined_scenario_for(cfg.discrimination()) : parse_scenario(scenario_name);
  const OptimizationResult r = optimize(cfg, scenario, opts);
  auto rows = ratio_rows(r.report, r.params);
  rows.emplace_back("grid_step", r.grid_step);
  rows.emplace_back("evaluations", static_cast<double>(r.evaluations));
  rows.emplace_back("refined_x", r.refined_params.x);
  rows.emplace_back("refined_z", r.refined_params.z);
  rows.emplace_back("refined_max_deviation", r.refined_report.max_deviation);
  print_key_values(out, format_of(c), rows);
  return kOk;
}

int cmd_simulate(const Common& c, const std::string& scenario_name, const std::string& source_name,
                 const ParamFlags& f, std::uint64_t pulses, std::uint64_t seed, unsigned workers,
                 const std::string& records_path, std::ostream& out) {
  const ProtocolConfig cfg = load(c);
  const AttackScenario scenario = parse_scenario(scenario_name);
  const Source source = parse_source(source_name);
  const AttackParams p = resolve_params(cfg, scenario, f);
  const SimulationSummary s = simulate(cfg, scenario, p, source, pulses, seed, workers);

  DetectionStats expected;
  if (source == Source::SinglePhoton) expected = single_photon_stats(cfg);
  else if (is_combined(scenario)) expected = attack_stats(cfg, scenario, p);
  else expected = baseline_stats(cfg);
  const auto cmp = compare_to_analytic(s, expected);

  if (!records_path.empty()) {
    std::ofstream rec(records_path);
    if (!rec) throw ValidationError("records", "cannot write '" + records_path + "'");
    write_pulse_records(rec, PulseSimulator(cfg, scenario, p, source), seed, pulses);
  }

  const auto emp = s.empirical.values();
  const auto exp = expected.values();
  const std::array<std::uint64_t, 4> counts = {s.counts.d0_same, s.counts.d1, s.counts.d2, s.counts.d0_opp};
  auto z_text = [](const StatComparison& z) -> std::string {
    switch (z.status) {
      case StatComparison::Status::ExactMatch:
        return "exact-match";
      case StatComparison::Status::ExactMismatch:
        return "exact-mismatch";
      default:
        return {};
    }
  };

  if (format_of(c) == Format::Csv) {
    out << "statistic,count,empirical,expected,z\n";
    for (std::size_t i = 0; i < 4; ++i) {
      const auto special = z_text(cmp[i]);
      out << kStatNames[i] << ',' << counts[i] << ',' << full(emp[i]) << ',' << full(exp[i]) << ','
          << (special.empty() ? full(cmp[i].z) : special) << '\n';
    }
    out << "\npulses,sifted_key_length,qber,eve_key_recovery,blinded_clicks\n"
        << s.pulses << ',' << s.sifted_key_length << ',' << full(s.qber) << ',' << full(s.eve_key_recovery) << ','
        << s.blinded_clicks << '\n';
    return kOk;
  }
  out << "scenario: " << to_string(scenario) << ", source: " << to_string(source) << ", seed: " << seed << "\n\n"
      << "| statistic | count | empirical | expected | z |\n|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < 4; ++i) {
    const auto special = z_text(cmp[i]);
    out << "| " << kStatNames[i] << " | " << counts[i] << " | " << sig6(emp[i]) << " | " << sig6(exp[i]) << " | "
        << (special.empty() ? sig6(cmp[i].z) : special) << " |\n";
  }
  out << "\n| quantity | value |\n|---|---|\n"
      << "| pulses | " << s.pulses << " |\n"
      << "| sifted_key_length | " << s.sifted_key_length << " |\n"
      << "| qber | " << sig6(s.qber) << " |\n"
      << "| eve_key_recovery | " << sig6(s.eve_key_recovery) << " |\n"
      << "| blinded_clicks | " << s.blinded_clicks << " |\n";
  return kOk;
}

std::string_view sub_table_title(Discrimination d) {
  switch (d) {
    case Discrimination::None:
      return "No polarization discrimination";
    case Discrimination::All:
      return "Polarization discrimination in D0, D1 and D2";
    case Discrimination::D1D2:
      return "Polarization discrimination in D1 and D2 only";
    case Discrimination::D0D2:
      return "Polarization discrimination in D0 and D2 only";
  }
  return "";
}

int cmd_tables(const std::string& which, Format fmt, const OptimizerOptions& opts, std::ostream& out) {
  const ReferenceTable table = which == "I" ? ReferenceTable::TableI : ReferenceTable::TableII;
  const auto cells = reproduce_tables(table, opts);

  if (fmt == Format::Csv) {
    out << "table,discrimination,column,r_d0,r_d1,r_d2,r_d0_opp,x,y,z,z0,max_deviation\n";
    for (const auto& cell : cells) {
      const auto& r = cell.result;
      out << which << ',' << to_string(cell.discrimination) << ",\"" << cell.column_label << "\"";
      for (double v : {r.report.r_d0, r.report.r_d1, r.report.r_d2, r.report.r_d0_opp, r.params.x, r.params.y,
                       r.params.z, r.params.z0, r.report.max_deviation})
        out << ',' << full(v);
      out << '\n';
    }
    return kOk;
  }

  out << "## Attack efficiencies, table " << which << "\n";
  for (Discrimination disc : kTableOrder) {
    std::vector<const TableCell*> row;
    for (const auto& cell : cells) {
      if (cell.discrimination == disc) row.push_back(&cell);
    }
    out << "\n### " << sub_table_title(disc) << "\n\n|  |";
    for (const auto* cell : row) out << ' ' << cell->column_label << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < row.size(); ++i) out << "---|";
    out << '\n';
    auto line = [&](const char* label, auto get) {
      out << "| " << label << " |";
      for (const auto* cell : row) out << ' ' << fixed5(get(cell->result)) << " |";
      out << '\n';
    };
    line("P_D0 ratio", [](const OptimizationResult& r) { return r.report.r_d0; });
    line("P_D1 ratio", [](const OptimizationResult& r) { return r.report.r_d1; });
    line("P_D2 ratio", [](const OptimizationResult& r) { return r.report.r_d2; });
    line("P'_D0 ratio", [](const OptimizationResult& r) { return r.report.r_d0_opp; });
    line("x", [](const OptimizationResult& r) { return r.params.x; });
    line("y", [](const OptimizationResult& r) { return r.params.y; });
    if (disc == Discrimination::None) line("z", [](const OptimizationResult& r) { return r.params.z; });
    if (disc == Discrimination::D0D2) line("z0", [](const OptimizationResult& r) { return r.params.z0; });
  }
  return kOk;
}

int cmd_loss_equiv(const Common& c, double deviation, std::ostream& out) {
  const double db = loss_fluctuation_equivalent(load(c), deviation);
  print_key_values(out, format_of(c), {{"deviation", deviation}, {"fluctuation_db", db}});
  return kOk;
}

}  // namespace

RawConfig default_config() {
  return RawConfig{.mean_photon_number = 0.1,
                   .reflectivity = 0.5,
                   .channel_transmission = 0.1,
                   .eve_channel_transmission = 1.2 * 0.1,
                   .eta_d0 = 0.1,
                   .eta_d1 = 0.1,
                   .eta_d2 = 0.1,
                   .eta_eve = 0.1,
                   .discrimination = Discrimination::None};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterfactual QKD detector-blinding attack toolkit", "cfqkd"};
  app.require_subcommand(1);

  Common baseline_c, attack_c, optimize_c, simulate_c, loss_c;
  ParamFlags attack_p, simulate_p;
  std::string attack_scenario, optimize_scenario, simulate_scenario, source = "coherent", records, table_name;
  std::string tables_format = "markdown";
  OptimizerOptions opt_options, table_options;
  std::uint64_t pulses = 0, seed = 0;
  unsigned sim_workers = 0;
  double deviation = 0.0;

  auto* baseline = app.add_subcommand("baseline", "Expected detector statistics without Eve");
  add_common(baseline, baseline_c);

  auto* attack = app.add_subcommand("attack", "Detector statistics and ratios under a combined attack");
  add_common(attack, attack_c);
  attack->add_option("--scenario", attack_scenario, "combined-nodisc|combined-fulldisc|combined-d1d2|combined-d0d2")
      ->required();
  add_params(attack, attack_p);

  auto* optimize_cmd = app.add_subcommand("optimize", "Minimax search for Eve's parameters");
  add_common(optimize_cmd, optimize_c);
  optimize_cmd->add_option("--scenario", optimize_scenario, "Combined scenario (default: from discrimination)");
  optimize_cmd->add_option("--step", opt_options.grid_step, "Grid step for x and z")->check(CLI::Range(1e-6, 1.0));
  optimize_cmd->add_option("--workers", opt_options.workers, "Worker threads (0: all cores)");

  auto* simulate_cmd = app.add_subcommand("simulate", "Pulse-level Monte Carlo run");
  add_common(simulate_cmd, simulate_c);
  simulate_cmd->add_option("--scenario", simulate_scenario, "baseline|blind-reduce|combined-*")->required();
  simulate_cmd->add_option("--source", source, "coherent|single-photon");
  simulate_cmd->add_option("--pulses", pulses, "Number of pulses")->required();
  simulate_cmd->add_option("--seed", seed, "Random seed")->required();
  simulate_cmd->add_option("--workers", sim_workers, "Worker threads (0: all cores)");
  simulate_cmd->add_option("--records", records, "Write per-pulse CSV records to this file");
  add_params(simulate_cmd, simulate_p);

  auto* tables = app.add_subcommand("tables", "Reproduce an attack-efficiency table");
  tables->add_option("table", table_name, "I or II")->required()->check(CLI::IsMember({"I", "II"}));
  tables->add_option("--format", tables_format, "Output format")->check(CLI::IsMember({"markdown", "csv"}));
  tables->add_option("--step", table_options.grid_step, "Grid step for x and z")->check(CLI::Range(1e-6, 1.0));
  tables->add_option("--workers", table_options.workers, "Worker threads (0: all cores)");

  auto* loss = app.add_subcommand("loss-equiv", "Channel-loss fluctuation equivalent to a ratio deviation");
  add_common(loss, loss_c);
  loss->add_option("--deviation", deviation, "Relative deviation, e.g. 0.015")->required();

  std::vector<std::string> argv_storage{"cfqkd"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }

  try {
    if (*baseline) return cmd_baseline(baseline_c, out);
    if (*attack) return cmd_attack(attack_c, attack_scenario, attack_p, out);
    if (*optimize_cmd) return cmd_optimize(optimize_c, optimize_scenario, opt_options, out);
    if (*simulate_cmd)
      return cmd_simulate(simulate_c, simulate_scenario, source, simulate_p, pulses, seed, sim_workers, records, out);
    if (*tables)
      return cmd_tables(table_name, tables_format == "csv" ? Format::Csv : Format::Markdown, table_options, out);
    if (*loss) return cmd_loss_equiv(loss_c, deviation, out);
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kValidationError;
}

}  // namespace cfqkd::cli
