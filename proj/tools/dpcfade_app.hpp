#pragma once

// dpcfade command-line front end. Kept in a header so tests can drive run_cli in-process.

#include <dpc/bounds_m.hpp>
#include <dpc/bounds_two.hpp>
#include <dpc/channel.hpp>
#include <dpc/errors.hpp>
#include <dpc/sim.hpp>
#include <dpc/verify.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace dpcfade {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

/// Usage or validation problem; reported on stderr with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string num(double v) {
  if (std::isnan(v)) return "";
  if (v == 0.0) v = 0.0;  // no "-0" in output
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + csv_field(fields[i]);
  return line + "\n";
}

inline double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("invalid number for " + what + ": '" + text + "'");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size()) throw UsageError("invalid number for " + what + ": '" + text + "'");
  return v;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

inline std::vector<double> parse_list(const std::string& s, char sep, const std::string& what) {
  std::vector<double> v;
  for (const auto& p : split(s, sep)) v.push_back(parse_number(p, what));
  if (v.empty()) throw UsageError(what + " must not be empty");
  return v;
}

inline dpc::FadingSet make_fading(std::vector<double> values, bool dedup) {
  return dedup ? dpc::FadingSet::deduplicated(std::move(values)) : dpc::FadingSet(std::move(values));
}

inline std::string join_fading(const dpc::FadingSet& f) {
  std::string s;
  for (std::size_t i = 0; i < f.size(); ++i) s += (i ? ":" : "") + num(f[i]);
  return s;
}

inline dpc::StrongFadingVariant parse_variant(const std::string& s) {
  if (s == "amplitude" || s == "amplitude-sum") return dpc::StrongFadingVariant::AmplitudeSum;
  if (s == "power" || s == "power-sum") return dpc::StrongFadingVariant::PowerSum;
  throw UsageError("unknown strong fading variant '" + s + "' (amplitude-sum | power-sum)");
}

inline dpc::SchemeConfig parse_scheme(const std::string& name, std::optional<double> target,
                                      std::optional<double> beta) {
  if (name == "tin") return dpc::SchemeConfig::tin();
  if (name == "costa-matched") {
    if (!target) throw UsageError("costa-matched needs --target");
    return dpc::SchemeConfig::costa_matched(*target);
  }
  if (name == "costa-average") return dpc::SchemeConfig::costa_average();
  if (name == "costa-timeshare") return dpc::SchemeConfig::costa_timeshare();
  if (name == "two-codeword") return dpc::SchemeConfig::two_codeword(beta);
  throw UsageError("unknown scheme '" + name +
                   "' (tin | costa-matched | costa-average | costa-timeshare | two-codeword)");
}

struct Output {
  bool nats = false;
  double scale() const { return nats ? std::numbers::ln2 : 1.0; }
  std::string unit() const { return nats ? "nats" : "bits"; }
  std::string rate(double bits) const { return num(bits * scale()); }
};

// ---------------------------------------------------------------------------------------
// Row builders shared by the subcommands and the sweep.

using Row = std::vector<std::string>;

inline std::string optimizer_text(const std::optional<dpc::OptimizerState>& o) {
  return o ? o->variable + "=" + num(o->argument) : "";
}

/// bound, value, optimizer, notes for each selected two-value quantity.
inline std::vector<Row> bounds2_rows(const dpc::TwoFadingInstance& inst, const Output& out,
                                     const std::vector<std::string>& names,
                                     std::optional<double> beta = {}, std::optional<double> gamma = {}) {
  std::vector<Row> rows;
  for (const auto& name : names) {
    if (name == "carbon_outer" || name == "carbon_inner") {
      const auto n = inst.normalized();
      const auto b = name == "carbon_outer" ? dpc::carbon_outer(n.power, n.a2) : dpc::carbon_inner(n.power, n.a2);
      rows.push_back({name, out.rate(b.value), "", "a=a2; " + b.notes});
    } else if (name == "outer2_numeric" || name == "outer2_closed" || name == "inner2_closed") {
      const auto b = name == "outer2_numeric"  ? dpc::outer2_numeric(inst)
                     : name == "outer2_closed" ? dpc::outer2_closed(inst)
                                               : dpc::inner2_closed(inst);
      rows.push_back({name, out.rate(b.value), optimizer_text(b.optimizer), b.notes});
    } else if (name == "inner2_rate") {
      const double bt = beta ? *beta : dpc::inner2_optimal_beta(inst);
      rows.push_back({name, out.rate(dpc::inner2_rate(inst, bt)), "beta=" + num(bt), ""});
    } else if (name == "outer2_objective") {
      if (!gamma) throw UsageError("outer2_objective needs gamma");
      rows.push_back({name, out.rate(dpc::outer2_objective(inst, *gamma)), "gamma=" + num(*gamma), ""});
    } else if (name == "gap2") {
      const auto g = dpc::gap2(inst);
      rows.push_back({name, out.rate(g.realized), "",
                      std::string("region=") + dpc::to_string(g.region) + "; region_bound=" +
                          out.rate(g.region_bound) + "; theorem_bound=" + out.rate(g.theorem_bound) +
                          "; numeric_gap=" + out.rate(g.realized_numeric)});
    } else {
      throw UsageError("unknown bound '" + name + "'");
    }
  }
  return rows;
}

inline const std::vector<std::string>& bounds2_names() {
  static const std::vector<std::string> n{"carbon_outer",  "carbon_inner",  "outer2_numeric",
                                          "outer2_closed", "inner2_closed", "gap2"};
  return n;
}

inline const std::vector<std::string>& boundsm_names() {
  static const std::vector<std::string> n{"strong_fading",      "strong_fading_outer",
                                          "time_sharing_inner", "strong_fading_gap",
                                          "subset_outer",       "small_spread_inner"};
  return n;
}

/// quantity, value, status, notes for each selected M-value quantity.
inline std::vector<Row> boundsm_rows(const dpc::MFadingInstance& inst, const Output& out,
                                     const std::vector<std::string>& names) {
  std::vector<Row> rows;
  for (const auto& name : names) {
    try {
      if (name == "strong_fading") {
        const bool s = dpc::is_strong_fading(inst.channel(), inst.variant);
        rows.push_back({name, s ? "1" : "0", "ok", dpc::to_string(inst.variant)});
      } else if (name == "strong_fading_outer") {
        const auto b = dpc::strong_fading_outer(inst);
        rows.push_back({name, out.rate(b.value), "ok", b.notes});
      } else if (name == "time_sharing_inner") {
        rows.push_back({name, out.rate(dpc::time_sharing_inner(inst).value), "ok",
                        inst.size() == 1 ? "degenerate (M=1)" : ""});
      } else if (name == "strong_fading_gap") {
        const auto g = dpc::strong_fading_gap(inst);
        rows.push_back({name, out.rate(g.realized), "ok",
                        "bound=" + out.rate(g.bound) + (g.attains_bound ? "; attains bound" : "")});
      } else if (name == "subset_outer") {
        const auto s = dpc::subset_outer(inst);
        rows.push_back({name, out.rate(s.bound.value), "ok",
                        "K=" + std::to_string(s.subset.count) + "; subset=" + join_fading(s.subset.subset)});
      } else if (name == "small_spread_inner") {
        const auto r = dpc::costa_small_spread_gap(inst.power, inst.fading);
        rows.push_back({name, out.rate(r.inner), "ok",
                        "gap_bound=" + out.rate(r.gap_bound) + "; exact_inner=" + out.rate(r.exact_inner)});
      } else {
        throw UsageError("unknown bound '" + name + "'");
      }
    } catch (const dpc::RegimeViolation& e) {
      rows.push_back({name, "", "regime-violation", e.what()});
    } catch (const dpc::PreconditionViolation& e) {
      rows.push_back({name, "", "precondition-violation", e.what()});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------------------
// Sweep spec: flat "key = value" lines, '#' starts a comment.
//   axis.<name>  = min,max,count,lin|log
//   fixed.<name> = value            (fading as a colon-separated list)
//   select       = name,name,...

inline const std::set<std::string>& sweep_vocabulary() {
  static const std::set<std::string> v{"P", "a1", "a2", "fading", "M", "beta", "gamma"};
  return v;
}

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

struct SweepSpec {
  std::vector<SweepAxis> axes;
  std::map<std::string, std::string> fixed;
  std::vector<std::string> select;
};

class SweepParseError : public UsageError {
 public:
  SweepParseError(std::size_t line, const std::string& msg)
      : UsageError("sweep spec line " + std::to_string(line) + ": " + msg) {}
};

inline bool is_scheme_name(const std::string& s) { return s.rfind("sim:", 0) == 0; }

inline SweepSpec parse_sweep(std::istream& in) {
  SweepSpec spec;
  std::set<std::string> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const auto line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw SweepParseError(line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    try {
      if (key == "select") {
        spec.select = split(value, ',');
        for (const auto& s : spec.select) {
          const bool known = is_scheme_name(s) ||
                             std::find(bounds2_names().begin(), bounds2_names().end(), s) != bounds2_names().end() ||
                             std::find(boundsm_names().begin(), boundsm_names().end(), s) != boundsm_names().end() ||
                             s == "inner2_rate" || s == "outer2_objective";
          if (!known || s.empty()) throw UsageError("unknown selection '" + s + "'");
          if (is_scheme_name(s)) parse_scheme(s.substr(4), 0.0, std::nullopt);
        }
        continue;
      }
      const auto dot = key.find('.');
      const auto kind = key.substr(0, dot);
      const auto name = dot == std::string::npos ? "" : key.substr(dot + 1);
      if ((kind != "axis" && kind != "fixed") || dot == std::string::npos) {
        throw UsageError("unknown key '" + key + "'");
      }
      if (!sweep_vocabulary().count(name)) throw UsageError("unknown parameter '" + name + "'");
      if (!seen.insert(name).second) throw UsageError("parameter '" + name + "' given twice");
      if (kind == "fixed") {
        if (name == "fading") {
          parse_list(value, ':', "fading");
        } else {
          parse_number(value, name);
        }
        spec.fixed[name] = value;
        continue;
      }
      if (name == "fading") throw UsageError("fading cannot be an axis; sweep a1, a2, P or M instead");
      const auto parts = split(value, ',');
      if (parts.size() != 4) throw UsageError("axis needs min,max,count,lin|log");
      const double lo = parse_number(parts[0], "axis min");
      const double hi = parse_number(parts[1], "axis max");
      const double count = parse_number(parts[2], "axis count");
      if (!(count >= 1.0) || count != std::floor(count)) throw UsageError("axis count must be an integer >= 1");
      const auto n = static_cast<std::size_t>(count);
      if (n > 1 && !(lo < hi)) throw UsageError("axis needs min < max when count > 1");
      std::vector<double> values;
      if (parts[3] == "lin") {
        for (std::size_t i = 0; i < n; ++i) {
          values.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        }
      } else if (parts[3] == "log") {
        if (!(lo > 0.0)) throw UsageError("log axis needs min > 0");
        values = dpc::log_space(lo, hi, n);
      } else {
        throw UsageError("axis spacing must be lin or log");
      }
      if (name == "M") {
        for (auto& v : values) v = std::round(v);
      }
      spec.axes.push_back({name, std::move(values)});
    } catch (const SweepParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw SweepParseError(line_no, e.what());
    }
  }
  if (spec.axes.empty() && spec.fixed.empty()) throw SweepParseError(line_no, "spec defines no parameters");
  return spec;
}

struct SweepSettings {
  std::size_t samples = 1000000;
  std::uint64_t seed = 1;
  std::optional<double> target;
};

inline const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> c{"P", "a1", "a2", "fading", "M", "beta", "gamma",
                                          "bound", "value", "optimizer", "notes"};
  return c;
}

// Rows of one sweep cell, including per-row errors as notes with an empty value.
inline std::vector<Row> sweep_cell(const SweepSpec& spec, const std::map<std::string, double>& point,
                                   std::uint32_t cell, const Output& out, const SweepSettings& st) {
  auto get = [&](const std::string& k) -> std::optional<double> {
    if (auto it = point.find(k); it != point.end()) return it->second;
    if (auto it = spec.fixed.find(k); it != spec.fixed.end() && k != "fading") return parse_number(it->second, k);
    return std::nullopt;
  };
  const auto p = get("P");
  const auto m = get("M");
  std::optional<dpc::FadingSet> fading;
  std::string fading_text;
  if (auto it = spec.fixed.find("fading"); it != spec.fixed.end()) {
    fading_text = it->second;
  }
  const auto a1 = get("a1");
  const auto a2 = get("a2");
  const auto beta = get("beta");
  const auto gamma = get("gamma");

  Row prefix{p ? num(*p) : "", a1 ? num(*a1) : "", a2 ? num(*a2) : "", "",
             m ? num(*m) : "", beta ? num(*beta) : "", gamma ? num(*gamma) : ""};
  std::vector<Row> rows;
  auto emit = [&](const std::string& name, const std::string& value, const std::string& opt,
                  const std::string& notes) {
    Row r = prefix;
    r.insert(r.end(), {name, value, opt, notes});
    rows.push_back(std::move(r));
  };

  std::vector<std::string> select = spec.select;
  const bool multi = !fading_text.empty() || m.has_value();
  if (select.empty()) select = multi ? std::vector<std::string>{"strong_fading_outer", "time_sharing_inner", "subset_outer"}
                                     : bounds2_names();
  for (const auto& name : select) {
    try {
      if (!p) throw UsageError("P is not set");
      // Fading set: explicit list, a strong chain of size M, or {a1, a2}.
      if (!fading_text.empty()) {
        fading = dpc::FadingSet(parse_list(fading_text, ':', "fading"));
      } else if (m) {
        if (*m < 1.0) throw UsageError("M must be at least 1");
        fading = dpc::geometric_strong_chain(*p, static_cast<std::size_t>(*m));
      } else {
        if (!a2) throw UsageError("a2 is not set");
        fading = dpc::FadingSet{a1.value_or(0.0), *a2};
      }
      prefix[3] = join_fading(*fading);
      if (fading->size() == 2) {
        prefix[1] = num((*fading)[0]);
        prefix[2] = num((*fading)[1]);
      }
      if (is_scheme_name(name)) {
        const auto cfg = parse_scheme(name.substr(4), st.target, beta);
        const auto e = dpc::detail::simulate_cell(dpc::ChannelParams(*p, *fading), cfg, st.samples,
                                                  st.seed, cell, 1);
        emit(name, out.rate(e.compound), "", "stderr=" + out.rate(e.compound_stderr) +
                                                 "; N=" + std::to_string(e.samples));
      } else if (std::find(boundsm_names().begin(), boundsm_names().end(), name) != boundsm_names().end()) {
        const dpc::MFadingInstance inst{*p, *fading, dpc::StrongFadingVariant::AmplitudeSum};
        for (const auto& r : boundsm_rows(inst, out, {name})) {
          emit(r[0], r[1], "", r[2] == "ok" ? r[3] : r[2] + ": " + r[3]);
        }
      } else {
        if (fading->size() != 2) throw UsageError("two-value bound needs exactly two fading values");
        const dpc::TwoFadingInstance inst{*p, (*fading)[0], (*fading)[1]};
        for (const auto& r : bounds2_rows(inst, out, {name}, beta, gamma)) emit(r[0], r[1], r[2], r[3]);
      }
    } catch (const std::exception& e) {
      emit(name, "", "", std::string("error: ") + e.what());
    }
  }
  return rows;
}

inline void run_sweep(const SweepSpec& spec, std::ostream& os, const Output& out,
                      const SweepSettings& st, std::size_t threads) {
  // Cartesian product, first declared axis outermost.
  std::vector<std::map<std::string, double>> points{{}};
  for (const auto& axis : spec.axes) {
    std::vector<std::map<std::string, double>> next;
    for (const auto& pt : points) {
      for (double v : axis.values) {
        auto q = pt;
        q[axis.name] = v;
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  std::vector<std::vector<Row>> results(points.size());
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, points.size());
  auto work = [&](std::size_t first) {
    for (std::size_t k = first; k < points.size(); k += workers) {
      results[k] = sweep_cell(spec, points[k], static_cast<std::uint32_t>(k), out, st);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();
  auto header = sweep_columns();
  header[8] = "value_" + out.unit();
  os << csv_row(header);
  for (const auto& cell : results)
    for (const auto& row : cell) os << csv_row(row);
}

// ---------------------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounds, checks and simulation for dirty-paper channels with a faded state",
               "dpcfade"};
  app.require_subcommand(1);
  Output fmt;
  std::string out_file;
  std::uint64_t seed = 1;
  app.add_flag("--nats", fmt.nats, "Report rates in nats instead of bits");
  app.add_option("--out", out_file, "Write CSV to FILE instead of standard output");
  app.add_option("--seed", seed, "Master seed for simulation and random suites");
  app.fallthrough();

  double power = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  auto* bounds2 = app.add_subcommand("bounds2", "Two-value bounds and gap");
  bounds2->add_option("--power,-P", power, "Input power P")->required();
  bounds2->add_option("--a1", a1, "Smaller fading amplitude")->required();
  bounds2->add_option("--a2", a2, "Larger fading amplitude")->required();

  std::string fading_text;
  std::string variant_text = "amplitude-sum";
  bool dedup = false;
  auto* boundsm = app.add_subcommand("boundsM", "M-value bounds, strong fading gap and subset bound");
  boundsm->add_option("--power,-P", power, "Input power P")->required();
  boundsm->add_option("--fading", fading_text, "Comma-separated fading amplitudes")->required();
  boundsm->add_option("--variant", variant_text, "Strong fading predicate: amplitude-sum | power-sum");
  boundsm->add_flag("--dedup", dedup, "Sort and drop duplicate fading values");

  std::string scheme_text;
  std::optional<double> target;
  std::optional<double> beta;
  std::size_t samples = 1000000;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo rate estimates for a scheme");
  simulate->add_option("--power,-P", power, "Input power P")->required();
  simulate->add_option("--fading", fading_text, "Comma-separated fading amplitudes")->required();
  simulate->add_option("--scheme", scheme_text,
                       "tin | costa-matched | costa-average | costa-timeshare | two-codeword")
      ->required();
  simulate->add_option("--target", target, "Precoding target for costa-matched");
  simulate->add_option("--beta", beta, "TIN power fraction for two-codeword (default: optimal)");
  simulate->add_option("--samples,-N", samples, "Sample count (>= 10000)");
  simulate->add_flag("--dedup", dedup, "Sort and drop duplicate fading values");

  std::string spec_path;
  auto* sweep = app.add_subcommand("sweep", "Evaluate a sweep spec file and stream CSV");
  sweep->add_option("spec", spec_path, "Sweep spec file ('-' reads standard input)")->required();
  sweep->add_option("--samples,-N", samples, "Sample count for simulated selections");
  sweep->add_option("--target", target, "Precoding target for sim:costa-matched");

  std::string suite;
  dpc::VerifyOptions vopt;
  auto* verify = app.add_subcommand("verify", "Run an invariant suite");
  verify->add_option("suite", suite, "gap2 | strongfading | proofterms | oracle | continuity | normalization")
      ->required();
  verify->add_option("--grid", vopt.grid, "Grid density per axis");
  verify->add_option("--tol", vopt.tol, "Slack tolerance")->check(CLI::NonNegativeNumber);
  verify->add_option("--M", vopt.max_m, "Largest M for the proof-term suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::ostringstream buffer;
  int code = kExitOk;
  try {
    if (bounds2->parsed()) {
      const dpc::ChannelParams c(power, dpc::FadingSet{a1, a2});
      const dpc::TwoFadingInstance inst{c.power(), c.fading()[0], c.fading()[1]};
      buffer << csv_row({"P", "a1", "a2", "bound", "value_" + fmt.unit(), "optimizer", "notes"});
      for (const auto& r : bounds2_rows(inst, fmt, bounds2_names())) {
        buffer << csv_row({num(power), num(a1), num(a2), r[0], r[1], r[2], r[3]});
      }
    } else if (boundsm->parsed()) {
      const dpc::ChannelParams c(power, make_fading(parse_list(fading_text, ',', "fading"), dedup));
      const dpc::MFadingInstance inst{c.power(), c.fading(), parse_variant(variant_text)};
      buffer << csv_row({"P", "fading", "variant", "quantity", "value_" + fmt.unit(), "status", "notes"});
      for (const auto& r : boundsm_rows(inst, fmt, boundsm_names())) {
        buffer << csv_row({num(power), join_fading(c.fading()), dpc::to_string(inst.variant), r[0],
                           r[1], r[2], r[3]});
      }
    } else if (simulate->parsed()) {
      const dpc::ChannelParams c(power, make_fading(parse_list(fading_text, ',', "fading"), dedup));
      const auto cfg = parse_scheme(scheme_text, target, beta);
      const auto e = dpc::simulate(c, cfg, samples, seed);
      buffer << csv_row({"scheme", "receiver", "rate_" + fmt.unit(), "stderr", "N", "seed"});
      for (std::size_t j = 0; j < e.rates.size(); ++j) {
        buffer << csv_row({e.scheme, std::to_string(j + 1), fmt.rate(e.rates[j]), fmt.rate(e.stderrs[j]),
                           std::to_string(e.samples), std::to_string(e.seed)});
      }
      buffer << csv_row({e.scheme, "min", fmt.rate(e.compound), fmt.rate(e.compound_stderr),
                         std::to_string(e.samples), std::to_string(e.seed)});
    } else if (sweep->parsed()) {
      SweepSpec spec;
      if (spec_path == "-") {
        spec = parse_sweep(std::cin);
      } else {
        std::ifstream in(spec_path);
        if (!in) throw UsageError("cannot open sweep spec '" + spec_path + "'");
        spec = parse_sweep(in);
      }
      run_sweep(spec, buffer, fmt, {samples, seed, target}, dpc::default_threads());
    } else if (verify->parsed()) {
      if (std::find(dpc::suite_names().begin(), dpc::suite_names().end(), suite) == dpc::suite_names().end()) {
        throw UsageError("unknown suite '" + suite + "'");
      }
      if (vopt.grid < 1) throw UsageError("--grid must be at least 1");
      vopt.seed = seed;
      const auto rep = dpc::run_suite(suite, vopt);
      buffer << csv_row({"suite", "check", "status", "worst_slack", "cases", "worst_case"});
      for (const auto& c : rep.checks) {
        buffer << csv_row({rep.suite, c.name, c.passed() ? "pass" : "FAIL", num(c.worst_slack),
                           std::to_string(c.cases), c.worst_case});
      }
      for (const auto& line : rep.table) buffer << "# " << line << "\n";
      code = rep.passed() ? kExitOk : kExitVerifyFailed;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dpc::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (out_file.empty()) {
    out << buffer.str();
  } else {
    std::ofstream f(out_file, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << out_file << "'\n";
      return kExitUsage;
    }
    f << buffer.str();
  }
  return code;
}

}  // namespace dpcfade
