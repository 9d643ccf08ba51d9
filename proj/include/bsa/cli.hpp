#pragma once

// The `bsa` command line: certify, construct, search, oracle, validate.
//
// Everything is routed through run() so tests can drive the CLI in-process.
// Exit codes: 0 ok, 1 well-formed but not certified / not found, 2 invalid
// input, 3 numerical failure.

#include "bsa/json.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace bsa::cli {

enum Exit : int { Ok = 0, NotCertified = 1, BadInput = 2, Numerical = 3 };

/// Process environment, passed in explicitly.
struct Environment {
  std::optional<std::string> seed;  // BSA_SEED
};

namespace detail {

using io::Json;

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

inline Json read_json(const std::string& path, std::istream& in) {
  std::string text;
  if (path == "-") {
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  } else {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::InvalidInput, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    text = buf.str();
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, std::string("malformed JSON in '") + path + "': " + e.what());
  }
}

inline std::uint64_t parse_seed(const std::string& s) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || s.front() == '-') throw Error(ErrorCode::InvalidInput, "bad seed '" + s + "'");
  return v;
}

inline std::uint64_t default_seed(const Environment& env) { return env.seed ? parse_seed(*env.seed) : 0; }

/// Output switches shared by every subcommand.
struct OutputFlags {
  std::string out_path;
  std::string table_path;
  bool pretty = false;
};

inline void add_output_flags(CLI::App* sub, OutputFlags& flags, bool table) {
  sub->add_option("--out", flags.out_path, "write JSON here instead of stdout");
  sub->add_flag("--pretty", flags.pretty, "indent JSON; print a margin table on stderr");
  if (table) sub->add_option("--emit-table", flags.table_path, "write pair margins as CSV ('-' for stdout)");
}

inline void write_table(std::ostream& os, const MarginReport& r) {
  os << "upper,lower,margin,distance\n";
  os << std::setprecision(17);
  for (const auto& m : r.margins) os << m.upper << ',' << m.lower << ',' << m.margin << ',' << m.distance << '\n';
}

inline void pretty_table(std::ostream& os, const MarginReport& r) {
  os << std::setw(6) << "upper" << std::setw(6) << "lower" << std::setw(14) << "margin" << std::setw(14) << "distance"
     << '\n';
  os << std::fixed << std::setprecision(9);
  for (const auto& m : r.margins) {
    os << std::setw(6) << m.upper << std::setw(6) << m.lower << std::setw(14) << m.margin << std::setw(14) << m.distance
       << '\n';
  }
  os << "d = " << r.d << "  separation = " << r.separation << "  c1 = " << r.c1 << '\n';
  os.unsetf(std::ios::floatfield);
}

/// Writes `doc` (and the CSV table if requested). With `--emit-table -` the CSV
/// takes stdout and JSON goes only to --out.
inline void emit(const Json& doc, const MarginReport* report, const OutputFlags& flags, Streams& s) {
  const std::string text = doc.dump(flags.pretty ? 2 : -1) + "\n";
  const bool table_on_stdout = report && flags.table_path == "-";
  if (!flags.out_path.empty()) {
    std::ofstream f(flags.out_path);
    if (!f) throw Error(ErrorCode::InvalidInput, "cannot write '" + flags.out_path + "'");
    f << text;
  } else if (!table_on_stdout) {
    s.out << text;
  }
  if (report && !flags.table_path.empty()) {
    if (table_on_stdout) {
      write_table(s.out, *report);
    } else {
      std::ofstream f(flags.table_path);
      if (!f) throw Error(ErrorCode::InvalidInput, "cannot write '" + flags.table_path + "'");
      write_table(f, *report);
    }
  }
  if (report && flags.pretty) pretty_table(s.err, *report);
}

/// The point-set part of a set, certificate, family or certify output.
inline const Json& unwrap_set(const Json& j) {
  if (j.is_object() && j.contains("certificate") && !j.contains("points")) return j["certificate"];
  return j;
}

// ---------------------------------------------------------------------------

struct CertifyArgs {
  std::string set_path;
  double tol = 1e-7;
};

inline int do_certify(const CertifyArgs& a, const OutputFlags& flags, Streams& s) {
  const Json input = unwrap_set(read_json(a.set_path, s.in));
  const PointSet set = io::set_from_json(input);
  const auto result = certify_set(set);
  const Verdict verdict = check_certificate(result.certificate, a.tol);
  Json doc = {{"report", io::to_json(result.report)},
              {"certificate", io::to_json(result.certificate)},
              {"verdict", io::to_json(verdict)}};

  // A supplied certificate is checked as given, against its own claims.
  bool supplied_ok = true;
  if (input.contains("pairs")) {
    const Verdict v = check_certificate(io::certificate_from_json(input), a.tol);
    doc["input_verdict"] = io::to_json(v);
    supplied_ok = v.valid;
  }
  emit(doc, &result.report, flags, s);
  if (!verdict.valid) return Numerical;
  return verdict.separated && supplied_ok ? Ok : NotCertified;
}

struct ConstructArgs {
  std::string family;
  std::string space_path;
  std::string system_path;
  std::string p;
  int n = 0;
  std::optional<std::uint64_t> seed;
};

inline Json system_to_json(const AuerbachSystem& sys) {
  Json hist = Json::array();
  for (double v : sys.determinant_history) hist.push_back(v);
  return {{"space", io::to_json(sys.space)},
          {"vectors", io::vectors_to_json(sys.vectors)},
          {"functionals", io::vectors_to_json(sys.functionals)},
          {"determinant_history", hist},
          {"sweeps", sys.sweeps}};
}

inline int do_construct(const ConstructArgs& a, const Environment& env, const OutputFlags& flags, Streams& s) {
  const std::uint64_t seed = a.seed ? *a.seed : default_seed(env);
  auto need_space = [&] {
    if (a.space_path.empty()) throw Error(ErrorCode::InvalidInput, "--family " + a.family + " needs --space");
    return io::space_from_json(read_json(a.space_path, s.in));
  };
  auto ascent = [&] { return auerbach_ascent(need_space(), seed); };

  Json doc;
  if (a.family == "lp-basis") {
    Exponent p = Exponent::finite(2.0);
    Eigen::Index n = a.n;
    if (!a.space_path.empty()) {
      const NormSpec sp = need_space();
      if (!sp.is_lp()) throw Error(ErrorCode::InvalidInput, "lp-basis needs an lp space");
      p = sp.lp_data().p;
      n = sp.dim();
    } else {
      if (a.p.empty() || a.n == 0) throw Error(ErrorCode::InvalidInput, "lp-basis needs --p and --n (or --space)");
      if (a.p == "inf") {
        p = Exponent::infinity();
      } else {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(a.p, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != a.p.size()) throw Error(ErrorCode::InvalidInput, "bad --p '" + a.p + "'");
        p = Exponent::from_double(v);
      }
    }
    doc = io::to_json(lp_basis_family(p, n));
  } else if (a.family == "summing") {
    doc = io::to_json(summing_family(a.n));
  } else if (a.family == "auerbach") {
    const auto sys = ascent();
    doc = io::to_json(normalize_biorthogonal(sys.vectors, sys.functionals, sys.space));
    doc["provenance"] = "auerbach";
    doc["system"] = system_to_json(sys);
  } else if (a.family == "strict-convex") {
    doc = io::to_json(strict_convex_family(ascent()));
  } else if (a.family == "plus-minus") {
    doc = io::to_json(plus_minus_family(ascent()));
  } else if (a.family == "renorm-equilateral") {
    const NormSpec base = need_space();
    doc = io::to_json(renorm_equilateral_family(base, auerbach_ascent(base, seed)).family);
  } else if (a.family == "biorthogonal") {
    if (a.system_path.empty()) throw Error(ErrorCode::InvalidInput, "biorthogonal needs --system");
    const Json sys = read_json(a.system_path, s.in);
    const NormSpec sp = io::space_from_json(io::detail::field(sys, "space"));
    doc = io::to_json(normalize_biorthogonal(io::vectors_from_json(io::detail::field(sys, "vectors"), "vectors"),
                                             io::vectors_from_json(io::detail::field(sys, "functionals"), "functionals"),
                                             sp));
  } else {
    throw Error(ErrorCode::InvalidInput, "unknown family '" + a.family + "'");
  }
  emit(doc, nullptr, flags, s);
  return Ok;
}

struct SearchArgs {
  std::string space_path;
  std::string mode = "ka";
  std::string config_path;
  int count = 4;
  int pool = 2000;
  bool timing = false;
};

inline int do_search(const SearchArgs& a, const Environment& env, const OutputFlags& flags, Streams& s) {
  const NormSpec space = io::space_from_json(read_json(a.space_path, s.in));
  SearchConfig base;
  base.seed = default_seed(env);
  const SearchConfig config = a.config_path.empty() ? base : io::config_from_json(read_json(a.config_path, s.in), base);
  validate_config(config);

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&]() -> std::optional<double> {
    if (!a.timing) return std::nullopt;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  if (a.mode == "ka") {
    const auto r = ka_lower_bound(space, a.count, config);
    Json doc = io::search_to_json(config, r.report, r.witness, elapsed());
    Json per = Json::array();
    for (const auto& [count, d] : r.per_count) per.push_back({{"count", count}, {"d", d}});
    doc["per_count"] = per;
    emit(doc, &r.report, flags, s);
    return Ok;
  }
  if (a.mode == "antipodal") {
    const auto r = max_antipodal_search(space, a.count, config);
    Json doc = io::search_to_json(config, r.witness->report, r.witness->certificate, elapsed());
    doc["found"] = r.found;
    emit(doc, &r.witness->report, flags, s);
    return r.found ? Ok : NotCertified;
  }
  if (a.mode == "separated") {
    const PointSet set = greedy_separated(space, a.count, a.pool, config.seed);
    const auto r = certify_set(set);
    Json doc = io::search_to_json(config, r.report, r.certificate, elapsed());
    emit(doc, &r.report, flags, s);
    return Ok;
  }
  throw Error(ErrorCode::InvalidInput, "unknown mode '" + a.mode + "'");
}

struct OracleArgs {
  std::string set_path;
  std::vector<std::size_t> pair;
  int grid = 720;
};

inline int do_oracle(const OracleArgs& a, const OutputFlags& flags, Streams& s) {
  const PointSet set = io::set_from_json(unwrap_set(read_json(a.set_path, s.in)));
  if (a.grid < 1) throw Error(ErrorCode::InvalidInput, "--grid must be positive");
  const double m = brute_force_margin(set, a.pair[0], a.pair[1], a.grid);
  emit({{"upper", a.pair[0]}, {"lower", a.pair[1]}, {"grid", a.grid}, {"margin", m}}, nullptr, flags, s);
  return Ok;
}

inline int do_validate(const std::string& path, const OutputFlags& flags, Streams& s) {
  emit(io::to_json(io::space_from_json(read_json(path, s.in))), nullptr, flags, s);
  return Ok;
}

inline int exit_code(ErrorCode code) {
  return code == ErrorCode::NumericalBreakdown ? Numerical : BadInput;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err,
               const Environment& env = {}) {
  detail::Streams s{in, out, err};
  CLI::App app{"bounded separated antipodal sets: certificates, constructions and search", "bsa"};
  app.require_subcommand(1);

  detail::OutputFlags flags;

  detail::CertifyArgs certify;
  auto* c = app.add_subcommand("certify", "compute margins and a certificate for a point set");
  c->add_option("--set", certify.set_path, "point set, certificate or family JSON ('-' for stdin)")->required();
  c->add_option("--tol", certify.tol, "tolerance for re-checking the certificate");
  detail::add_output_flags(c, flags, true);

  detail::ConstructArgs construct;
  std::uint64_t seed_flag = 0;
  auto* k = app.add_subcommand("construct", "build a named family");
  k->add_option("--family", construct.family, "lp-basis|summing|auerbach|strict-convex|plus-minus|renorm-equilateral|biorthogonal")
      ->required();
  k->add_option("--space", construct.space_path, "space JSON");
  k->add_option("--system", construct.system_path, "vectors/functionals JSON for biorthogonal");
  k->add_option("--p", construct.p, "exponent (number or inf)");
  k->add_option("--n", construct.n, "dimension");
  auto* seed_opt = k->add_option("--seed", seed_flag, "seed for the Auerbach ascent fallback");
  detail::add_output_flags(k, flags, false);

  detail::SearchArgs search;
  auto* q = app.add_subcommand("search", "anneal or pack for lower bounds");
  q->add_option("--space", search.space_path, "space JSON")->required();
  q->add_option("--mode", search.mode, "ka|antipodal|separated")->check(CLI::IsMember({"ka", "antipodal", "separated"}));
  q->add_option("--config", search.config_path, "SearchConfig JSON");
  q->add_option("--count", search.count, "max count (ka) or cardinality (antipodal, separated)");
  q->add_option("--pool", search.pool, "candidate pool for separated mode");
  q->add_flag("--timing", search.timing, "include wall_time in the output");
  detail::add_output_flags(q, flags, true);

  detail::OracleArgs oracle;
  auto* o = app.add_subcommand("oracle", "grid lower bound for one pair margin (upper, lower)");
  o->add_option("--set", oracle.set_path, "point set JSON ('-' for stdin)")->required();
  o->add_option("--pair", oracle.pair, "upper and lower index")->required()->expected(2);
  o->add_option("--grid", oracle.grid, "grid points per dimension");
  detail::add_output_flags(o, flags, false);

  std::string validate_path;
  auto* v = app.add_subcommand("validate", "canonicalize a space");
  v->add_option("--space", validate_path, "space JSON")->required();
  detail::add_output_flags(v, flags, false);

  auto fail = [&](ErrorCode code, const std::string& msg) {
    err << io::error_to_json(code, msg).dump() << "\n";
    return detail::exit_code(code);
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return Ok;
  } catch (const CLI::ParseError& e) {
    return fail(ErrorCode::InvalidInput, e.what());
  }

  try {
    if (*c) return detail::do_certify(certify, flags, s);
    if (*k) {
      if (*seed_opt) construct.seed = seed_flag;
      return detail::do_construct(construct, env, flags, s);
    }
    if (*q) return detail::do_search(search, env, flags, s);
    if (*o) return detail::do_oracle(oracle, flags, s);
    return detail::do_validate(validate_path, flags, s);
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail(ErrorCode::NumericalBreakdown, e.what());
  }
}

}  // namespace bsa::cli
