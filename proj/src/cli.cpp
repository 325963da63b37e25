#include "badtheta/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "badtheta/bestapprox.hpp"
#include "badtheta/catalog.hpp"
#include "badtheta/errors.hpp"
#include "badtheta/verify.hpp"

namespace badtheta {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kDefaultBestApproxBound = 10000;
constexpr std::uint64_t kDefaultCrosscheckBound = 3600;

std::uint64_t to_u64(const Integer& v, const char* what) {
  if (v < 0 || v > Integer("18446744073709551615", 10)) {
    throw ConfigError(std::string(what) + " " + v.get_str() + " does not fit in 64 bits");
  }
  return std::stoull(v.get_str());
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void print_violations(std::ostream& log, const char* title, const std::vector<Violation>& violations) {
  log << title << ": " << violations.size() << " violation(s)\n";
  for (const auto& v : violations) {
    log << "  [" << v.scope << "] nu=" << v.first << " -> " << v.second << ": " << v.detail << '\n';
  }
}

std::vector<std::pair<std::string, ThetaForm>> crosscheck_targets(const RunConfig& cfg) {
  std::vector<std::pair<std::string, ThetaForm>> out;
  if (cfg.theta || cfg.catalog) {
    out.emplace_back(cfg.catalog.value_or("inline"), cfg.resolve_theta());
  } else {
    for (const auto& e : catalog()) out.emplace_back(e.name, e.form());
  }
  return out;
}

std::string fmt_double(double v, int precision = 6) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

}  // namespace

ThetaForm parse_theta_pair(std::string_view text) {
  auto comma = text.find(',');
  if (comma == std::string_view::npos) throw ConfigError("--theta expects two values separated by a comma");
  std::string_view a = text.substr(0, comma);
  std::string_view b = text.substr(comma + 1);
  unsigned digits = std::max(decimal_places(a), decimal_places(b));
  auto has_slash = [](std::string_view s) { return s.find('/') != std::string_view::npos; };
  Rational err = 0;
  if (digits > 0 && !(has_slash(a) && has_slash(b))) {
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
    err = Rational(Integer(1), scale);
  }
  return ThetaForm(parse_rational(a), parse_rational(b), err);
}

ThetaForm RunConfig::resolve_theta() const {
  if (theta && catalog) throw ConfigError("--theta and --catalog are mutually exclusive");
  if (theta) return parse_theta_pair(*theta);
  if (catalog) return catalog_entry(*catalog).form();
  throw ConfigError("no theta given: use --theta or --catalog");
}

void RunConfig::validate() const {
  if (R && *R < 2) throw ConfigError("--R must be at least 2");
  if (R && *R > 1625) throw ConfigError("--R too large");
  if (depth && *depth < 1) throw ConfigError("--depth must be at least 1");
  if (Q < 1) throw ConfigError("--Q must be at least 1");
  if (threads < 1) throw ConfigError("--threads must be at least 1");
}

SieveConfig RunConfig::sieve_config(std::uint64_t default_R, unsigned default_depth) const {
  SieveConfig s;
  s.R = R.value_or(default_R);
  s.depth = depth.value_or(default_depth);
  s.policy = policy;
  s.seed = seed;
  s.validate();
  return s;
}

Json run_config_to_json(const RunConfig& cfg) {
  Json j;
  j["theta"] = cfg.theta ? Json(*cfg.theta) : Json(nullptr);
  j["catalog"] = cfg.catalog ? Json(*cfg.catalog) : Json(nullptr);
  j["R"] = cfg.R ? Json(*cfg.R) : Json(nullptr);
  j["depth"] = cfg.depth ? Json(*cfg.depth) : Json(nullptr);
  j["policy"] = to_string(cfg.policy);
  j["seed"] = cfg.seed;
  j["Q"] = cfg.Q;
  j["bound"] = cfg.bound ? Json(*cfg.bound) : Json(nullptr);
  j["out"] = cfg.out;
  j["certificate"] = cfg.certificate ? Json(*cfg.certificate) : Json(nullptr);
  j["resume"] = cfg.resume;
  j["trace"] = cfg.trace;
  j["threads"] = cfg.threads;
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  try {
    RunConfig cfg;
    auto opt_str = [&](const char* k) {
      return j.at(k).is_null() ? std::nullopt : std::optional<std::string>(j.at(k).get<std::string>());
    };
    cfg.theta = opt_str("theta");
    cfg.catalog = opt_str("catalog");
    if (!j.at("R").is_null()) cfg.R = j.at("R").get<std::uint64_t>();
    if (!j.at("depth").is_null()) cfg.depth = j.at("depth").get<unsigned>();
    cfg.policy = parse_policy(j.at("policy").get<std::string>());
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.Q = j.at("Q").get<std::uint64_t>();
    if (!j.at("bound").is_null()) cfg.bound = j.at("bound").get<std::uint64_t>();
    cfg.out = j.at("out").get<std::string>();
    cfg.certificate = opt_str("certificate");
    cfg.resume = j.at("resume").get<bool>();
    cfg.trace = j.at("trace").get<bool>();
    cfg.threads = j.at("threads").get<unsigned>();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run config: ") + e.what());
  }
}

int cmd_catalog_list(std::ostream& log) {
  for (const auto& e : catalog()) {
    ThetaForm t = e.form();
    log << e.name << "\n  " << e.description << "\n  theta1 ~ " << to_decimal(t.theta1(), 20)
        << "\n  theta2 ~ " << to_decimal(t.theta2(), 20) << "\n  declared_error = " << to_decimal(t.declared_error(), 3)
        << '\n';
  }
  return kExitOk;
}

int cmd_best_approx(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const ThetaForm theta = cfg.resolve_theta();
  const std::uint64_t bound = cfg.bound.value_or(kDefaultBestApproxBound);
  BestApproxSequence seq = enumerate_best_approx(theta, bound, cfg.threads);

  const fs::path path = fs::path(cfg.out) / "sequence.jsonl";
  {
    auto out = open_output(path);
    write_sequence(out, seq);
  }
  log << "best approximation vectors with M^2 <= " << bound << ": " << seq.vectors.size() << " -> " << path.string()
      << '\n';
  if (seq.vectors.empty()) return kExitOk;

  auto minkowski = audit_minkowski(seq);
  auto growth = audit_growth(seq, 28);
  print_violations(log, "minkowski zeta_nu * M_{nu+1}^3 <= 1", minkowski);
  print_violations(log, "growth M_{nu+28} >= 2 M_nu", growth);
  std::size_t t1 = std::count_if(seq.vectors.begin(), seq.vectors.end(),
                                 [](const BestApproxVector& v) { return v.kind == Kind::Type1; });
  log << "type1: " << t1 << ", type2: " << seq.vectors.size() - t1 << '\n';
  return minkowski.empty() && growth.empty() ? kExitOk : kExitViolation;
}

int cmd_construct(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const ThetaForm theta = cfg.resolve_theta();
  const SieveConfig sc = cfg.sieve_config(16, 4);
  if (!sc.guarantees_survivors()) {
    log << "advisory: R = " << sc.R << " violates 1000 R^2 ceil(log2 R) < R^3; survivors are not guaranteed\n";
  }
  const std::uint64_t needed = to_u64(height_sq_power(sc.R, sc.depth), "height bound R^(2N)");
  BestApproxSequence seq = enumerate_best_approx(theta, needed, cfg.threads);
  log << "enumerated " << seq.vectors.size() << " best approximation vectors to M^2 <= " << needed << '\n';

  const fs::path dir(cfg.out);
  const fs::path journal_path = dir / "journal.jsonl";
  std::optional<RunJournal> previous;
  if (cfg.resume && fs::exists(journal_path)) {
    std::ifstream in(journal_path);
    previous = read_journal(in);
    log << "resuming from " << previous->levels.size() << " journaled level(s)\n";
  }
  auto journal_out = open_output(journal_path);
  if (previous) {
    // Rewrite the replayable prefix; run_sieve continues after it.
    RunJournal prefix = *previous;
    prefix.eta.reset();
    auto cut = std::find_if(prefix.levels.begin(), prefix.levels.end(),
                            [&](const LevelRecord& r) { return !r.chosen || r.level >= sc.depth; });
    prefix.levels.erase(cut, prefix.levels.end());
    write_journal(journal_out, prefix);
    journal_out.flush();
  }

  const DangerBounds bounds = danger_bounds(sc.R);
  log << "level  window  H1max  H2max  type1  type2  killed  survivors  (bounds: H1<=" << fmt_double(bounds.per_vector_type1)
      << " H2<=" << fmt_double(bounds.per_vector_type2) << " total<" << fmt_double(bounds.total) << " of "
      << sc.child_count() << ")\n";
  auto report_level = [&](const LevelRecord& rec) {
    std::uint64_t h1 = 0;
    std::uint64_t h2 = 0;
    for (const auto& v : rec.stats.vectors) (v.kind == Kind::Type1 ? h1 : h2) = std::max(v.kind == Kind::Type1 ? h1 : h2, v.kills);
    log << std::setw(5) << rec.level << std::setw(8) << rec.stats.vectors.size() << std::setw(7) << h1 << std::setw(7)
        << h2 << std::setw(7) << rec.stats.type1_total << std::setw(7) << rec.stats.type2_total << std::setw(8)
        << rec.stats.killed << std::setw(11) << rec.stats.survivors << '\n';
  };
  if (previous) {
    for (const auto& rec : previous->levels) {
      if (rec.chosen && rec.level < sc.depth) report_level(rec);
    }
  }

  RunOptions options;
  options.threads = cfg.threads;
  options.verify_Q = cfg.Q;
  options.resume = previous ? &*previous : nullptr;
  options.on_progress = [&](const RunJournal& journal, const LevelRecord* rec) {
    if (rec != nullptr) {
      journal_out << journal_level_line(*rec, sc.R) << '\n';
      report_level(*rec);
    } else if (journal.eta) {
      journal_out << journal_final_line(journal) << '\n';
    } else {
      journal_out << journal_header_line(journal) << '\n';
    }
    journal_out.flush();
  };

  std::optional<RunResult> result;
  try {
    result.emplace(run_sieve(theta, sc, seq, options));
  } catch (const NoSurvivor& e) {
    log << "no survivor: " << e.what() << " (journal: " << journal_path.string() << ")\n";
    return kExitNoSurvivor;
  }

  const fs::path cert_path = dir / "certificate.json";
  {
    auto out = open_output(cert_path);
    out << certificate_to_json(result->certificate).dump(2) << '\n';
  }
  const Certificate& cert = result->certificate;
  log << "eta = (" << to_string(cert.eta.x1) << ", " << to_string(cert.eta.x2) << ")\n"
      << "  ~ (" << to_decimal(cert.eta.x1, 15) << ", " << to_decimal(cert.eta.x2, 15) << ")\n"
      << "min ||eta . m|| over M^2 <= " << cert.height_sq_bound.get_str() << ": " << to_decimal(cert.verified_form_min, 8)
      << " > epsilon = " << to_string(cert.epsilon) << '\n';
  if (cert.bad_theta_Q > 0) {
    log << "BAD^theta score at Q = " << cert.bad_theta_Q << ": " << fmt_double(std::cbrt(cert.bad_theta_cube.get_d()))
        << " (argmin q = " << cert.bad_theta_argmin << ")\n";
  }
  log << "certificate -> " << cert_path.string() << ", journal -> " << journal_path.string() << '\n';
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const fs::path cert_path = cfg.certificate ? fs::path(*cfg.certificate) : fs::path(cfg.out) / "certificate.json";
  std::ifstream in(cert_path);
  if (!in) throw ConfigError("cannot read certificate " + cert_path.string());
  Certificate cert = [&] {
    try {
      return certificate_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed certificate: ") + e.what());
    }
  }();
  ThetaForm theta = cert.theta;
  if (cfg.theta || cfg.catalog) {
    ThetaForm given = cfg.resolve_theta();
    if (theta_fingerprint(given) != theta_fingerprint(cert.theta)) {
      throw ConfigError("certificate theta fingerprint " + theta_fingerprint(cert.theta) +
                        " does not match the requested theta " + theta_fingerprint(given));
    }
  }

  int status = kExitOk;
  const std::uint64_t bound = to_u64(cert.height_sq_bound, "certificate height bound");
  BestApproxSequence seq = enumerate_best_approx(theta, bound, cfg.threads);
  Json reports = Json::array();

  if (!seq.vectors.empty()) {
    ScoreReport lf = linear_form_score(theta, cert.eta, seq);
    reports.push_back(report_to_json(lf));
    const bool above = lf.measure > cert.epsilon;
    const bool agrees = lf.measure == cert.verified_form_min;
    log << "linear form: min ||eta . m|| = " << to_decimal(lf.measure, 8) << (above ? " > " : " <= ") << "epsilon "
        << to_string(cert.epsilon) << (agrees ? ", matches certificate\n" : ", DIFFERS from certificate\n");
    if (!above || !agrees) status = kExitViolation;
  }

  ScoreReport bt = bad_theta_score(theta, cert.eta, cfg.Q, cfg.threads);
  reports.push_back(report_to_json(bt));
  log << "BAD^theta(2/3,1/3) score up to Q = " << cfg.Q << ": " << fmt_double(bt.approx()) << " at q = " << bt.argmin_q
      << ", last record q = " << bt.last_record_q() << '\n';
  if (bt.measure <= 0) status = kExitViolation;
  if (cert.bad_theta_Q == cfg.Q && cert.bad_theta_cube != bt.measure) {
    log << "BAD^theta score differs from the certificate\n";
    status = kExitViolation;
  }

  ScoreReport ab = bad_alpha_beta_score(theta, cfg.Q, cfg.threads);
  reports.push_back(report_to_json(ab));
  log << "BAD(2/3,1/3) score of theta up to Q = " << cfg.Q << ": " << fmt_double(ab.approx()) << " at q = "
      << ab.argmin_q << '\n';

  const fs::path dir(cfg.out);
  {
    auto out = open_output(dir / "report.json");
    Json doc;
    doc["schema"] = kReportSchema;
    doc["certificate"] = cert_path.string();
    doc["status"] = status;
    doc["reports"] = reports;
    out << doc.dump(2) << '\n';
  }
  if (cfg.trace) {
    for (const ScoreReport* r : {&bt, &ab}) {
      auto out = open_output(dir / (r->name + "_trace.tsv"));
      out << "# q\tscore\n";
      for (const auto& p : r->trace) {
        out << p.q << '\t' << std::setprecision(12) << std::cbrt(p.measure.get_d()) << '\n';
      }
    }
  }
  log << (status == kExitOk ? "verification passed\n" : "verification FAILED\n");
  return status;
}

int cmd_crosscheck(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const std::uint64_t bound = cfg.bound.value_or(kDefaultCrosscheckBound);
  int status = kExitOk;
  for (const auto& [name, theta] : crosscheck_targets(cfg)) {
    BestApproxSequence fast = enumerate_best_approx(theta, bound, cfg.threads);
    BestApproxSequence slow = brute_best_approx(theta, bound);
    std::size_t k = 0;
    while (k < fast.vectors.size() && k < slow.vectors.size() && fast.vectors[k] == slow.vectors[k]) ++k;
    if (k == fast.vectors.size() && k == slow.vectors.size()) {
      log << name << ": enumeration == brute force (" << k << " vectors, M^2 <= " << bound << ")\n";
    } else {
      status = kExitViolation;
      log << name << ": DIVERGENCE at position " << k + 1 << '\n';
      auto dump = [&](const char* who, const BestApproxSequence& s) {
        if (k < s.vectors.size()) {
          const auto& v = s.vectors[k];
          log << "  " << who << ": m = (" << v.m.m1 << ", " << v.m.m2 << "), M^2 = " << v.height_sq
              << ", zeta = " << to_string(v.zeta) << '\n';
        } else {
          log << "  " << who << ": <end of sequence>\n";
        }
      };
      dump("enumerate", fast);
      dump("brute", slow);
    }

    // Geometry: every (level, vector) pair of one complete small run.
    const SieveConfig sc = cfg.sieve_config(8, 3);
    const std::uint64_t needed = to_u64(height_sq_power(sc.R, sc.depth), "height bound");
    BestApproxSequence seq = enumerate_best_approx(theta, needed, cfg.threads);
    std::optional<RunResult> run;
    try {
      run.emplace(run_sieve(theta, sc, seq, RunOptions{cfg.threads, 0, nullptr, {}}));
    } catch (const NoSurvivor& e) {
      log << name << ": geometry run stopped: " << e.what() << '\n';
      status = kExitViolation;
      continue;
    }
    std::size_t pairs = 0;
    for (const auto& rec : run->journal.levels) {
      for (const auto& v : rec.stats.vectors) {
        ++pairs;
        if (dangerous_children(rec.rect, v.m, sc) != full_grid_dangerous(rec.rect, v.m, sc)) {
          status = kExitViolation;
          log << name << ": strip walk differs from full grid at level " << rec.level << ", m = (" << v.m.m1 << ", "
              << v.m.m2 << ")\n";
        }
      }
    }
    log << name << ": strip walk checked against full grid on " << pairs << " (level, vector) pairs (R = " << sc.R
        << ", depth = " << sc.depth << ")\n";
  }
  return status;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Construct and verify shifts eta in BAD^theta(2/3, 1/3)", "badtheta"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string policy = "lexicographic";
  std::uint64_t R = 0;
  unsigned depth = 0;
  std::uint64_t bound = 0;
  std::string theta;
  std::string catalog_name;
  std::string certificate;

  auto add_theta = [&](CLI::App* sub) {
    sub->add_option("--theta", theta, "theta pair 't1,t2' as p/q or decimal literals");
    sub->add_option("--catalog", catalog_name, "named theta from `catalog list`");
    sub->add_option("--threads", cfg.threads, "worker threads")->capture_default_str();
    sub->add_option("--out", cfg.out, "output directory")->capture_default_str();
  };
  auto add_sieve = [&](CLI::App* sub) {
    sub->add_option("--R", R, "subdivision parameter R >= 2");
    sub->add_option("--depth", depth, "number of sieve levels N >= 1");
    sub->add_option("--policy", policy, "survivor policy: lexicographic | seeded-random")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "seed for seeded-random")->capture_default_str();
  };

  auto* best = app.add_subcommand("best-approx", "enumerate best approximation vectors and audit them");
  add_theta(best);
  best->add_option("--bound", bound, "largest M^2 to enumerate (default 10000)");

  auto* construct = app.add_subcommand("construct", "run the nested-rectangle sieve and emit a certificate");
  add_theta(construct);
  add_sieve(construct);
  construct->add_option("--Q", cfg.Q, "horizon for the BAD^theta score stored in the certificate")->capture_default_str();
  construct->add_flag("--resume", cfg.resume, "continue from the journal in --out");

  auto* verify = app.add_subcommand("verify", "recheck a certificate with the brute-force oracles");
  add_theta(verify);
  verify->add_option("--certificate", certificate, "certificate path (default <out>/certificate.json)");
  verify->add_option("--Q", cfg.Q, "horizon for the BAD scores")->capture_default_str();
  verify->add_flag("--trace", cfg.trace, "write running-minimum traces as two-column data");

  auto* cross = app.add_subcommand("crosscheck", "compare fast paths against brute-force oracles");
  add_theta(cross);
  add_sieve(cross);
  cross->add_option("--bound", bound, "largest M^2 for the enumeration check (default 3600)");

  auto* cat = app.add_subcommand("catalog", "built-in theta pairs");
  auto* cat_list = cat->add_subcommand("list", "list the catalog");
  cat->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (!theta.empty()) cfg.theta = theta;
    if (!catalog_name.empty()) cfg.catalog = catalog_name;
    if (!certificate.empty()) cfg.certificate = certificate;
    if (R != 0) cfg.R = R;
    if (depth != 0) cfg.depth = depth;
    if (bound != 0 || (best->count("--bound") + cross->count("--bound")) > 0) cfg.bound = bound;
    if (construct->count("--R") + cross->count("--R") > 0) cfg.R = R;
    if (construct->count("--depth") + cross->count("--depth") > 0) cfg.depth = depth;
    cfg.policy = parse_policy(policy);

    if (*best) return cmd_best_approx(cfg, out);
    if (*construct) return cmd_construct(cfg, out);
    if (*verify) return cmd_verify(cfg, out);
    if (*cross) return cmd_crosscheck(cfg, out);
    if (*cat_list) return cmd_catalog_list(out);
    return kExitConfig;
  } catch (const PrecisionExhausted& e) {
    err << "precision exhausted: " << e.what() << "; supply about " << e.extra_digits() << " more digits of theta\n";
    return kExitPrecision;
  } catch (const DegenerateForm& e) {
    err << "degenerate form: " << e.what() << '\n';
    return kExitPrecision;
  } catch (const NoSurvivor& e) {
    err << "no survivor: " << e.what() << '\n';
    return kExitNoSurvivor;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "fatal: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace badtheta
