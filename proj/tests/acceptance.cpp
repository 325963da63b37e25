// Desk-scale acceptance run. One PASS/FAIL line per criterion; detail lines
// are indented. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "badtheta/bestapprox.hpp"
#include "badtheta/catalog.hpp"
#include "badtheta/cli.hpp"
#include "badtheta/sieve.hpp"
#include "badtheta/verify.hpp"

using namespace badtheta;
namespace fs = std::filesystem;

namespace {

// Pinned thresholds.
constexpr std::uint64_t kOracleBound = 3600;
constexpr double kOracleSeconds = 300;
constexpr std::uint64_t kAuditBound = 10000;
constexpr double kAuditSeconds = 600;
constexpr std::size_t kGrowthStep = 28;
constexpr std::uint64_t kSieveR = 16;
constexpr unsigned kSieveDepth = 4;
constexpr double kSieveSeconds = 600;
constexpr std::uint64_t kScoreQ = 100000;
constexpr double kScoreSeconds = 300;
constexpr std::uint64_t kDecayLowQ = 10;
constexpr double kDecayFactor = 1000;  // on the score itself, i.e. 10^9 on cubes
constexpr std::uint64_t kGeometryR = 8;
constexpr unsigned kGeometryDepth = 3;
constexpr unsigned kThreadsA = 1;
constexpr unsigned kThreadsB = 4;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(bool ok, int id, const std::string& text) {
  std::cout << (ok ? "PASS" : "FAIL") << "  [" << id << "] " << text << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

unsigned worker_count() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

struct SieveOutcome {
  std::string name;
  bool ran = false;
  bool c4 = false;
  bool c5 = false;
  bool c6 = false;
};

}  // namespace

int main() {
  const unsigned threads = worker_count();
  std::cout << "acceptance: " << catalog().size() << " catalog theta, " << threads << " worker threads\n";

  // 1. oracle equivalence
  {
    auto t0 = Clock::now();
    bool equal = true;
    for (const auto& e : catalog()) {
      ThetaForm theta = e.form();
      auto fast = enumerate_best_approx(theta, kOracleBound, threads);
      auto slow = brute_best_approx(theta, kOracleBound);
      bool same = fast.vectors == slow.vectors;
      equal = equal && same;
      std::cout << "      " << e.name << ": " << fast.vectors.size() << " vs " << slow.vectors.size() << " vectors"
                << (same ? "" : "  MISMATCH") << '\n';
    }
    double secs = seconds_since(t0);
    verdict(equal && secs < kOracleSeconds, 1,
            "enumeration == brute force at M^2 <= " + std::to_string(kOracleBound) + " (" + fmt(secs) + " s)");
  }

  // 2 and 3. audits
  {
    auto t0 = Clock::now();
    std::size_t mink = 0;
    std::map<std::string, std::size_t> growth{{"global", 0}, {"type1", 0}, {"type2", 0}};
    for (const auto& e : catalog()) {
      auto seq = enumerate_best_approx(e.form(), kAuditBound, threads);
      auto m = audit_minkowski(seq);
      auto g = audit_growth(seq, kGrowthStep);
      mink += m.size();
      for (const auto& v : g) ++growth[v.scope];
      std::cout << "      " << e.name << ": " << seq.vectors.size() << " vectors, " << m.size()
                << " minkowski and " << g.size() << " growth violations\n";
    }
    double secs = seconds_since(t0);
    verdict(mink == 0 && secs < kAuditSeconds, 2,
            "zeta^2 (M^2_next)^3 <= 1 on all catalog sequences to M^2 <= " + std::to_string(kAuditBound) + " (" +
                fmt(secs) + " s)");
    verdict(growth["global"] == 0 && growth["type1"] == 0 && growth["type2"] == 0, 3,
            "M^2_{nu+28} >= 4 M^2_nu globally (" + std::to_string(growth["global"]) + "), type1 (" +
                std::to_string(growth["type1"]) + "), type2 (" + std::to_string(growth["type2"]) + ")");
  }

  // 4, 5, 6. sieve runs
  std::vector<SieveOutcome> outcomes;
  const SieveConfig cfg{kSieveR, kSieveDepth, SurvivorPolicy::Lexicographic, 0};
  const DangerBounds bounds = danger_bounds(kSieveR);
  const double log2R = std::log2(static_cast<double>(kSieveR));
  for (const auto& e : catalog()) {
    SieveOutcome out{e.name};
    ThetaForm theta = e.form();
    std::cout << "      " << e.name << ":\n";
    try {
      auto t0 = Clock::now();
      const std::uint64_t needed = std::stoull(height_sq_power(kSieveR, kSieveDepth).get_str());
      BestApproxSequence seq = enumerate_best_approx(theta, needed, threads);
      RunOptions opts;
      opts.threads = threads;
      opts.verify_Q = kScoreQ;
      RunResult run = run_sieve(theta, cfg, seq, opts);
      double secs = seconds_since(t0);
      out.ran = true;

      bool within = secs < kSieveSeconds;
      for (const auto& rec : run.journal.levels) {
        std::uint64_t h1 = 0;
        std::uint64_t h2 = 0;
        std::size_t n1 = 0;
        std::size_t n2 = 0;
        for (const auto& v : rec.stats.vectors) {
          if (v.kind == Kind::Type1) {
            h1 = std::max(h1, v.kills);
            ++n1;
          } else {
            h2 = std::max(h2, v.kills);
            ++n2;
          }
        }
        bool level_ok = rec.stats.survivors >= 1 && h1 <= bounds.per_vector_type1 &&
                        h2 <= bounds.per_vector_type2 && static_cast<double>(rec.stats.killed) < bounds.total &&
                        static_cast<double>(n1) <= 56 * log2R && static_cast<double>(n2) <= 28 * log2R;
        within = within && level_ok;
        std::cout << "        level " << rec.level << ": window " << n1 << "+" << n2 << ", H1max " << h1
                  << ", H2max " << h2 << ", totals " << rec.stats.type1_total << "/" << rec.stats.type2_total
                  << ", killed " << rec.stats.killed << ", survivors " << rec.stats.survivors << '\n';
      }
      out.c4 = within && run.journal.levels.size() == kSieveDepth;
      std::cout << "        sieve " << fmt(secs) << " s\n";

      // 5: independent recomputation from a fresh enumeration
      BestApproxSequence fresh = enumerate_best_approx(theta, needed, 1);
      ScoreReport lf = linear_form_score(theta, run.certificate.eta, fresh);
      out.c5 = lf.measure > cfg.epsilon() && lf.measure == run.certificate.verified_form_min;
      std::cout << "        min ||eta.m|| = " << to_decimal(lf.measure, 8) << " vs epsilon "
                << to_decimal(cfg.epsilon(), 6) << '\n';

      // 6: direct score
      auto t1 = Clock::now();
      ScoreReport bt = bad_theta_score(theta, run.certificate.eta, kScoreQ, threads);
      double bsecs = seconds_since(t1);
      const bool stable = bt.last_record_q() <= kScoreQ / 10;
      out.c6 = bt.measure > 0 && stable && bsecs < kScoreSeconds && bt.measure == run.certificate.bad_theta_cube;
      ScoreReport longer = bad_theta_score(theta, run.certificate.eta, 2 * kScoreQ, threads);
      std::cout << "        BAD^theta score " << fmt(bt.approx(), 6) << " at q = " << bt.argmin_q
                << ", last record q = " << bt.last_record_q() << " (" << fmt(bsecs) << " s); floor at Q = "
                << 2 * kScoreQ << ": " << fmt(longer.approx(), 6) << '\n';
    } catch (const std::exception& ex) {
      std::cout << "        run failed: " << ex.what() << '\n';
    }
    outcomes.push_back(out);
  }
  bool all4 = true;
  bool all5 = true;
  bool all6 = true;
  for (const auto& o : outcomes) {
    all4 = all4 && o.c4;
    all5 = all5 && o.c5;
    all6 = all6 && o.c6;
  }
  verdict(all4, 4,
          "R = 16, N = 4: survivors at every level, H1 <= 1280, H2 <= 1536, totals < 1024000, windows within "
          "56/28 log2 R");
  verdict(all5, 5, "linear form minimum > 1/65536 and equal to the certificate");
  verdict(all6, 6, "BAD^theta score at Q = 10^5 positive with no record in (10^4, 10^5]");

  // 7. Liouville pair outside BAD(2/3,1/3)
  {
    ThetaForm theta = catalog_entry("liouville").form();
    ScoreReport low = bad_alpha_beta_score(theta, kDecayLowQ, threads);
    ScoreReport high = bad_alpha_beta_score(theta, kScoreQ, threads);
    double ratio = high.measure > 0 ? low.approx() / high.approx() : INFINITY;
    const Rational factor_cubed(static_cast<long>(kDecayFactor * kDecayFactor * kDecayFactor));
    bool decays = high.measure * factor_cubed <= low.measure;
    bool rest = false;
    for (const auto& o : outcomes) {
      if (o.name == "liouville") rest = o.c4 && o.c5 && o.c6;
    }
    verdict(decays && rest, 7,
            "liouville BAD(2/3,1/3) score " + fmt(low.approx()) + " at Q = 10 -> " + fmt(high.approx()) +
                " at Q = 10^5 (decay " + fmt(ratio) + "x), criteria 4-6 " + (rest ? "hold" : "FAIL"));
  }

  // 8. strip walk vs full grid
  {
    const SieveConfig small{kGeometryR, kGeometryDepth, SurvivorPolicy::Lexicographic, 0};
    std::size_t pairs = 0;
    std::size_t mismatches = 0;
    std::uint64_t marked = 0;
    for (const auto& e : catalog()) {
      ThetaForm theta = e.form();
      const std::uint64_t needed = std::stoull(height_sq_power(kGeometryR, kGeometryDepth).get_str());
      BestApproxSequence seq = enumerate_best_approx(theta, needed, threads);
      RunResult run = run_sieve(theta, small, seq);
      for (const auto& rec : run.journal.levels) {
        for (const auto& v : rec.stats.vectors) {
          ++pairs;
          auto walk = dangerous_children(rec.rect, v.m, small);
          auto grid = full_grid_dangerous(rec.rect, v.m, small);
          marked += grid.size();
          if (walk != grid) ++mismatches;
        }
      }
    }
    verdict(mismatches == 0 && pairs > 0, 8,
            "strip walk == full grid on " + std::to_string(pairs) + " (level, vector) pairs of R = 8, N = 3 runs (" +
                std::to_string(marked) + " marked children, " + std::to_string(mismatches) + " mismatches)");
  }

  // 9. determinism across thread counts
  {
    fs::path root = fs::temp_directory_path() / "badtheta_acceptance";
    fs::remove_all(root);
    bool identical = true;
    for (const auto& e : catalog()) {
      RunConfig run;
      run.catalog = e.name;
      run.R = kSieveR;
      run.depth = kSieveDepth;
      std::ostringstream sink;
      run.threads = kThreadsA;
      run.out = (root / (e.name + "_a")).string();
      int ca = cmd_construct(run, sink);
      run.threads = kThreadsB;
      run.out = (root / (e.name + "_b")).string();
      int cb = cmd_construct(run, sink);
      bool same = ca == kExitOk && cb == kExitOk &&
                  slurp(root / (e.name + "_a") / "journal.jsonl") == slurp(root / (e.name + "_b") / "journal.jsonl") &&
                  slurp(root / (e.name + "_a") / "certificate.json") ==
                      slurp(root / (e.name + "_b") / "certificate.json");
      identical = identical && same;
      std::cout << "      " << e.name << ": " << (same ? "identical" : "DIFFERENT") << '\n';
    }
    fs::remove_all(root);
    verdict(identical, 9,
            "construct with " + std::to_string(kThreadsA) + " and " + std::to_string(kThreadsB) +
                " threads gives byte-identical journals and certificates");
  }

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
  return failures;
}
