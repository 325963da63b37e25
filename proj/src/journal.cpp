#include "badtheta/journal.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "badtheta/errors.hpp"

namespace badtheta {

namespace {

Rational rational_at(const nlohmann::json& j, const char* key) {
  return parse_rational(j.at(key).get<std::string>());
}

Json point_to_json(const Point& p) {
  Json j;
  j["x1"] = to_string(p.x1);
  j["x2"] = to_string(p.x2);
  return j;
}

Point point_from_json(const nlohmann::json& j) { return {rational_at(j, "x1"), rational_at(j, "x2")}; }

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << hash;
  return hex.str();
}

Json theta_to_json(const ThetaForm& theta) {
  Json j;
  j["theta1"] = to_string(theta.theta1());
  j["theta2"] = to_string(theta.theta2());
  j["declared_error"] = to_string(theta.declared_error());
  return j;
}

ThetaForm theta_from_json(const nlohmann::json& j) {
  return guarded("theta", [&] {
    return ThetaForm(rational_at(j, "theta1"), rational_at(j, "theta2"), rational_at(j, "declared_error"));
  });
}

std::string theta_fingerprint(const ThetaForm& theta) { return fnv1a_hex(theta_to_json(theta).dump()); }

Json config_to_json(const SieveConfig& cfg) {
  Json j;
  j["R"] = cfg.R;
  j["depth"] = cfg.depth;
  j["policy"] = to_string(cfg.policy);
  j["seed"] = cfg.seed;
  return j;
}

SieveConfig config_from_json(const nlohmann::json& j) {
  return guarded("config", [&] {
    SieveConfig cfg;
    cfg.R = j.at("R").get<std::uint64_t>();
    cfg.depth = j.at("depth").get<unsigned>();
    cfg.policy = parse_policy(j.at("policy").get<std::string>());
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
  });
}

Json rectangle_to_json(const Rectangle& rect) {
  Json j;
  j["b1"] = to_string(rect.b1);
  j["b2"] = to_string(rect.b2);
  j["level"] = rect.level;
  return j;
}

Rectangle rectangle_from_json(const nlohmann::json& j) {
  return guarded("rectangle", [&] {
    return Rectangle{rational_at(j, "b1"), rational_at(j, "b2"), j.at("level").get<unsigned>()};
  });
}

std::string journal_header_line(const RunJournal& journal) {
  Json j;
  j["record"] = "header";
  j["schema"] = kJournalSchema;
  j["config"] = config_to_json(journal.config);
  j["theta"] = theta_to_json(journal.theta);
  Json seq;
  seq["height_sq_max"] = journal.sequence_height_sq_max;
  seq["count"] = journal.sequence_count;
  seq["fingerprint"] = journal.sequence_fingerprint;
  j["sequence"] = seq;
  j["base"] = rectangle_to_json(journal.base);
  return j.dump();
}

std::string journal_level_line(const LevelRecord& record, std::uint64_t R) {
  Json j;
  j["record"] = "level";
  j["level"] = record.level;
  j["rect"] = rectangle_to_json(record.rect);
  Json window = Json::array();
  for (const auto& v : record.stats.vectors) {
    Json w;
    w["index"] = v.index;
    w["kind"] = to_string(v.kind);
    w["m1"] = v.m.m1;
    w["m2"] = v.m.m2;
    w["H"] = v.kills;
    w["gap_held"] = v.gap_held;
    w["strips_per_line"] = v.strips_per_line;
    window.push_back(std::move(w));
  }
  j["window"] = std::move(window);
  Json totals;
  totals["type1"] = record.stats.type1_total;
  totals["type2"] = record.stats.type2_total;
  totals["killed"] = record.stats.killed;
  totals["survivors"] = record.stats.survivors;
  j["totals"] = totals;
  const DangerBounds b = danger_bounds(R);
  Json bounds;
  bounds["H_type1"] = b.per_vector_type1;
  bounds["H_type2"] = b.per_vector_type2;
  bounds["type1_total"] = b.type1_total;
  bounds["type2_total"] = b.type2_total;
  bounds["total"] = b.total;
  j["bounds"] = bounds;
  if (record.chosen) {
    Json c;
    c["i"] = record.chosen->i;
    c["j"] = record.chosen->j;
    j["chosen"] = c;
  } else {
    j["chosen"] = nullptr;
  }
  return j.dump();
}

std::string journal_final_line(const RunJournal& journal) {
  Json j;
  j["record"] = "final";
  j["eta"] = journal.eta ? point_to_json(*journal.eta) : Json(nullptr);
  return j.dump();
}

void write_journal(std::ostream& out, const RunJournal& journal) {
  out << journal_header_line(journal) << '\n';
  for (const auto& rec : journal.levels) out << journal_level_line(rec, journal.config.R) << '\n';
  if (journal.eta) out << journal_final_line(journal) << '\n';
}

RunJournal read_journal(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("journal is empty");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed journal header: ") + e.what());
  }
  return guarded("journal", [&] {
    if (header.at("record") != "header" || header.at("schema") != kJournalSchema) {
      throw ConfigError("not a journal of schema " + std::string(kJournalSchema));
    }
    RunJournal journal{config_from_json(header.at("config")),
                       theta_from_json(header.at("theta")),
                       header.at("sequence").at("fingerprint").get<std::string>(),
                       header.at("sequence").at("height_sq_max").get<std::uint64_t>(),
                       header.at("sequence").at("count").get<std::size_t>(),
                       rectangle_from_json(header.at("base")),
                       {},
                       {}};
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception&) {
        if (in.peek() == std::char_traits<char>::eof()) break;  // torn final write
        throw;
      }
      const auto kind = j.at("record").get<std::string>();
      if (kind == "final") {
        if (!j.at("eta").is_null()) journal.eta = point_from_json(j.at("eta"));
        continue;
      }
      if (kind != "level") throw ConfigError("unknown journal record '" + kind + "'");
      LevelRecord rec;
      rec.level = j.at("level").get<unsigned>();
      rec.rect = rectangle_from_json(j.at("rect"));
      for (const auto& w : j.at("window")) {
        VectorStats v;
        v.index = w.at("index").get<std::size_t>();
        v.kind = parse_kind(w.at("kind").get<std::string>());
        v.m = {w.at("m1").get<std::int64_t>(), w.at("m2").get<std::int64_t>()};
        v.kills = w.at("H").get<std::uint64_t>();
        v.gap_held = w.at("gap_held").get<bool>();
        v.strips_per_line = w.at("strips_per_line").get<unsigned>();
        rec.stats.vectors.push_back(v);
      }
      const auto& t = j.at("totals");
      rec.stats.type1_total = t.at("type1").get<std::uint64_t>();
      rec.stats.type2_total = t.at("type2").get<std::uint64_t>();
      rec.stats.killed = t.at("killed").get<std::uint64_t>();
      rec.stats.survivors = t.at("survivors").get<std::uint64_t>();
      if (!j.at("chosen").is_null()) {
        rec.chosen = ChildIndex{j.at("chosen").at("i").get<std::uint64_t>(), j.at("chosen").at("j").get<std::uint64_t>()};
      }
      journal.levels.push_back(std::move(rec));
    }
    return journal;
  });
}

Json certificate_to_json(const Certificate& cert) {
  Json j;
  j["schema"] = kCertificateSchema;
  j["theta"] = theta_to_json(cert.theta);
  j["theta_fingerprint"] = theta_fingerprint(cert.theta);
  j["config"] = config_to_json(cert.config);
  j["eta"] = point_to_json(cert.eta);
  j["epsilon"] = to_string(cert.epsilon);
  j["level"] = cert.level;
  j["height_sq_bound"] = cert.height_sq_bound.get_str();
  j["verified_form_min"] = to_string(cert.verified_form_min);
  if (cert.form_argmin) {
    j["form_argmin"] = {cert.form_argmin->m1, cert.form_argmin->m2};
  } else {
    j["form_argmin"] = nullptr;
  }
  Json bt;
  bt["Q"] = cert.bad_theta_Q;
  bt["score_cubed"] = to_string(cert.bad_theta_cube);
  bt["argmin_q"] = cert.bad_theta_argmin;
  std::ostringstream approx;
  approx << std::setprecision(10) << std::cbrt(cert.bad_theta_cube.get_d());
  bt["score_approx"] = approx.str();
  j["bad_theta_score"] = bt;
  j["sequence_fingerprint"] = cert.sequence_fingerprint;
  return j;
}

Certificate certificate_from_json(const nlohmann::json& j) {
  return guarded("certificate", [&] {
    if (j.at("schema") != kCertificateSchema) throw ConfigError("not a certificate of schema " + std::string(kCertificateSchema));
    Certificate cert{theta_from_json(j.at("theta")),
                     config_from_json(j.at("config")),
                     point_from_json(j.at("eta")),
                     rational_at(j, "epsilon"),
                     j.at("level").get<unsigned>(),
                     Integer(j.at("height_sq_bound").get<std::string>(), 10),
                     rational_at(j, "verified_form_min"),
                     {},
                     j.at("bad_theta_score").at("Q").get<std::uint64_t>(),
                     parse_rational(j.at("bad_theta_score").at("score_cubed").get<std::string>()),
                     j.at("bad_theta_score").at("argmin_q").get<std::uint64_t>(),
                     j.at("sequence_fingerprint").get<std::string>()};
    if (!j.at("form_argmin").is_null()) {
      cert.form_argmin = IntegerPair{j.at("form_argmin").at(0).get<std::int64_t>(), j.at("form_argmin").at(1).get<std::int64_t>()};
    }
    if (j.at("theta_fingerprint").get<std::string>() != theta_fingerprint(cert.theta)) {
      throw ConfigError("certificate theta fingerprint does not match its theta record");
    }
    return cert;
  });
}

Json report_to_json(const ScoreReport& report) {
  Json j;
  j["schema"] = kReportSchema;
  j["name"] = report.name;
  j["bound"] = report.bound;
  j[report.root == 1 ? "score" : "score_cubed"] = to_string(report.measure);
  std::ostringstream approx;
  approx << std::setprecision(10) << report.approx();
  j["score_approx"] = approx.str();
  if (report.argmin_vector) {
    j["argmin"] = {report.argmin_vector->m1, report.argmin_vector->m2};
  } else {
    j["argmin"] = report.argmin_q;
  }
  j["records"] = report.trace.size();
  return j;
}

}  // namespace badtheta
