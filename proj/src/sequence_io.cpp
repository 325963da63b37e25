#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "badtheta/bestapprox.hpp"
#include "badtheta/errors.hpp"
#include "badtheta/journal.hpp"

namespace badtheta {

namespace {

constexpr const char* kSequenceSchema = "badtheta.sequence/1";

}  // namespace

void write_sequence(std::ostream& out, const BestApproxSequence& seq) {
  nlohmann::ordered_json header;
  header["schema"] = kSequenceSchema;
  header["theta"] = theta_to_json(seq.theta);
  header["height_sq_max"] = seq.height_sq_max;
  header["count"] = seq.vectors.size();
  out << header.dump() << '\n';
  for (const auto& v : seq.vectors) {
    nlohmann::ordered_json rec;
    rec["index"] = v.index;
    rec["m0"] = v.m0.get_si();
    rec["m1"] = v.m.m1;
    rec["m2"] = v.m.m2;
    rec["height_sq"] = v.height_sq;
    rec["zeta"] = to_string(v.zeta);
    rec["kind"] = to_string(v.kind);
    out << rec.dump() << '\n';
  }
}

BestApproxSequence read_sequence(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("sequence file is empty");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
    if (header.at("schema").get<std::string>() != kSequenceSchema) {
      throw ConfigError("unsupported sequence schema " + header.at("schema").dump());
    }
    BestApproxSequence seq{theta_from_json(header.at("theta")), {}, header.at("height_sq_max").get<std::uint64_t>()};
    const auto count = header.at("count").get<std::size_t>();
    while (seq.vectors.size() < count && std::getline(in, line)) {
      auto rec = nlohmann::json::parse(line);
      BestApproxVector v;
      v.index = rec.at("index").get<std::size_t>();
      v.m0 = static_cast<long>(rec.at("m0").get<std::int64_t>());
      v.m = {rec.at("m1").get<std::int64_t>(), rec.at("m2").get<std::int64_t>()};
      v.height_sq = rec.at("height_sq").get<std::uint64_t>();
      v.zeta = parse_rational(rec.at("zeta").get<std::string>());
      v.kind = parse_kind(rec.at("kind").get<std::string>());
      seq.vectors.push_back(std::move(v));
    }
    if (seq.vectors.size() != count) throw ConfigError("sequence file truncated");
    return seq;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed sequence file: ") + e.what());
  }
}

std::string sequence_fingerprint(const BestApproxSequence& seq) {
  std::ostringstream text;
  write_sequence(text, seq);
  return fnv1a_hex(text.str());
}

}  // namespace badtheta
