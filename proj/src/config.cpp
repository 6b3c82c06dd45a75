#include "qrt/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "qrt/version.hpp"

namespace qrt {

namespace {

using json = nlohmann::ordered_json;

struct Collector {
  std::vector<ConfigViolation> errors;
  void err(const std::string& path, const std::string& message) {
    errors.push_back({path, message});
  }
};

void check_known_keys(const json& j, const std::string& path,
                      const std::set<std::string>& known, Collector& c) {
  if (!j.is_object()) return;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.contains(it.key())) c.err(path + "." + it.key(), "unknown field");
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (j.is_object() && j.contains(key)) return j.at(key).get<T>();
  return fallback;
}

double get_number(const json& j, const std::string& key, double fallback,
                  const std::string& path, Collector& c, double lo, double hi,
                  bool lo_open = false, bool hi_open = false) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    c.err(path + "." + key, "must be a number");
    return fallback;
  }
  const double v = j.at(key).get<double>();
  const bool lo_ok = lo_open ? v > lo : v >= lo;
  const bool hi_ok = hi_open ? v < hi : v <= hi;
  if (!lo_ok || !hi_ok) {
    std::ostringstream os;
    os << "must be in " << (lo_open ? "(" : "[") << lo << ", " << hi << (hi_open ? ")" : "]");
    c.err(path + "." + key, os.str());
  }
  return v;
}

ChannelModel parse_channel(const json& j, const std::string& path, Collector& c) {
  ChannelModel ch;
  if (j.is_null()) return ch;
  check_known_keys(j, path, {"flip_probability", "loss_probability"}, c);
  ch.flip_probability = get_number(j, "flip_probability", 0.0, path, c, 0.0, 1.0);
  ch.loss_probability = get_number(j, "loss_probability", 0.0, path, c, 0.0, 1.0);
  return ch;
}

AdversarySpec parse_adversary(const json& j, const std::string& path, Collector& c,
                              bool allow_adaptive) {
  AdversarySpec spec;
  if (j.is_null()) return spec;
  if (!j.is_object()) {
    c.err(path, "must be an object");
    return spec;
  }
  const std::string type = get_or<std::string>(j, "type", "none");
  if (type == "none") {
    check_known_keys(j, path, {"type"}, c);
    spec.type = AdversarySpec::Type::None;
  } else if (type == "intercept_resend") {
    check_known_keys(j, path, {"type", "fraction", "basis_policy"}, c);
    spec.type = AdversarySpec::Type::InterceptResend;
    spec.intercept.fraction = get_number(j, "fraction", 1.0, path, c, 0.0, 1.0);
    const std::string policy = get_or<std::string>(j, "basis_policy", "random");
    if (policy == "random") {
      spec.intercept.basis_policy = InterceptResendParams::BasisPolicy::Random;
    } else if (policy == "rectilinear" || policy == "diagonal") {
      spec.intercept.basis_policy = InterceptResendParams::BasisPolicy::Fixed;
      spec.intercept.fixed_basis =
          policy == "rectilinear" ? Basis::Rectilinear : Basis::Diagonal;
    } else {
      c.err(path + ".basis_policy", "must be random, rectilinear, or diagonal");
    }
  } else if (type == "adaptive") {
    if (!allow_adaptive) {
      c.err(path + ".type", "adaptive arms cannot nest");
      return spec;
    }
    check_known_keys(j, path, {"type", "epsilon", "arms"}, c);
    spec.type = AdversarySpec::Type::Adaptive;
    spec.epsilon = get_number(j, "epsilon", 0.1, path, c, 0.0, 1.0);
    if (!j.contains("arms") || !j.at("arms").is_array() || j.at("arms").empty()) {
      c.err(path + ".arms", "adaptive adversary needs a nonempty arm list");
    } else {
      std::size_t i = 0;
      for (const auto& arm : j.at("arms")) {
        spec.arms.push_back(
            parse_adversary(arm, path + ".arms[" + std::to_string(i) + "]", c, false));
        ++i;
      }
    }
  } else {
    c.err(path + ".type", "unknown adversary type: " + type);
  }
  return spec;
}

SessionConfig parse_session(const json& j, const std::string& path, Collector& c) {
  SessionConfig s;
  if (j.is_null()) return s;
  check_known_keys(j, path,
                   {"n_qubits", "check_fraction", "qber_abort_threshold",
                    "reconciliation_rounds", "reconciliation_block_init", "pa_safety_margin",
                    "key_policy", "fixed_length"},
                   c);
  s.n_qubits = get_or<std::uint64_t>(j, "n_qubits", s.n_qubits);
  if (s.n_qubits == 0) c.err(path + ".n_qubits", "must be positive");
  s.check_fraction =
      get_number(j, "check_fraction", s.check_fraction, path, c, 0.0, 1.0, true, true);
  s.qber_abort_threshold = get_number(j, "qber_abort_threshold", s.qber_abort_threshold, path,
                                      c, 0.0, 0.5, true, true);
  s.reconciliation_rounds =
      get_or<std::uint64_t>(j, "reconciliation_rounds", s.reconciliation_rounds);
  if (s.reconciliation_rounds == 0) c.err(path + ".reconciliation_rounds", "must be positive");
  s.reconciliation_block_init =
      get_or<std::uint64_t>(j, "reconciliation_block_init", s.reconciliation_block_init);
  if (s.reconciliation_block_init == 0)
    c.err(path + ".reconciliation_block_init", "must be positive");
  s.pa_safety_margin = get_or<std::uint64_t>(j, "pa_safety_margin", s.pa_safety_margin);
  const std::string policy = get_or<std::string>(j, "key_policy", "entropy-bound");
  if (policy == "entropy-bound") {
    s.key_policy.kind = KeyPolicy::Kind::EntropyBound;
  } else if (policy == "fixed-length") {
    s.key_policy.kind = KeyPolicy::Kind::FixedLength;
    s.key_policy.fixed_length = get_or<std::uint64_t>(j, "fixed_length", 0);
    if (s.key_policy.fixed_length == 0)
      c.err(path + ".fixed_length", "fixed-length policy needs a positive length");
  } else {
    c.err(path + ".key_policy", "must be entropy-bound or fixed-length");
  }
  if (s.n_qubits != 0 &&
      s.check_fraction * static_cast<double>(s.n_qubits) < 16.0)
    c.err(path + ".check_fraction", "check_fraction * n_qubits must be at least 16");
  return s;
}

PqcSection parse_pqc(const json& j, const std::string& path, Collector& c) {
  PqcSection p;
  if (j.is_null()) return p;
  p.enabled = true;
  check_known_keys(j, path, {"schemes", "selfcheck_records", "kat_files", "attacks"}, c);
  if (j.contains("schemes")) {
    p.schemes.clear();
    for (const auto& s : j.at("schemes")) {
      const auto name = s.get<std::string>();
      const bool merkle = name.rfind("merkle-d", 0) == 0;
      if (name != "lamport" && name != "toy-lwe" && !merkle) {
        c.err(path + ".schemes", "unknown scheme: " + name);
        continue;
      }
      if (merkle) {
        try {
          const unsigned depth = static_cast<unsigned>(std::stoul(name.substr(8)));
          if (depth < 1 || depth > 16) c.err(path + ".schemes", name + ": depth out of [1,16]");
        } catch (const std::exception&) {
          c.err(path + ".schemes", name + ": malformed depth");
        }
      }
      p.schemes.push_back(name);
    }
  }
  p.selfcheck_records = get_or<std::uint64_t>(j, "selfcheck_records", p.selfcheck_records);
  if (j.contains("kat_files"))
    p.kat_files = j.at("kat_files").get<std::vector<std::string>>();
  if (j.contains("attacks")) {
    const json& a = j.at("attacks");
    check_known_keys(a, path + ".attacks",
                     {"ots_reuse", "lwe_bruteforce", "lwe_n", "lwe_q", "lwe_error_bound",
                      "lwe_m", "lwe_budget"},
                     c);
    p.attacks.ots_reuse = get_or<bool>(a, "ots_reuse", true);
    p.attacks.lwe_bruteforce = get_or<bool>(a, "lwe_bruteforce", true);
    p.attacks.lwe_demo_params.n =
        get_or<std::uint32_t>(a, "lwe_n", p.attacks.lwe_demo_params.n);
    p.attacks.lwe_demo_params.q =
        get_or<std::uint32_t>(a, "lwe_q", p.attacks.lwe_demo_params.q);
    p.attacks.lwe_demo_params.error_bound =
        get_or<std::uint32_t>(a, "lwe_error_bound", p.attacks.lwe_demo_params.error_bound);
    p.attacks.lwe_demo_params.m =
        get_or<std::uint32_t>(a, "lwe_m", p.attacks.lwe_demo_params.m);
    p.attacks.lwe_budget = get_or<std::uint64_t>(a, "lwe_budget", p.attacks.lwe_budget);
    try {
      p.attacks.lwe_demo_params.validate();
    } catch (const StructuralError& e) {
      c.err(path + ".attacks", e.what());
    }
  }
  return p;
}

StateproofSection parse_stateproof(const json& j, const std::string& path, Collector& c,
                                   std::vector<std::string>& warnings) {
  StateproofSection s;
  if (j.is_null()) return s;
  s.enabled = true;
  check_known_keys(j, path,
                   {"stakes", "merkle_depth", "tau", "cadence", "epochs", "checkpoint_epoch",
                    "time_travel"},
                   c);
  if (j.contains("stakes")) {
    s.stakes = j.at("stakes").get<std::vector<std::uint64_t>>();
    if (s.stakes.empty()) c.err(path + ".stakes", "need at least one validator");
    for (std::size_t i = 0; i < s.stakes.size(); ++i)
      if (s.stakes[i] == 0)
        c.err(path + ".stakes[" + std::to_string(i) + "]", "stake must be positive");
  }
  s.merkle_depth = get_or<std::uint32_t>(j, "merkle_depth", s.merkle_depth);
  if (s.merkle_depth < 1 || s.merkle_depth > 16)
    c.err(path + ".merkle_depth", "must be in [1,16]");
  if (j.contains("tau")) {
    // Accept either a decimal string or a JSON number; numbers go through
    // their shortest round-trip text so 0.7 means exactly 7/10.
    if (j.at("tau").is_string())
      s.tau = j.at("tau").get<std::string>();
    else if (j.at("tau").is_number())
      s.tau = j.at("tau").dump();
    else
      c.err(path + ".tau", "must be a number or decimal string");
  }
  try {
    const auto r = s.tau_rational();
    const double v = r.to_double();
    if (!(v > 0.5 && v <= 1.0)) c.err(path + ".tau", "must be in (0.5, 1]");
    else if (v < 0.7 || v > 0.8)
      warnings.push_back(path + ".tau: outside the recommended [0.7, 0.8] band");
  } catch (const StructuralError& e) {
    c.err(path + ".tau", e.what());
  }
  s.cadence = get_or<std::uint64_t>(j, "cadence", s.cadence);
  if (s.cadence == 0) c.err(path + ".cadence", "must be positive");
  s.epochs = get_or<std::uint64_t>(j, "epochs", s.epochs);
  if (s.epochs == 0) c.err(path + ".epochs", "must be positive");
  s.checkpoint_epoch = get_or<std::uint64_t>(j, "checkpoint_epoch", 0);
  if (s.checkpoint_epoch > s.epochs)
    c.err(path + ".checkpoint_epoch", "beyond the last epoch");
  if (j.contains("time_travel")) {
    std::size_t i = 0;
    for (const auto& tj : j.at("time_travel")) {
      const std::string tpath = path + ".time_travel[" + std::to_string(i) + "]";
      check_known_keys(tj, tpath, {"adversary_fraction", "classical_forgery", "target_round"},
                       c);
      TimeTravelCase tc;
      tc.adversary_fraction =
          get_number(tj, "adversary_fraction", 0.3, tpath, c, 0.0, 1.0);
      tc.classical_forgery = get_or<bool>(tj, "classical_forgery", true);
      tc.target_round = get_or<std::uint64_t>(tj, "target_round", 0);
      if (tc.target_round != 0) {
        if (s.cadence != 0 && tc.target_round % s.cadence != 0)
          c.err(tpath + ".target_round", "must be a multiple of the cadence");
        if (s.cadence != 0 && tc.target_round > s.epochs * s.cadence)
          c.err(tpath + ".target_round", "beyond the last epoch");
      }
      s.time_travel.push_back(tc);
      ++i;
    }
  }
  return s;
}

}  // namespace

ConfigValidationError::ConfigValidationError(std::vector<ConfigViolation> violations)
    : StructuralError([&violations] {
        std::ostringstream os;
        os << "validation_errors:";
        for (const auto& v : violations) os << "\n  " << v.path << ": " << v.message;
        return os.str();
      }()),
      violations_(std::move(violations)) {}

LabConfig config_from_json(const nlohmann::ordered_json& j) {
  Collector c;
  LabConfig cfg;
  if (!j.is_object()) throw StructuralError("parse_error: config root must be an object");

  check_known_keys(j, "$",
                   {"schema_version", "master_seed", "output_dir", "full_transcripts",
                    "scenarios", "monitor", "pqc", "stateproof"},
                   c);
  cfg.schema_version = get_or<int>(j, "schema_version", kSchemaVersion);
  if (cfg.schema_version != kSchemaVersion)
    c.err("$.schema_version", "unsupported schema version");
  cfg.master_seed = get_or<std::uint64_t>(j, "master_seed", 0);
  cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir);
  if (cfg.output_dir.empty()) c.err("$.output_dir", "must not be empty");
  cfg.full_transcripts = get_or<bool>(j, "full_transcripts", false);

  if (j.contains("scenarios")) {
    std::size_t i = 0;
    std::map<std::string, std::vector<std::size_t>> name_positions;
    for (const auto& sj : j.at("scenarios")) {
      const std::string path = "scenarios[" + std::to_string(i) + "]";
      check_known_keys(sj, path, {"name", "channel", "adversary", "session", "sessions"}, c);
      ScenarioSpec sc;
      sc.name = get_or<std::string>(sj, "name", "");
      if (sc.name.empty()) c.err(path + ".name", "scenario name required");
      name_positions[sc.name].push_back(i);
      sc.channel = parse_channel(sj.contains("channel") ? sj.at("channel") : json(nullptr),
                                 path + ".channel", c);
      sc.adversary =
          parse_adversary(sj.contains("adversary") ? sj.at("adversary") : json(nullptr),
                          path + ".adversary", c, true);
      sc.session = parse_session(sj.contains("session") ? sj.at("session") : json(nullptr),
                                 path + ".session", c);
      sc.sessions = get_or<std::uint64_t>(sj, "sessions", 10);
      if (sc.sessions == 0) c.err(path + ".sessions", "must be at least 1");
      cfg.scenarios.push_back(std::move(sc));
      ++i;
    }
    for (const auto& [name, positions] : name_positions) {
      if (positions.size() > 1 && !name.empty()) {
        std::ostringstream os;
        os << "duplicate scenario name '" << name << "' at indices";
        for (auto p : positions) os << " " << p;
        c.err("scenarios", os.str());
      }
    }
  }

  if (j.contains("monitor") && !j.at("monitor").is_null()) {
    const json& m = j.at("monitor");
    check_known_keys(m, "monitor",
                     {"enabled", "calibration_sessions", "z_threshold", "cusum_k", "cusum_h"},
                     c);
    cfg.monitor.enabled = get_or<bool>(m, "enabled", true);
    cfg.monitor.calibration_sessions =
        get_or<std::uint64_t>(m, "calibration_sessions", cfg.monitor.calibration_sessions);
    if (cfg.monitor.calibration_sessions < 20)
      c.err("monitor.calibration_sessions", "must be at least 20");
    cfg.monitor.tuning.z_threshold =
        get_number(m, "z_threshold", 4.0, "monitor", c, 0.0, 1e9, true);
    if (m.contains("cusum_k") && !m.at("cusum_k").is_null())
      cfg.monitor.tuning.cusum_k = get_number(m, "cusum_k", 0.0, "monitor", c, 0.0, 1.0);
    if (m.contains("cusum_h") && !m.at("cusum_h").is_null())
      cfg.monitor.tuning.cusum_h =
          get_number(m, "cusum_h", 0.0, "monitor", c, 0.0, 1e9, true);
  }

  if (j.contains("pqc") && !j.at("pqc").is_null()) cfg.pqc = parse_pqc(j.at("pqc"), "pqc", c);
  if (j.contains("stateproof") && !j.at("stateproof").is_null())
    cfg.stateproof = parse_stateproof(j.at("stateproof"), "stateproof", c, cfg.warnings);

  if (!c.errors.empty()) throw ConfigValidationError(std::move(c.errors));
  return cfg;
}

LabConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("parse_error: cannot open config file: " + path);
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw StructuralError(std::string("parse_error: ") + e.what());
  }
  return config_from_json(j);
}

nlohmann::ordered_json effective_config_json(const LabConfig& cfg) {
  nlohmann::ordered_json j;
  j["schema_version"] = cfg.schema_version;
  j["master_seed"] = cfg.master_seed;
  j["output_dir"] = cfg.output_dir;
  j["full_transcripts"] = cfg.full_transcripts;

  auto scenarios = nlohmann::ordered_json::array();
  for (const auto& sc : cfg.scenarios) {
    nlohmann::ordered_json sj;
    sj["name"] = sc.name;
    sj["channel"] = {{"flip_probability", sc.channel.flip_probability},
                     {"loss_probability", sc.channel.loss_probability}};
    sj["adversary"] = sc.adversary.to_json();
    nlohmann::ordered_json sess;
    sess["n_qubits"] = sc.session.n_qubits;
    sess["check_fraction"] = sc.session.check_fraction;
    sess["qber_abort_threshold"] = sc.session.qber_abort_threshold;
    sess["reconciliation_rounds"] = sc.session.reconciliation_rounds;
    sess["reconciliation_block_init"] = sc.session.reconciliation_block_init;
    sess["pa_safety_margin"] = sc.session.pa_safety_margin;
    sess["key_policy"] = sc.session.key_policy.kind == KeyPolicy::Kind::EntropyBound
                             ? "entropy-bound"
                             : "fixed-length";
    if (sc.session.key_policy.kind == KeyPolicy::Kind::FixedLength)
      sess["fixed_length"] = sc.session.key_policy.fixed_length;
    sj["session"] = sess;
    sj["sessions"] = sc.sessions;
    scenarios.push_back(std::move(sj));
  }
  j["scenarios"] = scenarios;

  nlohmann::ordered_json m;
  m["enabled"] = cfg.monitor.enabled;
  m["calibration_sessions"] = cfg.monitor.calibration_sessions;
  m["z_threshold"] = cfg.monitor.tuning.z_threshold;
  if (cfg.monitor.tuning.cusum_k)
    m["cusum_k"] = *cfg.monitor.tuning.cusum_k;
  else
    m["cusum_k"] = "one-baseline-std";
  if (cfg.monitor.tuning.cusum_h)
    m["cusum_h"] = *cfg.monitor.tuning.cusum_h;
  else
    m["cusum_h"] = "ten-cusum-k";
  j["monitor"] = m;

  nlohmann::ordered_json p;
  p["enabled"] = cfg.pqc.enabled;
  p["schemes"] = cfg.pqc.schemes;
  p["selfcheck_records"] = cfg.pqc.selfcheck_records;
  p["kat_files"] = cfg.pqc.kat_files;
  nlohmann::ordered_json a;
  a["ots_reuse"] = cfg.pqc.attacks.ots_reuse;
  a["lwe_bruteforce"] = cfg.pqc.attacks.lwe_bruteforce;
  a["lwe_n"] = cfg.pqc.attacks.lwe_demo_params.n;
  a["lwe_q"] = cfg.pqc.attacks.lwe_demo_params.q;
  a["lwe_error_bound"] = cfg.pqc.attacks.lwe_demo_params.error_bound;
  a["lwe_m"] = cfg.pqc.attacks.lwe_demo_params.m;
  a["lwe_budget"] = cfg.pqc.attacks.lwe_budget;
  p["attacks"] = a;
  j["pqc"] = p;

  nlohmann::ordered_json s;
  s["enabled"] = cfg.stateproof.enabled;
  s["stakes"] = cfg.stateproof.stakes;
  s["merkle_depth"] = cfg.stateproof.merkle_depth;
  s["tau"] = cfg.stateproof.tau;
  s["cadence"] = cfg.stateproof.cadence;
  s["epochs"] = cfg.stateproof.epochs;
  s["checkpoint_epoch"] = cfg.stateproof.checkpoint_epoch;
  auto tt = nlohmann::ordered_json::array();
  for (const auto& t : cfg.stateproof.time_travel) {
    tt.push_back({{"adversary_fraction", t.adversary_fraction},
                  {"classical_forgery", t.classical_forgery},
                  {"target_round", t.target_round}});
  }
  s["time_travel"] = tt;
  j["stateproof"] = s;

  j["warnings"] = cfg.warnings;
  return j;
}

}  // namespace qrt
