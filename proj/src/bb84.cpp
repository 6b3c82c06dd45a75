#include "qrt/bb84.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace qrt {

void SessionConfig::validate() const {
  std::string problems;
  auto fail = [&](const std::string& p) {
    if (!problems.empty()) problems += "; ";
    problems += p;
  };
  if (n_qubits == 0) fail("n_qubits must be positive");
  if (!(check_fraction > 0.0 && check_fraction < 1.0)) fail("check_fraction must be in (0,1)");
  if (!(qber_abort_threshold > 0.0 && qber_abort_threshold < 0.5))
    fail("qber_abort_threshold must be in (0,0.5)");
  if (reconciliation_rounds == 0) fail("reconciliation_rounds must be positive");
  if (reconciliation_block_init == 0) fail("reconciliation_block_init must be positive");
  if (check_fraction * static_cast<double>(n_qubits) < 16.0)
    fail("check_fraction * n_qubits must be at least 16");
  if (!problems.empty()) throw StructuralError("invalid SessionConfig: " + problems);
}

const char* abort_reason_name(AbortReason r) {
  switch (r) {
    case AbortReason::QberThresholdExceeded: return "qber_threshold_exceeded";
    case AbortReason::InsufficientSiftedBits: return "insufficient_sifted_bits";
    default: return "reconciliation_failure";
  }
}

std::vector<std::size_t> SessionTranscript::sifted_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sift_mask.size(); ++i)
    if (sift_mask[i]) out.push_back(i);
  return out;
}

std::vector<std::size_t> SessionTranscript::remaining_indices() const {
  std::vector<std::uint8_t> disclosed(sift_mask.size(), 0);
  for (std::size_t i : disclosed_indices) disclosed[i] = 1;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sift_mask.size(); ++i)
    if (sift_mask[i] && !disclosed[i]) out.push_back(i);
  return out;
}

std::vector<std::uint8_t> sift(const std::vector<std::uint8_t>& alice_bases,
                               const std::vector<std::uint8_t>& bob_bases,
                               const std::vector<std::uint8_t>& lost_mask) {
  if (alice_bases.size() != bob_bases.size() || alice_bases.size() != lost_mask.size())
    throw StructuralError("sift: sequence lengths differ");
  std::vector<std::uint8_t> mask(alice_bases.size(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i)
    mask[i] = (!lost_mask[i] && alice_bases[i] == bob_bases[i]) ? 1 : 0;
  return mask;
}

QberEstimate estimate_qber(const BitString& alice_sifted, const BitString& bob_sifted,
                           double check_fraction, RandomSource& rng) {
  if (alice_sifted.size() != bob_sifted.size())
    throw StructuralError("estimate_qber: key halves differ in length");
  const std::size_t n = alice_sifted.size();
  const auto k = static_cast<std::size_t>(check_fraction * static_cast<double>(n));
  if (n < 16 || k < 16) throw StructuralError("insufficient_sifted_bits");

  // Partial Fisher-Yates draw of k positions without replacement.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  QberEstimate est;
  est.check_positions.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(est.check_positions.begin(), est.check_positions.end());
  est.check_count = k;
  for (std::size_t p : est.check_positions)
    if (alice_sifted[p] != bob_sifted[p]) est.disagreements += 1;
  est.qber = static_cast<double>(est.disagreements) / static_cast<double>(k);
  return est;
}

namespace {

std::uint8_t range_parity(const BitString& bits, const std::vector<std::size_t>& perm,
                          std::size_t lo, std::size_t hi) {
  std::uint8_t p = 0;
  for (std::size_t i = lo; i < hi; ++i) p ^= bits[perm[i]];
  return p;
}

}  // namespace

ReconcileResult reconcile(const BitString& alice_key, const BitString& bob_key,
                          const SessionConfig& cfg, RandomSource& rng) {
  if (alice_key.size() != bob_key.size())
    throw StructuralError("reconcile: key lengths differ");
  ReconcileResult res;
  res.corrected = bob_key;
  const std::size_t n = alice_key.size();
  if (n == 0) {
    res.success = true;
    return res;
  }

  const std::size_t rounds = cfg.reconciliation_rounds;
  std::vector<std::vector<std::size_t>> perm(rounds);       // round -> perm order
  std::vector<std::vector<std::size_t>> pos_in_perm(rounds);  // original index -> slot
  std::vector<std::size_t> block_size(rounds);
  std::vector<std::vector<std::uint8_t>> diff(rounds);  // per-block parity disagreement
  // Odd-parity blocks pending binary search, as (round, block) pairs.
  std::deque<std::pair<std::size_t, std::size_t>> pending;

  auto block_count = [&](std::size_t r) {
    return (n + block_size[r] - 1) / block_size[r];
  };
  auto block_range = [&](std::size_t r, std::size_t b) {
    std::size_t lo = b * block_size[r];
    std::size_t hi = std::min(n, lo + block_size[r]);
    return std::pair<std::size_t, std::size_t>(lo, hi);
  };

  // Binary search inside an odd block: each probe discloses one parity.
  std::size_t probes_this_round = 0;
  auto locate_and_fix = [&](std::size_t r, std::size_t b) {
    auto [lo, hi] = block_range(r, b);
    while (hi - lo > 1) {
      std::size_t mid = lo + (hi - lo) / 2;
      probes_this_round += 1;
      res.leakage_bits += 1;
      std::uint8_t a = range_parity(alice_key, perm[r], lo, mid);
      std::uint8_t bp = range_parity(res.corrected, perm[r], lo, mid);
      if (a != bp)
        hi = mid;
      else
        lo = mid;
    }
    const std::size_t original = perm[r][lo];
    res.corrected[original] ^= 1u;
    res.corrections += 1;
    // The flip toggles one block's parity in every activated round; any
    // block that turns odd is re-searched.
    for (std::size_t rr = 0; rr < rounds && !diff[rr].empty(); ++rr) {
      std::size_t blk = pos_in_perm[rr][original] / block_size[rr];
      diff[rr][blk] ^= 1u;
      if (diff[rr][blk]) pending.emplace_back(rr, blk);
    }
  };

  for (std::size_t r = 0; r < rounds; ++r) {
    block_size[r] = std::min<std::size_t>(n, cfg.reconciliation_block_init << r);
    perm[r].resize(n);
    std::iota(perm[r].begin(), perm[r].end(), 0);
    if (r > 0) {
      for (std::size_t i = n - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng.uniform_below(i + 1));
        std::swap(perm[r][i], perm[r][j]);
      }
    }
    pos_in_perm[r].resize(n);
    for (std::size_t i = 0; i < n; ++i) pos_in_perm[r][perm[r][i]] = i;

    // Top-level parity disclosure for every block of this round.
    const std::size_t nb = block_count(r);
    diff[r].assign(nb, 0);
    probes_this_round = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      auto [lo, hi] = block_range(r, b);
      res.leakage_bits += 1;
      std::uint8_t a = range_parity(alice_key, perm[r], lo, hi);
      std::uint8_t bp = range_parity(res.corrected, perm[r], lo, hi);
      diff[r][b] = a ^ bp;
      if (diff[r][b]) pending.emplace_back(r, b);
    }
    res.events.push_back({"reconcile", "parities_disclosed", static_cast<std::int64_t>(nb)});

    while (!pending.empty()) {
      auto [rr, bb] = pending.front();
      pending.pop_front();
      if (!diff[rr][bb]) continue;  // already fixed via another flip
      locate_and_fix(rr, bb);
    }
    if (probes_this_round > 0)
      res.events.push_back(
          {"reconcile", "parities_disclosed", static_cast<std::int64_t>(probes_this_round)});
  }

  res.success = (res.corrected == alice_key);
  res.events.push_back({"reconcile", "corrections", static_cast<std::int64_t>(res.corrections)});
  return res;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

std::size_t pa_output_length(std::size_t n, double qber, std::size_t leakage_bits,
                             const SessionConfig& cfg) {
  const double secret = std::floor(static_cast<double>(n) * (1.0 - binary_entropy(qber)));
  const double len =
      secret - static_cast<double>(leakage_bits) - static_cast<double>(cfg.pa_safety_margin);
  std::size_t bound = len > 0.0 ? static_cast<std::size_t>(len) : 0;
  if (cfg.key_policy.kind == KeyPolicy::Kind::FixedLength)
    return std::min(bound, cfg.key_policy.fixed_length);
  return bound;
}

namespace {

// Bit-polynomials packed LSB-first into 64-bit words.
std::vector<std::uint64_t> pack_poly(const BitString& bits) {
  std::vector<std::uint64_t> w((bits.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) w[i / 64] |= (1ull << (i % 64));
  return w;
}

// Carry-less product c = a * b over GF(2), 4-bit window method.
std::vector<std::uint64_t> clmul(const std::vector<std::uint64_t>& a,
                                 const std::vector<std::uint64_t>& b) {
  std::vector<std::uint64_t> c(a.size() + b.size(), 0);
  using u128 = unsigned __int128;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const u128 w = b[j];
    u128 tab[16];
    tab[0] = 0;
    tab[1] = w;
    tab[2] = w << 1;
    tab[4] = w << 2;
    tab[8] = w << 3;
    tab[3] = tab[2] ^ tab[1];
    tab[5] = tab[4] ^ tab[1];
    tab[6] = tab[4] ^ tab[2];
    tab[7] = tab[4] ^ tab[3];
    tab[9] = tab[8] ^ tab[1];
    tab[10] = tab[8] ^ tab[2];
    tab[11] = tab[8] ^ tab[3];
    tab[12] = tab[8] ^ tab[4];
    tab[13] = tab[8] ^ tab[5];
    tab[14] = tab[8] ^ tab[6];
    tab[15] = tab[8] ^ tab[7];
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::uint64_t av = a[i];
      if (av == 0) continue;
      u128 acc = 0;
      for (int k = 0; k < 16; ++k) {
        acc ^= tab[(av >> (4 * k)) & 0xf] << (4 * k);
      }
      c[i + j] ^= static_cast<std::uint64_t>(acc);
      c[i + j + 1] ^= static_cast<std::uint64_t>(acc >> 64);
    }
  }
  return c;
}

}  // namespace

BitString toeplitz_hash(const BitString& input, const BitString& diag, std::size_t out_len) {
  const std::size_t n = input.size();
  if (out_len == 0) return {};
  if (diag.size() != out_len + n - 1)
    throw StructuralError("toeplitz_hash: diagonal length must be out_len + input_len - 1");
  // Output bit i = parity of input masked by diag window i, which is
  // coefficient (n - 1 + i) of the GF(2) product diag(x) * input(x).
  auto prod = clmul(pack_poly(diag), pack_poly(input));
  BitString out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    std::size_t bit = n - 1 + i;
    out[i] = (prod[bit / 64] >> (bit % 64)) & 1u;
  }
  return out;
}

FinalKey privacy_amplify(const BitString& key, double qber, std::size_t leakage_bits,
                         const SessionConfig& cfg, RandomSource& rng) {
  if (key.empty()) throw StructuralError("privacy_amplify: key must be nonempty");
  if (!(qber >= 0.0 && qber < 0.5))
    throw StructuralError("privacy_amplify: qber must be in [0, 0.5)");
  const std::size_t out_len = pa_output_length(key.size(), qber, leakage_bits, cfg);
  FinalKey fk;
  fk.qber_at_acceptance = qber;
  if (out_len == 0) return fk;  // zero-length key is a valid outcome
  BitString diag(out_len + key.size() - 1);
  for (auto& b : diag) b = static_cast<std::uint8_t>(rng.next_bit());
  fk.bits = toeplitz_hash(key, diag, out_len);
  fk.length = fk.bits.size();
  return fk;
}

SessionTranscript run_session(const SessionConfig& cfg, const ChannelModel& ch,
                              AdversaryStrategy& adv, const RandomSource& session_rng) {
  cfg.validate();
  const std::size_t n = cfg.n_qubits;

  RandomSource alice_bits_rng = session_rng.fork(session_stream::kAliceBits);
  RandomSource alice_bases_rng = session_rng.fork(session_stream::kAliceBases);
  RandomSource bob_bases_rng = session_rng.fork(session_stream::kBobBases);
  RandomSource bob_measure_rng = session_rng.fork(session_stream::kBobMeasure);
  RandomSource channel_rng = session_rng.fork(session_stream::kChannel);
  RandomSource adversary_rng = session_rng.fork(session_stream::kAdversary);
  RandomSource check_rng = session_rng.fork(session_stream::kCheckSelect);
  RandomSource reconcile_rng = session_rng.fork(session_stream::kReconcile);
  RandomSource pa_rng = session_rng.fork(session_stream::kPrivacyAmp);

  SessionTranscript t;
  t.alice_bits.resize(n);
  t.alice_bases.resize(n);
  t.bob_bases.resize(n);
  t.bob_outcomes.assign(n, 0);
  t.lost_mask.assign(n, 0);

  adv.begin_session();

  for (std::size_t i = 0; i < n; ++i) {
    t.alice_bits[i] = static_cast<std::uint8_t>(alice_bits_rng.next_bit());
    t.alice_bases[i] = static_cast<std::uint8_t>(alice_bases_rng.next_bit());
    t.bob_bases[i] = static_cast<std::uint8_t>(bob_bases_rng.next_bit());

    QubitState q = prepare(t.alice_bits[i], basis_from_bit(t.alice_bases[i]));
    std::optional<QubitState> in_flight = adv.on_qubit(i, q, adversary_rng);
    if (in_flight) in_flight = transmit(*in_flight, ch, channel_rng);
    if (!in_flight) {
      t.lost_mask[i] = 1;
      continue;
    }
    auto m = measure(*in_flight, basis_from_bit(t.bob_bases[i]), bob_measure_rng);
    t.bob_outcomes[i] = m.outcome;
  }
  t.phase_log.push_back({"prepare", "qubits", static_cast<std::int64_t>(n)});
  t.phase_log.push_back(
      {"transmit", "lost",
       static_cast<std::int64_t>(std::count(t.lost_mask.begin(), t.lost_mask.end(), 1))});

  t.sift_mask = sift(t.alice_bases, t.bob_bases, t.lost_mask);
  const auto sifted = t.sifted_indices();
  t.phase_log.push_back({"sift", "sifted", static_cast<std::int64_t>(sifted.size())});

  auto abort_with = [&](AbortReason reason) {
    t.aborted = true;
    t.abort_reason = reason;
    t.phase_log.push_back({"abort", abort_reason_name(reason), 0});
    return t;
  };

  const auto expected_check =
      static_cast<std::size_t>(cfg.check_fraction * static_cast<double>(sifted.size()));
  if (sifted.size() < 16 || expected_check < 16) {
    adv.on_classical(ClassicalObservation{t.sift_mask, {}, {}});
    return abort_with(AbortReason::InsufficientSiftedBits);
  }

  BitString alice_sifted(sifted.size()), bob_sifted(sifted.size());
  for (std::size_t k = 0; k < sifted.size(); ++k) {
    alice_sifted[k] = t.alice_bits[sifted[k]];
    bob_sifted[k] = t.bob_outcomes[sifted[k]];
  }

  QberEstimate est = estimate_qber(alice_sifted, bob_sifted, cfg.check_fraction, check_rng);
  t.qber_estimate = est.qber;
  for (std::size_t p : est.check_positions) t.disclosed_indices.push_back(sifted[p]);
  t.phase_log.push_back({"estimate", "check_bits", static_cast<std::int64_t>(est.check_count)});
  t.phase_log.push_back(
      {"estimate", "disagreements", static_cast<std::int64_t>(est.disagreements)});

  {
    ClassicalObservation obs;
    obs.sift_mask = t.sift_mask;
    obs.disclosed_indices = t.disclosed_indices;
    obs.disclosed_bits.reserve(t.disclosed_indices.size());
    for (std::size_t i : t.disclosed_indices) obs.disclosed_bits.push_back(t.alice_bits[i]);
    adv.on_classical(obs);
  }

  if (est.qber > cfg.qber_abort_threshold)
    return abort_with(AbortReason::QberThresholdExceeded);

  // Strip the disclosed positions; they are burned.
  std::vector<std::uint8_t> is_check(sifted.size(), 0);
  for (std::size_t p : est.check_positions) is_check[p] = 1;
  BitString alice_key, bob_key;
  alice_key.reserve(sifted.size() - est.check_count);
  bob_key.reserve(sifted.size() - est.check_count);
  for (std::size_t k = 0; k < sifted.size(); ++k) {
    if (is_check[k]) continue;
    alice_key.push_back(alice_sifted[k]);
    bob_key.push_back(bob_sifted[k]);
  }
  if (alice_key.size() < 160) return abort_with(AbortReason::InsufficientSiftedBits);

  ReconcileResult rec = reconcile(alice_key, bob_key, cfg, reconcile_rng);
  t.leakage_bits = rec.leakage_bits;
  for (auto& e : rec.events) t.phase_log.push_back(e);
  if (!rec.success) return abort_with(AbortReason::ReconciliationFailure);

  // Same seed stream position on both sides: the hash seed is public.
  RandomSource pa_alice = pa_rng;
  RandomSource pa_bob = pa_rng;
  FinalKey alice_final =
      privacy_amplify(alice_key, est.qber, rec.leakage_bits, cfg, pa_alice);
  FinalKey bob_final =
      privacy_amplify(rec.corrected, est.qber, rec.leakage_bits, cfg, pa_bob);
  t.alice_final_key = alice_final.bits;
  t.bob_final_key = bob_final.bits;
  t.phase_log.push_back(
      {"privacy_amplify", "final_length", static_cast<std::int64_t>(alice_final.length)});
  return t;
}

nlohmann::ordered_json transcript_to_json(const SessionTranscript& t) {
  nlohmann::ordered_json j;
  auto bitfield = [](const BitString& bits) {
    nlohmann::ordered_json b;
    b["bit_length"] = bits.size();
    b["hex"] = bits_to_hex(bits);
    return b;
  };
  j["n_qubits"] = t.alice_bits.size();
  j["alice_bits"] = bitfield(t.alice_bits);
  j["alice_bases"] = bitfield(t.alice_bases);
  j["bob_bases"] = bitfield(t.bob_bases);
  j["bob_outcomes"] = bitfield(t.bob_outcomes);
  j["lost_mask"] = bitfield(t.lost_mask);
  j["sift_mask"] = bitfield(t.sift_mask);
  j["disclosed_indices"] = t.disclosed_indices;
  j["qber_estimate"] = t.qber_estimate;
  j["leakage_bits"] = t.leakage_bits;
  j["alice_final_key"] = bitfield(t.alice_final_key);
  j["bob_final_key"] = bitfield(t.bob_final_key);
  j["aborted"] = t.aborted;
  if (t.abort_reason)
    j["abort_reason"] = abort_reason_name(*t.abort_reason);
  else
    j["abort_reason"] = nullptr;
  auto log = nlohmann::ordered_json::array();
  for (const auto& e : t.phase_log) {
    nlohmann::ordered_json ev;
    ev["phase"] = e.phase;
    ev["event"] = e.event;
    ev["value"] = e.value;
    log.push_back(ev);
  }
  j["phase_log"] = log;
  return j;
}

}  // namespace qrt
