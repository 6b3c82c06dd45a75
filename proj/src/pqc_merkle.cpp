#include "qrt/pqc/merkle.hpp"

namespace qrt::pqc {

namespace {
Digest32 node_hash(const Hash256& h, const Digest32& left, const Digest32& right) {
  std::vector<std::uint8_t> buf;
  buf.reserve(64);
  buf.insert(buf.end(), left.begin(), left.end());
  buf.insert(buf.end(), right.begin(), right.end());
  return h(buf);
}
}  // namespace

std::vector<std::uint8_t> MerkleSignature::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(4 + 256 * 32 + 2 * 256 * 32 + auth_path.size() * 32);
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<std::uint8_t>((leaf_index >> (8 * i)) & 0xff));
  auto s = ots.serialize();
  out.insert(out.end(), s.begin(), s.end());
  auto p = ots_public.serialize();
  out.insert(out.end(), p.begin(), p.end());
  for (const auto& d : auth_path) out.insert(out.end(), d.begin(), d.end());
  return out;
}

MerkleKeySet::MerkleKeySet(unsigned depth, HashPtr hash, RandomSource& rng)
    : depth_(depth), hash_(std::move(hash)) {
  if (depth_ < 1 || depth_ > 16)
    throw StructuralError("MerkleKeySet: depth must be in [1,16]");
  const std::size_t n = std::size_t{1} << depth_;
  leaves_.reserve(n);
  levels_.resize(depth_ + 1);
  levels_[0].reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    leaves_.push_back(lamport_keygen(*hash_, rng));
    levels_[0].push_back((*hash_)(leaves_.back().public_key.serialize()));
  }
  for (unsigned lvl = 1; lvl <= depth_; ++lvl) {
    const auto& below = levels_[lvl - 1];
    levels_[lvl].resize(below.size() / 2);
    for (std::size_t i = 0; i < levels_[lvl].size(); ++i)
      levels_[lvl][i] = node_hash(*hash_, below[2 * i], below[2 * i + 1]);
  }
}

MerkleSignature MerkleKeySet::sign(const Digest32& msg) {
  if (next_ >= leaves_.size()) throw StructuralError("keys_exhausted");
  MerkleSignature sig;
  sig.leaf_index = static_cast<std::uint32_t>(next_);
  sig.ots = lamport_sign(leaves_[next_], msg);
  sig.ots_public = leaves_[next_].public_key;
  std::size_t idx = next_;
  for (unsigned lvl = 0; lvl < depth_; ++lvl) {
    sig.auth_path.push_back(levels_[lvl][idx ^ 1u]);
    idx >>= 1;
  }
  next_ += 1;
  return sig;
}

bool merkle_verify(const Digest32& root, const Digest32& msg, const MerkleSignature& sig,
                   const Hash256& h) {
  if (!lamport_verify(sig.ots_public, msg, sig.ots, h)) return false;
  Digest32 node = h(sig.ots_public.serialize());
  std::size_t idx = sig.leaf_index;
  for (const auto& sibling : sig.auth_path) {
    node = (idx & 1u) ? node_hash(h, sibling, node) : node_hash(h, node, sibling);
    idx >>= 1;
  }
  if (idx != 0) return false;  // index wider than the path
  return node == root;
}

}  // namespace qrt::pqc
