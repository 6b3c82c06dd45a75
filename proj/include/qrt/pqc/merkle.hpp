#pragma once

#include <cstdint>
#include <vector>

#include "qrt/pqc/lamport.hpp"

namespace qrt::pqc {

struct MerkleSignature {
  std::uint32_t leaf_index = 0;
  LamportSignature ots;
  LamportPublicKey ots_public;
  std::vector<Digest32> auth_path;  // sibling digests, leaf level upward

  std::vector<std::uint8_t> serialize() const;
};

/// 2^depth Lamport one-time keys committed under a single Merkle root.
/// Each leaf signs at most once; sign() consumes leaves in index order.
class MerkleKeySet {
 public:
  /// depth must be in [1, 16].
  MerkleKeySet(unsigned depth, HashPtr hash, RandomSource& rng);

  unsigned depth() const { return depth_; }
  std::size_t capacity() const { return leaves_.size(); }
  std::size_t next_index() const { return next_; }
  const Digest32& root() const { return levels_.back()[0]; }

  /// Throws StructuralError("keys_exhausted") once every leaf has signed.
  MerkleSignature sign(const Digest32& msg);

 private:
  unsigned depth_;
  HashPtr hash_;
  std::vector<LamportKeyPair> leaves_;
  std::vector<std::vector<Digest32>> levels_;  // [0]=leaf digests .. [depth]=root
  std::size_t next_ = 0;
};

bool merkle_verify(const Digest32& root, const Digest32& msg, const MerkleSignature& sig,
                   const Hash256& h);

}  // namespace qrt::pqc
