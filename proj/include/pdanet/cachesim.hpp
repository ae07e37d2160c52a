#pragma once

// Coded caching driven by a placement delivery array: split files into F
// packets, fill user caches from the star cells, broadcast one XOR per color
// and let every user decode its request from cache plus broadcasts.
//
// The simulator accepts raw grids so that broken arrays can be exercised; a
// grid that fails C2 surfaces as DecodeError.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pdanet/pda.hpp"
#include "pdanet/rational.hpp"

namespace pdanet::cachesim {

using Packet = std::vector<std::uint8_t>;

class FileLibrary {
 public:
  /// N files of F packets, B bytes each, filled from a seeded generator.
  static FileLibrary random(std::size_t n_files, std::size_t packets, std::size_t packet_bytes, std::uint64_t seed);
  /// Splits raw files into `packets` equal packets, zero-padding the tail.
  static FileLibrary from_files(const std::vector<std::vector<std::uint8_t>>& files, std::size_t packets);

  std::size_t n_files() const noexcept { return files_.size(); }
  std::size_t packets() const noexcept { return packets_; }
  std::size_t packet_bytes() const noexcept { return packet_bytes_; }
  /// Zero bytes appended to each file by from_files.
  const std::vector<std::size_t>& padding() const noexcept { return padding_; }

  /// 0-based file and packet.
  const Packet& packet(std::size_t file, std::size_t index) const { return files_[file][index]; }
  /// The file as the concatenation of its packets.
  std::vector<std::uint8_t> file(std::size_t index) const;

 private:
  std::vector<std::vector<Packet>> files_;
  std::vector<std::size_t> padding_;
  std::size_t packets_ = 0;
  std::size_t packet_bytes_ = 0;
};

/// 0-based requested file per user.
struct DemandVector {
  std::vector<std::size_t> d;

  /// Throws InvalidParameter if a request is outside [0, n_files).
  void validate(std::size_t n_files) const;
};

/// Key of packet W_{i,j}: (file i, packet j), 0-based.
using PacketId = std::pair<std::size_t, std::size_t>;

struct UserCache {
  std::size_t user = 0;
  std::map<PacketId, Packet> packets;

  bool has(PacketId id) const { return packets.count(id) != 0; }
};

struct Contributor {
  std::size_t user = 0;
  std::size_t file = 0;
  std::size_t packet = 0;
};

struct Broadcast {
  int slot = 0;  ///< the color s
  Packet payload;
  std::vector<Contributor> contributors;
};

struct Transcript {
  std::vector<Broadcast> broadcasts;  ///< ascending slot
  std::size_t packets_sent = 0;

  const Broadcast* find(int slot) const;
};

/// C_k = { W_{i,j} : p(j,k) = star, all i }. Throws DimensionError when the
/// library's packet count differs from F.
std::vector<UserCache> place(const Grid& p, const FileLibrary& lib);
inline std::vector<UserCache> place(const Pda& p, const FileLibrary& lib) { return place(p.grid(), lib); }

/// One broadcast per color s: XOR of W_{d_k, j} over cells p(j, k) = s.
Transcript deliver(const Grid& p, const FileLibrary& lib, const DemandVector& d);
inline Transcript deliver(const Pda& p, const FileLibrary& lib, const DemandVector& d) {
  return deliver(p.grid(), lib, d);
}

/// Recovers W_{d_k} for user k bit-exactly. Throws DecodeError when a needed
/// cancellation packet is not cached or a slot is missing.
std::vector<std::uint8_t> decode(std::size_t user, const UserCache& cache, const Transcript& transcript,
                                 const DemandVector& d, const Grid& p);
inline std::vector<std::uint8_t> decode(std::size_t user, const UserCache& cache, const Transcript& transcript,
                                        const DemandVector& d, const Pda& p) {
  return decode(user, cache, transcript, d, p.grid());
}

struct TrialRecord {
  std::size_t trial = 0;
  DemandVector demand;
  std::vector<bool> decoded_ok;  ///< per user
  std::size_t packets_sent = 0;
};

struct Measurement {
  Rational delivery_rate;  ///< S/F
  Rational uncoded_rate;   ///< K(1 - Z/F)
  bool all_decoded = true;
  std::vector<TrialRecord> trials;
};

/// Runs place/deliver/decode for `trials` i.i.d. uniform demand vectors over
/// N files.
Measurement measure(const Pda& p, std::size_t n_files, std::size_t trials, std::uint64_t seed,
                    std::size_t packet_bytes = 64);

/// Same as measure over every one of the N^K demand vectors.
Measurement measure_all_demands(const Pda& p, std::size_t n_files, std::uint64_t seed,
                                std::size_t packet_bytes = 64);

/// {"packets_sent":n,"broadcasts":[{"slot":s,"payload":"<hex>","contributors":[{"user":k,"file":i,"packet":j}]}]}
/// with 1-based users, files and packets.
std::string format_transcript_json(const Transcript& t);
/// trial,user,demand,decoded_ok (1-based user and demand).
std::string format_demand_trace_csv(const std::vector<TrialRecord>& trials);

}  // namespace pdanet::cachesim
