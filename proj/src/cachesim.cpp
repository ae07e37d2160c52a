#include "pdanet/cachesim.hpp"

#include <algorithm>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "pdanet/error.hpp"
#include "pdanet/random.hpp"

namespace pdanet::cachesim {

namespace {

void xor_into(Packet& acc, const Packet& other) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] ^= other[i];
}

std::size_t count_colors(const Grid& p) { return static_cast<std::size_t>(p.max_color()); }

}  // namespace

FileLibrary FileLibrary::random(std::size_t n_files, std::size_t packets, std::size_t packet_bytes,
                                std::uint64_t seed) {
  FileLibrary lib;
  lib.packets_ = packets;
  lib.packet_bytes_ = packet_bytes;
  lib.padding_.assign(n_files, 0);
  Rng rng(seed);
  lib.files_.resize(n_files);
  for (auto& file : lib.files_) {
    file.resize(packets);
    for (auto& pkt : file) {
      pkt.resize(packet_bytes);
      for (auto& b : pkt) b = static_cast<std::uint8_t>(rng.next() >> 56);
    }
  }
  return lib;
}

FileLibrary FileLibrary::from_files(const std::vector<std::vector<std::uint8_t>>& files, std::size_t packets) {
  if (packets == 0) throw InvalidParameter("packet count must be positive");
  std::size_t longest = 0;
  for (const auto& f : files) longest = std::max(longest, f.size());
  FileLibrary lib;
  lib.packets_ = packets;
  lib.packet_bytes_ = (longest + packets - 1) / packets;
  for (const auto& f : files) {
    std::vector<std::uint8_t> padded = f;
    lib.padding_.push_back(packets * lib.packet_bytes_ - f.size());
    padded.resize(packets * lib.packet_bytes_, 0);
    std::vector<Packet> split(packets);
    for (std::size_t j = 0; j < packets; ++j) {
      const auto first = padded.begin() + static_cast<std::ptrdiff_t>(j * lib.packet_bytes_);
      split[j].assign(first, first + static_cast<std::ptrdiff_t>(lib.packet_bytes_));
    }
    lib.files_.push_back(std::move(split));
  }
  return lib;
}

std::vector<std::uint8_t> FileLibrary::file(std::size_t index) const {
  std::vector<std::uint8_t> out;
  out.reserve(packets_ * packet_bytes_);
  for (const Packet& p : files_[index]) out.insert(out.end(), p.begin(), p.end());
  return out;
}

void DemandVector::validate(std::size_t n_files) const {
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k] >= n_files) {
      throw InvalidParameter("user " + std::to_string(k + 1) + " requests file " + std::to_string(d[k] + 1) +
                             " of " + std::to_string(n_files));
    }
  }
}

const Broadcast* Transcript::find(int slot) const {
  auto it = std::lower_bound(broadcasts.begin(), broadcasts.end(), slot,
                             [](const Broadcast& b, int s) { return b.slot < s; });
  return it != broadcasts.end() && it->slot == slot ? &*it : nullptr;
}

std::vector<UserCache> place(const Grid& p, const FileLibrary& lib) {
  if (lib.packets() != p.rows()) {
    throw DimensionError("library has " + std::to_string(lib.packets()) + " packets per file, array has F=" +
                         std::to_string(p.rows()));
  }
  std::vector<UserCache> caches(p.cols());
  for (std::size_t k = 0; k < p.cols(); ++k) {
    caches[k].user = k;
    for (std::size_t j = 0; j < p.rows(); ++j) {
      if (!p.at(j, k).is_star()) continue;
      for (std::size_t i = 0; i < lib.n_files(); ++i) caches[k].packets.emplace(PacketId{i, j}, lib.packet(i, j));
    }
  }
  return caches;
}

Transcript deliver(const Grid& p, const FileLibrary& lib, const DemandVector& d) {
  if (lib.packets() != p.rows()) throw DimensionError("library packet count differs from F");
  if (d.d.size() != p.cols()) throw DimensionError("demand vector length differs from K");
  d.validate(lib.n_files());

  const std::size_t s_max = count_colors(p);
  Transcript t;
  t.broadcasts.resize(s_max);
  for (std::size_t s = 0; s < s_max; ++s) {
    t.broadcasts[s].slot = static_cast<int>(s + 1);
    t.broadcasts[s].payload.assign(lib.packet_bytes(), 0);
  }
  for (std::size_t k = 0; k < p.cols(); ++k) {
    for (std::size_t j = 0; j < p.rows(); ++j) {
      const Entry e = p.at(j, k);
      if (e.is_star()) continue;
      Broadcast& b = t.broadcasts[static_cast<std::size_t>(e.value() - 1)];
      xor_into(b.payload, lib.packet(d.d[k], j));
      b.contributors.push_back({k, d.d[k], j});
    }
  }
  // Colors missing from a non-canonical grid send nothing.
  std::erase_if(t.broadcasts, [](const Broadcast& b) { return b.contributors.empty(); });
  t.packets_sent = t.broadcasts.size();
  return t;
}

std::vector<std::uint8_t> decode(std::size_t user, const UserCache& cache, const Transcript& transcript,
                                 const DemandVector& d, const Grid& p) {
  if (user >= p.cols() || d.d.size() != p.cols()) throw DimensionError("user or demand outside the array");
  const std::size_t want = d.d[user];
  std::vector<std::uint8_t> file;
  for (std::size_t j = 0; j < p.rows(); ++j) {
    const Entry e = p.at(j, user);
    if (e.is_star()) {
      auto it = cache.packets.find({want, j});
      if (it == cache.packets.end()) {
        throw DecodeError("user " + std::to_string(user + 1) + " lacks cached packet " + std::to_string(j + 1));
      }
      file.insert(file.end(), it->second.begin(), it->second.end());
      continue;
    }
    const Broadcast* b = transcript.find(e.value());
    if (!b) throw DecodeError("no broadcast for slot " + std::to_string(e.value()));
    Packet recovered = b->payload;
    bool own_term = false;
    for (const Contributor& c : b->contributors) {
      if (c.user == user && c.packet == j) {
        own_term = true;
        continue;
      }
      auto it = cache.packets.find({c.file, c.packet});
      if (it == cache.packets.end()) {
        throw DecodeError("user " + std::to_string(user + 1) + " cannot cancel W(" + std::to_string(c.file + 1) +
                          "," + std::to_string(c.packet + 1) + ") in slot " + std::to_string(b->slot));
      }
      xor_into(recovered, it->second);
    }
    if (!own_term) throw DecodeError("slot " + std::to_string(b->slot) + " does not carry the requested packet");
    file.insert(file.end(), recovered.begin(), recovered.end());
  }
  return file;
}

namespace {

TrialRecord run_trial(const Grid& p, const FileLibrary& lib, const std::vector<UserCache>& caches,
                      const DemandVector& d, std::size_t trial) {
  TrialRecord rec;
  rec.trial = trial;
  rec.demand = d;
  const Transcript t = deliver(p, lib, d);
  rec.packets_sent = t.packets_sent;
  for (std::size_t k = 0; k < p.cols(); ++k) {
    bool ok = false;
    try {
      ok = decode(k, caches[k], t, d, p) == lib.file(d.d[k]);
    } catch (const DecodeError&) {
      ok = false;
    }
    rec.decoded_ok.push_back(ok);
  }
  return rec;
}

Measurement base_measurement(const Pda& p) {
  Measurement m;
  const auto f = static_cast<std::int64_t>(std::max<std::size_t>(p.f(), 1));
  const auto k = static_cast<std::int64_t>(p.k());
  m.delivery_rate = Rational(static_cast<std::int64_t>(p.s()), f);
  m.uncoded_rate = Rational(k, 1) * (Rational(1, 1) - Rational(static_cast<std::int64_t>(p.z()), f));
  return m;
}

void finish(Measurement& m, const Pda& p) {
  for (const TrialRecord& r : m.trials) {
    if (r.packets_sent != p.s()) m.all_decoded = false;
    for (bool ok : r.decoded_ok) m.all_decoded = m.all_decoded && ok;
  }
}

}  // namespace

Measurement measure(const Pda& p, std::size_t n_files, std::size_t trials, std::uint64_t seed,
                    std::size_t packet_bytes) {
  if (n_files == 0) throw InvalidParameter("N must be >= 1");
  Measurement m = base_measurement(p);
  const FileLibrary lib = FileLibrary::random(n_files, p.f(), packet_bytes, seed);
  const auto caches = place(p, lib);
  Rng rng(derive_seed(seed, 1));
  for (std::size_t trial = 0; trial < trials; ++trial) {
    DemandVector d;
    for (std::size_t k = 0; k < p.k(); ++k) d.d.push_back(rng.index(n_files));
    m.trials.push_back(run_trial(p.grid(), lib, caches, d, trial + 1));
  }
  finish(m, p);
  return m;
}

Measurement measure_all_demands(const Pda& p, std::size_t n_files, std::uint64_t seed, std::size_t packet_bytes) {
  if (n_files == 0) throw InvalidParameter("N must be >= 1");
  Measurement m = base_measurement(p);
  const FileLibrary lib = FileLibrary::random(n_files, p.f(), packet_bytes, seed);
  const auto caches = place(p, lib);
  DemandVector d{std::vector<std::size_t>(p.k(), 0)};
  std::size_t trial = 0;
  while (true) {
    m.trials.push_back(run_trial(p.grid(), lib, caches, d, ++trial));
    std::size_t k = 0;
    while (k < d.d.size() && ++d.d[k] == n_files) d.d[k++] = 0;
    if (k == d.d.size()) break;
  }
  finish(m, p);
  return m;
}

std::string format_transcript_json(const Transcript& t) {
  static constexpr char kHex[] = "0123456789abcdef";
  nlohmann::ordered_json j;
  j["packets_sent"] = t.packets_sent;
  auto list = nlohmann::ordered_json::array();
  for (const Broadcast& b : t.broadcasts) {
    std::string hex;
    hex.reserve(b.payload.size() * 2);
    for (std::uint8_t byte : b.payload) {
      hex += kHex[byte >> 4];
      hex += kHex[byte & 0xf];
    }
    auto contributors = nlohmann::ordered_json::array();
    for (const Contributor& c : b.contributors) {
      contributors.push_back({{"user", c.user + 1}, {"file", c.file + 1}, {"packet", c.packet + 1}});
    }
    nlohmann::ordered_json item;
    item["slot"] = b.slot;
    item["payload"] = std::move(hex);
    item["contributors"] = std::move(contributors);
    list.push_back(std::move(item));
  }
  j["broadcasts"] = std::move(list);
  return j.dump() + "\n";
}

std::string format_demand_trace_csv(const std::vector<TrialRecord>& trials) {
  std::string out = "trial,user,demand,decoded_ok\n";
  for (const TrialRecord& r : trials) {
    for (std::size_t k = 0; k < r.demand.d.size(); ++k) {
      out += std::to_string(r.trial) + "," + std::to_string(k + 1) + "," + std::to_string(r.demand.d[k] + 1) + "," +
             (r.decoded_ok[k] ? "1" : "0") + "\n";
    }
  }
  return out;
}

}  // namespace pdanet::cachesim
