#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "forkhull/runtime.hpp"

namespace forkhull::cache {

struct CacheConfig {
  std::uint64_t M = 1 << 15;  // capacity in bytes
  std::uint64_t B = 16;       // block size in bytes

  bool valid() const { return B >= 1 && M >= B && M % B == 0; }
  bool tall() const { return M >= B * B; }
};

struct MissReport {
  std::uint64_t misses = 0;
  std::uint64_t accesses = 0;
  std::map<std::uint32_t, std::uint64_t> arrays;
};

// Fully associative LRU over blocks (array-id, word / B). Streamable so big
// runs never materialize their trace.
class LruCache : public rt::TraceSink {
 public:
  explicit LruCache(CacheConfig config);
  void on_access(std::uint32_t array, std::uint64_t word,
                 rt::AccessKind kind) override;
  const MissReport& report() const { return report_; }
  void reset();

 private:
  struct Node {
    std::uint64_t key;
    std::uint32_t prev, next;
  };
  std::uint64_t block_key(std::uint32_t array, std::uint64_t word) const;
  CacheConfig config_;
  std::uint64_t capacity_blocks_;
  MissReport report_;
  // Intrusive LRU list over a node pool plus a key->node map.
  std::vector<Node> nodes_;
  std::map<std::uint64_t, std::uint32_t> index_;
  std::uint32_t head_ = 0, tail_ = 0;
  bool empty_ = true;
};

MissReport replay_lru(const std::vector<rt::Access>& trace, CacheConfig config);

// Independent second implementation (timestamp scan over a flat table),
// used as the duplicate-implementation oracle.
MissReport replay_lru_reference(const std::vector<rt::Access>& trace,
                                CacheConfig config);

// Binary trace dump: "FHTR1" then (u32 array, u64 word, u8 kind) records,
// little endian.
void write_trace(const std::string& path, const std::vector<rt::Access>& trace);
std::vector<rt::Access> read_trace(const std::string& path);

}  // namespace forkhull::cache
