#include "forkhull/cache_sim.hpp"

#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace forkhull::cache {

LruCache::LruCache(CacheConfig config) : config_(config) {
  if (!config_.valid()) throw std::invalid_argument("bad cache config");
  capacity_blocks_ = config_.M / config_.B;
  nodes_.reserve(capacity_blocks_);
}

std::uint64_t LruCache::block_key(std::uint32_t array,
                                  std::uint64_t word) const {
  return (static_cast<std::uint64_t>(array) << 44) | (word / config_.B);
}

void LruCache::reset() {
  report_ = MissReport{};
  nodes_.clear();
  index_.clear();
  empty_ = true;
}

void LruCache::on_access(std::uint32_t array, std::uint64_t word,
                         rt::AccessKind) {
  report_.accesses++;
  std::uint64_t key = block_key(array, word);
  auto it = index_.find(key);
  if (it != index_.end()) {
    std::uint32_t id = it->second;
    if (id != head_) {
      // unlink
      Node& nd = nodes_[id];
      nodes_[nd.prev].next = nd.next;
      if (id == tail_)
        tail_ = nd.prev;
      else
        nodes_[nd.next].prev = nd.prev;
      // relink at head
      nd.next = head_;
      nodes_[head_].prev = id;
      head_ = id;
    }
    return;
  }
  report_.misses++;
  report_.arrays[array]++;
  std::uint32_t id;
  if (nodes_.size() < capacity_blocks_) {
    id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({key, 0, 0});
  } else {
    id = tail_;
    index_.erase(nodes_[id].key);
    tail_ = nodes_[id].prev;
    nodes_[id].key = key;
  }
  if (empty_) {
    head_ = tail_ = id;
    empty_ = false;
  } else {
    nodes_[id].next = head_;
    nodes_[head_].prev = id;
    head_ = id;
  }
  index_[key] = id;
}

MissReport replay_lru(const std::vector<rt::Access>& trace,
                      CacheConfig config) {
  LruCache c(config);
  for (const rt::Access& a : trace) c.on_access(a.array, a.word, a.kind);
  return c.report();
}

MissReport replay_lru_reference(const std::vector<rt::Access>& trace,
                                CacheConfig config) {
  if (!config.valid()) throw std::invalid_argument("bad cache config");
  const std::uint64_t cap = config.M / config.B;
  struct Line {
    std::uint64_t key;
    std::uint64_t used;
  };
  std::vector<Line> lines;
  MissReport rep;
  std::uint64_t clock = 0;
  for (const rt::Access& a : trace) {
    rep.accesses++;
    clock++;
    std::uint64_t key =
        (static_cast<std::uint64_t>(a.array) << 44) | (a.word / config.B);
    bool hit = false;
    for (Line& l : lines) {
      if (l.key == key) {
        l.used = clock;
        hit = true;
        break;
      }
    }
    if (hit) continue;
    rep.misses++;
    rep.arrays[a.array]++;
    if (lines.size() < cap) {
      lines.push_back({key, clock});
    } else {
      std::size_t victim = 0;
      for (std::size_t i = 1; i < lines.size(); ++i)
        if (lines[i].used < lines[victim].used) victim = i;
      lines[victim] = {key, clock};
    }
  }
  return rep;
}

void write_trace(const std::string& path,
                 const std::vector<rt::Access>& trace) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open trace file for writing");
  std::fwrite("FHTR1", 1, 5, f);
  for (const rt::Access& a : trace) {
    std::uint32_t arr = a.array;
    std::uint64_t word = a.word;
    std::uint8_t kind = static_cast<std::uint8_t>(a.kind);
    std::fwrite(&arr, sizeof arr, 1, f);
    std::fwrite(&word, sizeof word, 1, f);
    std::fwrite(&kind, sizeof kind, 1, f);
  }
  std::fclose(f);
}

std::vector<rt::Access> read_trace(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open trace file");
  char magic[5];
  if (std::fread(magic, 1, 5, f) != 5 || std::memcmp(magic, "FHTR1", 5) != 0) {
    std::fclose(f);
    throw std::runtime_error("bad trace header");
  }
  std::vector<rt::Access> out;
  for (;;) {
    std::uint32_t arr;
    std::uint64_t word;
    std::uint8_t kind;
    if (std::fread(&arr, sizeof arr, 1, f) != 1) break;
    if (std::fread(&word, sizeof word, 1, f) != 1 ||
        std::fread(&kind, sizeof kind, 1, f) != 1) {
      std::fclose(f);
      throw std::runtime_error("truncated trace record");
    }
    out.push_back({arr, word, static_cast<rt::AccessKind>(kind)});
  }
  std::fclose(f);
  return out;
}

}  // namespace forkhull::cache
