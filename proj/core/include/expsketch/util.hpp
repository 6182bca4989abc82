#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace expsketch {

/// FNV-1a over a byte string, returned as a fixed-width hex string.
/// Used for provenance records, not for anything security-sensitive.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);
std::string file_hash_hex(const std::string& path);

/// splitmix64 step; the basis for derived RNG streams.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic sub-stream seed: mixes a base seed with stream indices so
/// that per-trial generators do not depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

/// Worker count: EXPANDER_SKETCH_THREADS if set, else hardware concurrency,
/// clamped to [1, 64].
int default_thread_count();

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Blocks until
/// done. Exceptions from workers are rethrown (first one wins).
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

/// Writes content to path via a temp file in the same directory + rename, so
/// readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

}  // namespace expsketch
