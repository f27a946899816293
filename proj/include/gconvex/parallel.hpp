#pragma once

#include <cstddef>
#include <functional>

namespace gcx {

/// Splits [0, count) into fixed-size chunks and runs fn(chunk, begin, end)
/// for each on up to `threads` workers. Chunk boundaries do not depend on
/// the thread count, so reductions over per-chunk results taken in chunk
/// order are bitwise reproducible.
void for_each_chunk(std::size_t count, std::size_t chunk_size, std::size_t threads,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

inline std::size_t chunk_count(std::size_t count, std::size_t chunk_size) {
  return (count + chunk_size - 1) / chunk_size;
}

}  // namespace gcx
