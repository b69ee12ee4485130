#ifndef SCANNEAL_INSTANCE_IO_HPP
#define SCANNEAL_INSTANCE_IO_HPP

#include <filesystem>

#include "scanneal/generators.hpp"

namespace scanneal {

// Plain-text instance format, one record per line, 0-indexed vertices:
//   # meta <key> <value...>      optional provenance, preserved on reload
//   ising <N>                    header, required first record
//   J <x> <y> <value>            coupling, canonical x < y
//   h <x> <value>                nonzero field
//   tsp <n> <A> <B>              decoder block for tour instances
//   d <i> <j> <value>            distance, i < j
// Doubles are written shortest-round-trip, so save/load is exact.
void save_instance(const InstanceArtifact& artifact,
                   const std::filesystem::path& path);

InstanceArtifact load_instance(const std::filesystem::path& path);

}  // namespace scanneal

#endif
