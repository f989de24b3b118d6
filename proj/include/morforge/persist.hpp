// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MORFORGE_PERSIST_HPP
#define MORFORGE_PERSIST_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "morforge/compress.hpp"
#include "morforge/driver.hpp"
#include "morforge/mesh.hpp"
#include "morforge/quad_rule.hpp"
#include "morforge/rom.hpp"

namespace morforge
{

//
// Binary archives: "MORFORGE" | u32 version | u32 kind | u32 ndims | u64 dims[ndims] |
// u64 payload checksum | payload of little-endian doubles whose length follows from dims.
//
class FormatError : public IoError
{
public:
  using IoError::IoError;
};

class VersionError : public IoError
{
public:
  using IoError::IoError;
};

class TruncationError : public IoError
{
public:
  using IoError::IoError;
};

class ArchiveDimensionError : public IoError
{
public:
  using IoError::IoError;
};

enum class PayloadKind : std::uint32_t
{
  kMesh = 1,
  kField = 2,
  kRob = 3,
  kTestSpace = 4,
  kQuadRule = 5,
  kTrace = 6,
  kRomBundle = 7
};

std::string ToString(PayloadKind kind);

constexpr std::uint32_t kFormatVersion = 1;

struct ArchiveHeader
{
  std::uint32_t version = kFormatVersion;
  PayloadKind kind = PayloadKind::kField;
  std::vector<std::uint64_t> dims;
};

ArchiveHeader ReadHeader(const std::string &path);

void SaveMesh(const std::string &path, const Mesh &mesh);
Mesh LoadMesh(const std::string &path);

void SaveField(const std::string &path, const HfField &field);
HfField LoadField(const std::string &path);

// With an inner product, orthonormality is checked on load.
void SaveRob(const std::string &path, const Rob &rob);
Rob LoadRob(const std::string &path, const InnerProduct *ip = nullptr);

void SaveTestSpace(const std::string &path, const TestSpaceState &state);
TestSpaceState LoadTestSpace(const std::string &path, const InnerProduct *ip = nullptr);

void SaveQuadRule(const std::string &path, const QuadRule &rule);
QuadRule LoadQuadRule(const std::string &path);

void SaveTrace(const std::string &path, const GreedyTrace &trace);
GreedyTrace LoadTrace(const std::string &path);

// A trained ROM with everything needed to evaluate it: model description, ROB, test space,
// quadrature rule, training coordinates and the hash of the generating config.
struct RomBundle
{
  std::shared_ptr<SteadyRom> steady;
  std::shared_ptr<UnsteadyRom> unsteady;
  std::uint64_t config_hash = 0;
};

void SaveRomBundle(const std::string &path, const SteadyRom &rom, std::uint64_t config_hash);
void SaveRomBundle(const std::string &path, const UnsteadyRom &rom, std::uint64_t config_hash);
RomBundle LoadRomBundle(const std::string &path);

// CSV exports. The steady trace starts with the documented schema columns; disabled timing
// leaves the time columns at zero so reruns are byte-identical.
std::string SteadyTraceCsv(const GreedyTrace &trace);
std::string UnsteadyTraceCsv(const UnsteadyDeltaTrace &trace);
// Writes text atomically (temporary file + rename).
void WriteTextFile(const std::string &path, const std::string &text);
std::string ReadTextFile(const std::string &path);

// FNV-1a over the bytes.
std::uint64_t Fnv1a(const void *data, std::size_t size, std::uint64_t seed = 14695981039346656037ULL);

}  // namespace morforge

#endif  // MORFORGE_PERSIST_HPP
