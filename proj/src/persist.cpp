// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "morforge/persist.hpp"

#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

#include "morforge/creep_model.hpp"
#include "morforge/steady_model.hpp"

namespace morforge
{

static_assert(std::endian::native == std::endian::little, "archives assume a little-endian host");

namespace
{

constexpr char kMagic[8] = {'M', 'O', 'R', 'F', 'O', 'R', 'G', 'E'};
constexpr std::uint32_t kMaxDims = 64;
constexpr double kOrthoTol = 1e-10;
// Per-record scalar fields of a trace record, excluding mu.
constexpr std::uint64_t kRecordFields = 19;

enum ModelId : std::uint64_t
{
  kReactionDiffusion = 1,
  kCreepBar = 2
};

std::uint64_t Checked(std::uint64_t a, std::uint64_t b, bool mul)
{
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / 16;
  if (a > limit || b > limit || (mul && b != 0 && a > limit / b))
  {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return mul ? a * b : a + b;
}

std::uint64_t Mul(std::uint64_t a, std::uint64_t b) { return Checked(a, b, true); }
std::uint64_t Add(std::uint64_t a, std::uint64_t b) { return Checked(a, b, false); }

class Writer
{
public:
  void Put(double v) { data_.push_back(v); }
  void Put(const Eigen::Ref<const Matrix> &m)
  {
    for (Eigen::Index j = 0; j < m.cols(); j++)
    {
      for (Eigen::Index i = 0; i < m.rows(); i++)
      {
        data_.push_back(m(i, j));
      }
    }
  }
  void Put(const std::vector<double> &v) { data_.insert(data_.end(), v.begin(), v.end()); }

  void Save(const std::string &path, PayloadKind kind, const std::vector<std::uint64_t> &dims)
  {
    std::string bytes(kMagic, 8);
    auto append = [&bytes](const void *p, std::size_t n)
    { bytes.append(static_cast<const char *>(p), n); };
    const std::uint32_t version = kFormatVersion;
    const auto k = static_cast<std::uint32_t>(kind);
    const auto nd = static_cast<std::uint32_t>(dims.size());
    append(&version, 4);
    append(&k, 4);
    append(&nd, 4);
    append(dims.data(), 8 * dims.size());
    const std::size_t payload_bytes = 8 * data_.size();
    const std::uint64_t sum = Fnv1a(data_.data(), payload_bytes);
    append(&sum, 8);
    append(data_.data(), payload_bytes);
    WriteTextFile(path, bytes);
  }

private:
  std::vector<double> data_;
};

class Reader
{
public:
  Reader(const std::string &path, const double *data, std::size_t size)
    : path_(path), data_(data), size_(size)
  {
  }

  double Get()
  {
    if (pos_ >= size_)
    {
      throw TruncationError(path_ + ": payload ends early");
    }
    return data_[pos_++];
  }
  Matrix GetMatrix(std::uint64_t rows, std::uint64_t cols)
  {
    Matrix m(rows, cols);
    for (std::uint64_t j = 0; j < cols; j++)
    {
      for (std::uint64_t i = 0; i < rows; i++)
      {
        m(i, j) = Get();
      }
    }
    return m;
  }
  Vector GetVector(std::uint64_t n) { return GetMatrix(n, 1).col(0); }
  std::vector<double> GetList(std::uint64_t n)
  {
    std::vector<double> out(n);
    for (auto &v : out)
    {
      v = Get();
    }
    return out;
  }
  int GetInt()
  {
    const double v = Get();
    if (!(v >= std::numeric_limits<int>::min() && v <= std::numeric_limits<int>::max()) ||
        v != std::floor(v))
    {
      throw FormatError(path_ + ": expected an integer value");
    }
    return static_cast<int>(v);
  }

private:
  std::string path_;
  const double *data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

struct Archive
{
  ArchiveHeader header;
  std::vector<double> payload;
};

std::string ReadBytes(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw IoError(path + ": cannot open for reading");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad())
  {
    throw IoError(path + ": read failed");
  }
  return ss.str();
}

// Parses the header; `payload_offset` receives the byte offset of the payload.
ArchiveHeader ParseHeader(const std::string &path, const std::string &bytes,
                          std::size_t &payload_offset, std::uint64_t &checksum)
{
  const std::size_t n = bytes.size();
  if (std::memcmp(bytes.data(), kMagic, std::min<std::size_t>(n, 8)) != 0)
  {
    throw FormatError(path + ": not a MORFORGE archive (bad magic)");
  }
  if (n < 20)
  {
    throw TruncationError(path + ": header is truncated");
  }
  ArchiveHeader h;
  std::uint32_t kind = 0, nd = 0;
  std::memcpy(&h.version, bytes.data() + 8, 4);
  std::memcpy(&kind, bytes.data() + 12, 4);
  std::memcpy(&nd, bytes.data() + 16, 4);
  if (h.version != kFormatVersion)
  {
    throw VersionError(path + ": format version " + std::to_string(h.version) +
                       " is not supported (expected " + std::to_string(kFormatVersion) + ")");
  }
  if (kind < 1 || kind > 7)
  {
    throw FormatError(path + ": unknown payload kind " + std::to_string(kind));
  }
  h.kind = static_cast<PayloadKind>(kind);
  if (nd > kMaxDims)
  {
    throw FormatError(path + ": implausible dimension count " + std::to_string(nd));
  }
  const std::size_t end = 20 + 8 * static_cast<std::size_t>(nd) + 8;
  if (n < end)
  {
    throw TruncationError(path + ": header is truncated");
  }
  h.dims.resize(nd);
  std::memcpy(h.dims.data(), bytes.data() + 20, 8 * nd);
  std::memcpy(&checksum, bytes.data() + end - 8, 8);
  payload_offset = end;
  return h;
}

void RequireDims(const std::string &path, const ArchiveHeader &h, std::size_t count)
{
  if (h.dims.size() != count)
  {
    throw ArchiveDimensionError(path + ": " + ToString(h.kind) + " archive expects " +
                                std::to_string(count) + " dimensions, found " +
                                std::to_string(h.dims.size()));
  }
}

std::uint64_t ExpectedLength(const std::string &path, const ArchiveHeader &h)
{
  const auto &d = h.dims;
  switch (h.kind)
  {
  case PayloadKind::kMesh:
    RequireDims(path, h, 2);
    return d[0];
  case PayloadKind::kField:
    RequireDims(path, h, 2);
    return d[0];
  case PayloadKind::kRob:
    RequireDims(path, h, 4);
    return Mul(d[0], d[1]);
  case PayloadKind::kTestSpace:
    RequireDims(path, h, 3);
    return Add(Mul(d[0], d[1]), d[2]);
  case PayloadKind::kQuadRule:
    RequireDims(path, h, 2);
    return Add(d[0], d[1]);
  case PayloadKind::kTrace:
    RequireDims(path, h, 4);
    return Add(Add(Mul(d[0], Add(kRecordFields, d[1])), 1), Add(d[2], d[3]));
  case PayloadKind::kRomBundle:
  {
    // model, nodes, level, opts, dofs, n, m, n_eig, ne, nf, p, ntrain, ntimes, nsettings, hash
    RequireDims(path, h, 15);
    std::uint64_t len = Add(d[1], d[3]);
    len = Add(len, Mul(d[4], d[5]));
    len = Add(len, Mul(d[4], d[6]));
    len = Add(len, d[7]);
    len = Add(len, Add(d[8], d[9]));
    len = Add(len, Mul(d[11], Add(d[10], d[5])));
    len = Add(len, Add(d[12], d[13]));
    return len;
  }
  }
  throw FormatError(path + ": unknown payload kind");
}

Archive ReadArchive(const std::string &path, PayloadKind expected)
{
  const std::string bytes = ReadBytes(path);
  std::size_t offset = 0;
  std::uint64_t checksum = 0;
  Archive a;
  a.header = ParseHeader(path, bytes, offset, checksum);
  if (a.header.kind != expected)
  {
    throw FormatError(path + ": holds a " + ToString(a.header.kind) + " payload, expected " +
                      ToString(expected));
  }
  const std::uint64_t want = ExpectedLength(path, a.header);
  const std::uint64_t have_bytes = bytes.size() - offset;
  if (want == std::numeric_limits<std::uint64_t>::max() || have_bytes < 8 * want)
  {
    throw TruncationError(path + ": payload is shorter than its dimensions require");
  }
  if (have_bytes != 8 * want)
  {
    throw ArchiveDimensionError(path + ": payload length " + std::to_string(have_bytes) +
                                " bytes disagrees with dimensions (" +
                                std::to_string(8 * want) + " bytes)");
  }
  if (Fnv1a(bytes.data() + offset, have_bytes) != checksum)
  {
    throw FormatError(path + ": payload checksum mismatch");
  }
  a.payload.resize(want);
  std::memcpy(a.payload.data(), bytes.data() + offset, have_bytes);
  return a;
}

int DimInt(const std::string &path, std::uint64_t v)
{
  if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max()))
  {
    throw ArchiveDimensionError(path + ": dimension out of range");
  }
  return static_cast<int>(v);
}

void RequireFinite(const std::string &path, const std::vector<double> &payload)
{
  for (double v : payload)
  {
    if (!std::isfinite(v))
    {
      throw FormatError(path + ": payload holds a non-finite value");
    }
  }
}

void CheckOrthonormal(const std::string &path, const Matrix &modes, const InnerProduct *ip,
                      const char *what)
{
  if (ip == nullptr || modes.cols() == 0)
  {
    return;
  }
  if (modes.rows() != ip->Size())
  {
    throw ArchiveDimensionError(path + ": " + what + " length does not match the inner product");
  }
  const double defect = OrthonormalityDefect(modes, *ip);
  if (!(defect <= kOrthoTol))
  {
    throw FormatError(path + ": " + what + " is not orthonormal (defect " +
                      std::to_string(defect) + ")");
  }
}

QuadRule ReadRule(Reader &r, int ne, int nf, const std::string &path)
{
  const Vector rho = r.GetVector(static_cast<std::uint64_t>(ne + nf));
  QuadRule q = QuadRule::FromConcatenated(rho, ne);
  try
  {
    q.Validate();
  }
  catch (const ArgumentError &e)
  {
    throw FormatError(path + ": " + e.what());
  }
  return q;
}

std::string Num(double v)
{
  if (std::isnan(v))
  {
    return "nan";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string MuColumns(const GreedyRecord &rec, std::size_t p)
{
  std::string s;
  for (std::size_t i = 0; i < p; i++)
  {
    s += Num(i < rec.mu.size() ? rec.mu[i] : std::nan("")) + ",";
  }
  return s;
}

std::string MuHeader(std::size_t p)
{
  std::string s;
  for (std::size_t i = 0; i < p; i++)
  {
    s += "mu_" + std::to_string(i + 1) + ",";
  }
  return s;
}

std::size_t MaxParamDim(const std::vector<GreedyRecord> &records)
{
  std::size_t p = 2;
  for (const auto &r : records)
  {
    p = std::max(p, r.mu.size());
  }
  return p;
}

std::vector<double> SteadyOptions(const ReactionDiffusionModel &model)
{
  const ReactionDiffusionOptions &o = model.Options();
  if (!model.HasDefaultSource())
  {
    throw ArgumentError("rom bundle: a custom source term cannot be serialized");
  }
  std::vector<double> v{o.neumann_flux};
  for (std::size_t i = 0; i < o.box.dim(); i++)
  {
    v.push_back(o.box.lower(i));
  }
  for (std::size_t i = 0; i < o.box.dim(); i++)
  {
    v.push_back(o.box.upper(i));
  }
  return v;
}

std::vector<double> CreepOptions(const CreepBarOptions &o)
{
  std::vector<double> v{o.youngs_variation,
                        o.tau_variation,
                        o.foundation,
                        o.foundation_cubic,
                        o.body_force,
                        o.end == EndCondition::kTraction ? 0.0 : 1.0,
                        o.end_value};
  for (std::size_t i = 0; i < o.box.dim(); i++)
  {
    v.push_back(o.box.lower(i));
  }
  for (std::size_t i = 0; i < o.box.dim(); i++)
  {
    v.push_back(o.box.upper(i));
  }
  return v;
}

ParamBox BoxFrom(const std::vector<double> &v, std::size_t offset, const std::string &path)
{
  const std::size_t rest = v.size() - offset;
  if (rest % 2 != 0 || rest == 0)
  {
    throw FormatError(path + ": malformed parameter box");
  }
  const std::size_t p = rest / 2;
  std::vector<double> lo(v.begin() + offset, v.begin() + offset + p);
  std::vector<double> hi(v.begin() + offset + p, v.end());
  try
  {
    return ParamBox(lo, hi);
  }
  catch (const Error &e)
  {
    throw FormatError(path + ": " + e.what());
  }
}

struct BundleParts
{
  ModelId model;
  const Mesh *mesh;
  std::vector<double> options;
  const Rob *rob;
  const TestSpaceState *test;
  const QuadRule *quad;
  std::size_t p;
  std::vector<ParamVec> train_mu;
  std::vector<Vector> train_alpha;
  std::vector<double> times;
  std::vector<double> settings;
};

void SaveBundle(const std::string &path, const BundleParts &b, std::uint64_t hash)
{
  const TestSpaceState empty;
  const TestSpaceState &test = b.test ? *b.test : empty;
  const auto nodes = b.mesh->Nodes();
  Writer w;
  w.Put(nodes);
  w.Put(b.options);
  w.Put(b.rob->basis);
  w.Put(test.modes);
  w.Put(test.eigenvalues);
  w.Put(b.quad->Concatenated());
  for (std::size_t i = 0; i < b.train_mu.size(); i++)
  {
    if (b.train_mu[i].size() != b.p || b.train_alpha[i].size() != b.rob->Size())
    {
      throw DimensionError("rom bundle: training data does not match the ROM");
    }
    w.Put(b.train_mu[i].values());
    w.Put(b.train_alpha[i]);
  }
  w.Put(b.times);
  w.Put(b.settings);
  const std::uint64_t m = test.Size();
  w.Save(path, PayloadKind::kRomBundle,
         {b.model, nodes.size(), static_cast<std::uint64_t>(b.mesh->Level()), b.options.size(),
          static_cast<std::uint64_t>(b.rob->NumDofs()), static_cast<std::uint64_t>(b.rob->Size()),
          m, static_cast<std::uint64_t>(test.eigenvalues.size()),
          static_cast<std::uint64_t>(b.quad->NumElements()),
          static_cast<std::uint64_t>(b.quad->NumFacets()), b.p, b.train_mu.size(), b.times.size(),
          b.settings.size(), hash});
}

}  // namespace

std::uint64_t Fnv1a(const void *data, std::size_t size, std::uint64_t seed)
{
  const auto *p = static_cast<const unsigned char *>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; i++)
  {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::string ToString(PayloadKind kind)
{
  switch (kind)
  {
  case PayloadKind::kMesh:
    return "mesh";
  case PayloadKind::kField:
    return "field";
  case PayloadKind::kRob:
    return "rob";
  case PayloadKind::kTestSpace:
    return "testspace";
  case PayloadKind::kQuadRule:
    return "quadrule";
  case PayloadKind::kTrace:
    return "trace";
  case PayloadKind::kRomBundle:
    return "rom_bundle";
  }
  return "unknown";
}

void WriteTextFile(const std::string &path, const std::string &text)
{
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path() && !fs::exists(target.parent_path()))
  {
    throw IoError(path + ": directory does not exist");
  }
  const std::string tmp = path + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
    {
      throw IoError(path + ": cannot open for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out)
    {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError(path + ": write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec)
  {
    fs::remove(tmp, ec);
    throw IoError(path + ": rename failed");
  }
}

std::string ReadTextFile(const std::string &path) { return ReadBytes(path); }

ArchiveHeader ReadHeader(const std::string &path)
{
  const std::string bytes = ReadBytes(path);
  std::size_t offset = 0;
  std::uint64_t checksum = 0;
  return ParseHeader(path, bytes, offset, checksum);
}

void SaveMesh(const std::string &path, const Mesh &mesh)
{
  Writer w;
  w.Put(mesh.Nodes());
  w.Save(path, PayloadKind::kMesh,
         {static_cast<std::uint64_t>(mesh.NumNodes()), static_cast<std::uint64_t>(mesh.Level())});
}

Mesh LoadMesh(const std::string &path)
{
  const Archive a = ReadArchive(path, PayloadKind::kMesh);
  RequireFinite(path, a.payload);
  try
  {
    return Mesh::FromNodes(a.payload, DimInt(path, a.header.dims[1]));
  }
  catch (const ArgumentError &e)
  {
    throw FormatError(path + ": " + e.what());
  }
}

void SaveField(const std::string &path, const HfField &field)
{
  Writer w;
  w.Put(field.values);
  w.Save(path, PayloadKind::kField,
         {static_cast<std::uint64_t>(field.values.size()),
          static_cast<std::uint64_t>(field.mesh_level)});
}

HfField LoadField(const std::string &path)
{
  const Archive a = ReadArchive(path, PayloadKind::kField);
  RequireFinite(path, a.payload);
  HfField f;
  f.values = Eigen::Map<const Vector>(a.payload.data(), a.payload.size());
  f.mesh_level = DimInt(path, a.header.dims[1]);
  return f;
}

void SaveRob(const std::string &path, const Rob &rob)
{
  Writer w;
  w.Put(rob.basis);
  w.Save(path, PayloadKind::kRob,
         {static_cast<std::uint64_t>(rob.NumDofs()), static_cast<std::uint64_t>(rob.Size()),
          static_cast<std::uint64_t>(rob.mesh_level), static_cast<std::uint64_t>(rob.kind)});
}

Rob LoadRob(const std::string &path, const InnerProduct *ip)
{
  const Archive a = ReadArchive(path, PayloadKind::kRob);
  RequireFinite(path, a.payload);
  const auto &d = a.header.dims;
  if (d[3] > static_cast<std::uint64_t>(NormKind::kEuclidean))
  {
    throw FormatError(path + ": unknown norm kind");
  }
  Reader r(path, a.payload.data(), a.payload.size());
  Rob rob;
  rob.basis = r.GetMatrix(d[0], d[1]);
  rob.mesh_level = DimInt(path, d[2]);
  rob.kind = static_cast<NormKind>(d[3]);
  CheckOrthonormal(path, rob.basis, ip, "reduced basis");
  return rob;
}

void SaveTestSpace(const std::string &path, const TestSpaceState &state)
{
  Writer w;
  w.Put(state.modes);
  w.Put(state.eigenvalues);
  w.Save(path, PayloadKind::kTestSpace,
         {static_cast<std::uint64_t>(state.modes.rows()),
          static_cast<std::uint64_t>(state.modes.cols()),
          static_cast<std::uint64_t>(state.eigenvalues.size())});
}

TestSpaceState LoadTestSpace(const std::string &path, const InnerProduct *ip)
{
  const Archive a = ReadArchive(path, PayloadKind::kTestSpace);
  RequireFinite(path, a.payload);
  const auto &d = a.header.dims;
  Reader r(path, a.payload.data(), a.payload.size());
  TestSpaceState s;
  s.modes = r.GetMatrix(d[0], d[1]);
  s.eigenvalues = r.GetVector(d[2]);
  CheckOrthonormal(path, s.modes, ip, "test space");
  return s;
}

void SaveQuadRule(const std::string &path, const QuadRule &rule)
{
  rule.Validate();
  Writer w;
  w.Put(rule.Concatenated());
  w.Save(path, PayloadKind::kQuadRule,
         {static_cast<std::uint64_t>(rule.NumElements()),
          static_cast<std::uint64_t>(rule.NumFacets())});
}

QuadRule LoadQuadRule(const std::string &path)
{
  const Archive a = ReadArchive(path, PayloadKind::kQuadRule);
  Reader r(path, a.payload.data(), a.payload.size());
  return ReadRule(r, DimInt(path, a.header.dims[0]), DimInt(path, a.header.dims[1]), path);
}

void SaveTrace(const std::string &path, const GreedyTrace &trace)
{
  const std::size_t p = trace.records.empty() ? 0 : trace.records.front().mu.size();
  Writer w;
  for (const auto &rec : trace.records)
  {
    if (rec.mu.size() != p)
    {
      throw DimensionError("trace: records have different parameter dimensions");
    }
    w.Put(rec.iter);
    w.Put(rec.mu.values());
    for (double v : {rec.indicator_max, rec.true_rel_err, double(rec.n), double(rec.m),
                     double(rec.nnls_solves), double(rec.nnls_solves_cold), double(rec.nnz_elem),
                     double(rec.nnz_facet), rec.t_rob, rec.t_es, rec.t_eqp, rec.t_search, rec.t_hf,
                     rec.t_eqp_cold, double(rec.hf_newton_iterations), rec.eq_residual,
                     rec.eq_residual_cold, double(rec.nnz_cold)})
    {
      w.Put(v);
    }
  }
  w.Put(trace.overhead_s);
  std::uint64_t chars = 0;
  for (const auto &s : trace.warnings)
  {
    w.Put(static_cast<double>(s.size()));
    chars += s.size();
  }
  for (const auto &s : trace.warnings)
  {
    for (unsigned char c : s)
    {
      w.Put(static_cast<double>(c));
    }
  }
  w.Save(path, PayloadKind::kTrace,
         {trace.records.size(), p, trace.warnings.size(), chars});
}

GreedyTrace LoadTrace(const std::string &path)
{
  const Archive a = ReadArchive(path, PayloadKind::kTrace);
  const auto &d = a.header.dims;
  Reader r(path, a.payload.data(), a.payload.size());
  GreedyTrace t;
  for (std::uint64_t i = 0; i < d[0]; i++)
  {
    GreedyRecord rec;
    rec.iter = r.GetInt();
    rec.mu = ParamVec(r.GetList(d[1]));
    rec.indicator_max = r.Get();
    rec.true_rel_err = r.Get();
    rec.n = r.GetInt();
    rec.m = r.GetInt();
    rec.nnls_solves = r.GetInt();
    rec.nnls_solves_cold = r.GetInt();
    rec.nnz_elem = r.GetInt();
    rec.nnz_facet = r.GetInt();
    rec.t_rob = r.Get();
    rec.t_es = r.Get();
    rec.t_eqp = r.Get();
    rec.t_search = r.Get();
    rec.t_hf = r.Get();
    rec.t_eqp_cold = r.Get();
    rec.hf_newton_iterations = r.GetInt();
    rec.eq_residual = r.Get();
    rec.eq_residual_cold = r.Get();
    rec.nnz_cold = r.GetInt();
    if (rec.iter != static_cast<int>(i))
    {
      throw FormatError(path + ": trace iteration indices are not contiguous");
    }
    if (rec.n < 0 || rec.m < 0 || rec.nnls_solves < 0 || rec.nnz_elem < 0 || rec.nnz_facet < 0 ||
        rec.hf_newton_iterations < 0 || rec.nnls_solves_cold < -1 || rec.nnz_cold < -1)
    {
      throw FormatError(path + ": trace holds a negative count");
    }
    t.records.push_back(std::move(rec));
  }
  t.overhead_s = r.Get();
  std::vector<int> lengths;
  std::uint64_t total = 0;
  for (std::uint64_t i = 0; i < d[2]; i++)
  {
    const int len = r.GetInt();
    if (len < 0)
    {
      throw FormatError(path + ": negative warning length");
    }
    lengths.push_back(len);
    total += static_cast<std::uint64_t>(len);
  }
  if (total != d[3])
  {
    throw ArchiveDimensionError(path + ": warning lengths disagree with the character count");
  }
  for (int len : lengths)
  {
    std::string s;
    for (int c = 0; c < len; c++)
    {
      const int v = r.GetInt();
      if (v < 0 || v > 255)
      {
        throw FormatError(path + ": warning text is not a byte string");
      }
      s.push_back(static_cast<char>(v));
    }
    t.warnings.push_back(std::move(s));
  }
  return t;
}

void SaveRomBundle(const std::string &path, const SteadyRom &rom, std::uint64_t config_hash)
{
  const auto *rd = dynamic_cast<const ReactionDiffusionModel *>(&rom.Model());
  if (rd == nullptr)
  {
    throw ArgumentError("rom bundle: only the reaction-diffusion model can be serialized");
  }
  const auto &gn = rom.Settings();
  BundleParts b{kReactionDiffusion,
                &rd->GetMesh(),
                SteadyOptions(*rd),
                &rom.GetRob(),
                &rom.Test(),
                &rom.Quad(),
                rd->Box().dim(),
                rom.TrainingParams(),
                rom.TrainingCoordinates(),
                {},
                {double(gn.max_iterations), double(gn.max_halvings), gn.step_tol,
                 gn.residual_tol, gn.fd_jacobian ? 1.0 : 0.0}};
  SaveBundle(path, b, config_hash);
}

void SaveRomBundle(const std::string &path, const UnsteadyRom &rom, std::uint64_t config_hash)
{
  const CreepBarModel &model = rom.Model();
  const NewtonSettings &ns = rom.Settings();
  BundleParts b{kCreepBar,
                &model.GetMesh(),
                CreepOptions(model.Options()),
                &rom.GetRob(),
                nullptr,
                &rom.Quad(),
                model.Box().dim(),
                {},
                {},
                rom.TimeGrid(),
                {double(ns.max_iterations), double(ns.max_halvings), ns.rtol, ns.atol}};
  SaveBundle(path, b, config_hash);
}

RomBundle LoadRomBundle(const std::string &path)
{
  const Archive a = ReadArchive(path, PayloadKind::kRomBundle);
  const auto &d = a.header.dims;
  Reader r(path, a.payload.data(), a.payload.size());
  const std::vector<double> nodes = r.GetList(d[1]);
  const std::vector<double> options = r.GetList(d[3]);
  Matrix basis = r.GetMatrix(d[4], d[5]);
  TestSpaceState test;
  test.modes = r.GetMatrix(d[4], d[6]);
  test.eigenvalues = r.GetVector(d[7]);
  const int ne = DimInt(path, d[8]);
  const int nf = DimInt(path, d[9]);
  QuadRule quad = ReadRule(r, ne, nf, path);
  std::vector<ParamVec> mus;
  std::vector<Vector> alphas;
  for (std::uint64_t i = 0; i < d[11]; i++)
  {
    mus.emplace_back(r.GetList(d[10]));
    alphas.push_back(r.GetVector(d[5]));
  }
  const std::vector<double> times = r.GetList(d[12]);
  const std::vector<double> settings = r.GetList(d[13]);
  RequireFinite(path, a.payload);

  Mesh mesh;
  try
  {
    mesh = Mesh::FromNodes(nodes, DimInt(path, d[2]));
  }
  catch (const ArgumentError &e)
  {
    throw FormatError(path + ": " + e.what());
  }
  if (mesh.NumElements() != ne || mesh.NumFacets() != nf)
  {
    throw ArchiveDimensionError(path + ": quadrature rule does not match the mesh");
  }
  Rob rob;
  rob.basis = std::move(basis);
  rob.mesh_level = mesh.Level();

  RomBundle out;
  out.config_hash = d[14];
  try
  {
    if (d[0] == kReactionDiffusion)
    {
      if (options.size() < 3 || settings.size() != 5)
      {
        throw FormatError(path + ": malformed steady model record");
      }
      ReactionDiffusionOptions o;
      o.neumann_flux = options[0];
      o.box = BoxFrom(options, 1, path);
      auto model = std::make_shared<ReactionDiffusionModel>(mesh, o);
      if (model->NumDofs() != rob.NumDofs() || test.modes.rows() != model->NumDofs())
      {
        throw ArchiveDimensionError(path + ": reduced basis does not match the model");
      }
      CheckOrthonormal(path, rob.basis, &model->TrialInnerProduct(), "reduced basis");
      CheckOrthonormal(path, test.modes, &model->TestInnerProduct(), "test space");
      GaussNewtonSettings gn;
      gn.max_iterations = static_cast<int>(settings[0]);
      gn.max_halvings = static_cast<int>(settings[1]);
      gn.step_tol = settings[2];
      gn.residual_tol = settings[3];
      gn.fd_jacobian = settings[4] != 0.0;
      out.steady = std::make_shared<SteadyRom>(model, rob, test, quad, gn);
      out.steady->SetTrainingData(mus, alphas);
    }
    else if (d[0] == kCreepBar)
    {
      if (options.size() < 9 || settings.size() != 4 || d[6] != 0 || d[7] != 0)
      {
        throw FormatError(path + ": malformed unsteady model record");
      }
      CreepBarOptions o;
      o.youngs_variation = options[0];
      o.tau_variation = options[1];
      o.foundation = options[2];
      o.foundation_cubic = options[3];
      o.body_force = options[4];
      o.end = options[5] == 0.0 ? EndCondition::kTraction : EndCondition::kDisplacement;
      o.end_value = options[6];
      o.box = BoxFrom(options, 7, path);
      auto model = std::make_shared<CreepBarModel>(mesh, o);
      if (model->NumDofs() != rob.NumDofs())
      {
        throw ArchiveDimensionError(path + ": reduced basis does not match the model");
      }
      CheckOrthonormal(path, rob.basis, &model->TrialInnerProduct(), "reduced basis");
      NewtonSettings ns;
      ns.max_iterations = static_cast<int>(settings[0]);
      ns.max_halvings = static_cast<int>(settings[1]);
      ns.rtol = settings[2];
      ns.atol = settings[3];
      out.unsteady = std::make_shared<UnsteadyRom>(model, rob, quad, times, ns);
    }
    else
    {
      throw FormatError(path + ": unknown model id " + std::to_string(d[0]));
    }
  }
  catch (const IoError &)
  {
    throw;
  }
  catch (const Error &e)
  {
    throw FormatError(path + ": " + e.what());
  }
  return out;
}

std::string SteadyTraceCsv(const GreedyTrace &trace)
{
  const std::size_t p = MaxParamDim(trace.records);
  std::string s = "iter," + MuHeader(p) +
                  "indicator_max,true_rel_err,n,m,nnls_solves,nnz_elem,nnz_facet,t_rob_s,t_es_s,"
                  "t_eqp_s,t_search_s,t_hf_s,nnls_solves_cold,hf_newton_iterations,eq_residual\n";
  for (const auto &r : trace.records)
  {
    s += std::to_string(r.iter) + "," + MuColumns(r, p) + Num(r.indicator_max) + "," +
         Num(r.true_rel_err) + "," + std::to_string(r.n) + "," + std::to_string(r.m) + "," +
         std::to_string(r.nnls_solves) + "," + std::to_string(r.nnz_elem) + "," +
         std::to_string(r.nnz_facet) + "," + Num(r.t_rob) + "," + Num(r.t_es) + "," +
         Num(r.t_eqp) + "," + Num(r.t_search) + "," + Num(r.t_hf) + "," +
         std::to_string(r.nnls_solves_cold) + "," + std::to_string(r.hf_newton_iterations) + "," +
         Num(r.eq_residual) + "\n";
  }
  return s;
}

std::string UnsteadyTraceCsv(const UnsteadyDeltaTrace &trace)
{
  const std::size_t p = MaxParamDim(trace.records);
  std::string s = "iter," + MuHeader(p) +
                  "indicator_max,true_rel_err,n,m,nnls_solves,nnz_elem,nnz_facet,t_rob_s,t_es_s,"
                  "t_eqp_s,t_search_s,t_hf_s,delta,nnls_solves_cold,pct_weights,pct_weights_cold,"
                  "speedup,t_eqp_cold_s,eq_residual,eq_residual_cold\n";
  for (std::size_t i = 0; i < trace.records.size(); i++)
  {
    const auto &r = trace.records[i];
    s += std::to_string(r.iter) + "," + MuColumns(r, p) + Num(r.indicator_max) + "," +
         Num(r.true_rel_err) + "," + std::to_string(r.n) + "," + std::to_string(r.m) + "," +
         std::to_string(r.nnls_solves) + "," + std::to_string(r.nnz_elem) + "," +
         std::to_string(r.nnz_facet) + "," + Num(r.t_rob) + "," + Num(r.t_es) + "," +
         Num(r.t_eqp) + "," + Num(r.t_search) + "," + Num(r.t_hf) + "," + Num(trace.delta) + "," +
         std::to_string(r.nnls_solves_cold) + "," + Num(trace.pct_weights[i]) + "," +
         Num(trace.pct_weights_cold[i]) + "," + Num(trace.speedup[i]) + "," +
         Num(r.t_eqp_cold) + "," + Num(r.eq_residual) + "," + Num(r.eq_residual_cold) + "\n";
  }
  return s;
}

}  // namespace morforge
