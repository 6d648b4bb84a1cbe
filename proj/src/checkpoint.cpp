#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>

#include "dante/errors.hpp"
#include "dante/sampler.hpp"

namespace dante {
namespace {

constexpr char kMagic[8] = {'D', 'A', 'N', 'T', 'E', 'D', 'R', 'W'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw DataError("truncated checkpoint " + path.string());
  return v;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const PosteriorDraws& draws) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put(out, kVersion);
  put<std::int32_t>(out, draws.dims.R);
  put<std::int32_t>(out, draws.dims.S);
  put<std::int32_t>(out, draws.dims.T);
  put<std::uint8_t>(out, draws.full_state ? 1 : 0);
  put<std::int32_t>(out, draws.theta_season ? *draws.theta_season : -1);
  put<std::uint64_t>(out, draws.width());
  put<std::uint64_t>(out, draws.M());
  for (const auto& name : draws.names) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (int c : draws.chain_id) put<std::int32_t>(out, c);
  out.write(reinterpret_cast<const char*>(draws.values.data()),
            static_cast<std::streamsize>(draws.values.size() * sizeof(double)));
  if (!out) throw DataError("failed writing " + path.string());
}

PosteriorDraws read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw DataError(path.string() + " is not a draws checkpoint");
  if (get<std::uint32_t>(in, path) != kVersion) throw DataError("unsupported checkpoint version in " + path.string());
  PosteriorDraws d;
  d.dims.R = get<std::int32_t>(in, path);
  d.dims.S = get<std::int32_t>(in, path);
  d.dims.T = get<std::int32_t>(in, path);
  d.full_state = get<std::uint8_t>(in, path) != 0;
  const auto ts = get<std::int32_t>(in, path);
  if (ts >= 0) d.theta_season = ts;
  const auto width = get<std::uint64_t>(in, path);
  const auto M = get<std::uint64_t>(in, path);
  if (d.dims.R < 1 || d.dims.S < 1 || d.dims.T < 1 || width > (1u << 26) || M > (1u << 26))
    throw DataError("corrupt checkpoint header in " + path.string());
  d.names.resize(width);
  for (auto& name : d.names) {
    const auto len = get<std::uint32_t>(in, path);
    if (len > 4096) throw DataError("corrupt checkpoint names in " + path.string());
    name.resize(len);
    if (!in.read(name.data(), len)) throw DataError("truncated checkpoint " + path.string());
  }
  d.chain_id.resize(M);
  std::set<int> chains;
  for (auto& c : d.chain_id) {
    c = get<std::int32_t>(in, path);
    if (c < 0) throw DataError("corrupt chain id in " + path.string());
    chains.insert(c);
  }
  d.values.resize(width * M);
  if (!in.read(reinterpret_cast<char*>(d.values.data()), static_cast<std::streamsize>(d.values.size() * sizeof(double))))
    throw DataError("truncated checkpoint " + path.string());
  if (d.names != retained_names(d.dims, {d.full_state, d.theta_season}))
    throw DataError("checkpoint columns do not match its dimensions in " + path.string());
  const int n_chains = chains.empty() ? 0 : *chains.rbegin() + 1;
  if (n_chains > 0) d.diagnostics = compute_diagnostics(d, n_chains);
  return d;
}

}  // namespace dante
