#include "fkdv/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace fkdv {

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& base, const char* ext) {
  return std::filesystem::path(base.string() + ext);
}

void put_le(std::ofstream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_le(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

}  // namespace

void write_snapshot(const std::filesystem::path& base, const Field& u, double t, const ForcingSpec& forcing) {
  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
  std::ofstream bin(with_suffix(base, ".bin"), std::ios::binary | std::ios::trunc);
  if (!bin) throw std::runtime_error("snapshot: cannot open " + with_suffix(base, ".bin").string());
  for (double v : u.values()) put_le(bin, v);
  nlohmann::json meta = {{"L", u.grid().half_length}, {"N", u.grid().num_points}, {"t", t},
                         {"epsilon", forcing.epsilon}, {"E", forcing.energy},
                         {"profile", forcing.profile.name()}};
  std::ofstream js(with_suffix(base, ".json"), std::ios::trunc);
  if (!js) throw std::runtime_error("snapshot: cannot open " + with_suffix(base, ".json").string());
  js << meta.dump(2) << "\n";
}

Snapshot read_snapshot(const std::filesystem::path& base) {
  std::ifstream js(with_suffix(base, ".json"));
  if (!js) throw std::runtime_error("snapshot: missing sidecar " + with_suffix(base, ".json").string());
  nlohmann::json meta;
  js >> meta;
  Snapshot s;
  s.meta.half_length = meta.at("L").get<double>();
  s.meta.num_points = meta.at("N").get<std::size_t>();
  s.meta.t = meta.at("t").get<double>();
  s.meta.epsilon = meta.at("epsilon").get<double>();
  s.meta.energy = meta.at("E").get<double>();
  s.meta.profile = meta.at("profile").get<std::string>();
  const GridSpec grid = make_grid(s.meta.half_length, s.meta.num_points);
  std::ifstream bin(with_suffix(base, ".bin"), std::ios::binary);
  if (!bin) throw std::runtime_error("snapshot: missing samples " + with_suffix(base, ".bin").string());
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
  if (raw.size() != 8 * grid.num_points)
    throw std::runtime_error("snapshot: expected " + std::to_string(8 * grid.num_points) + " bytes, found " +
                             std::to_string(raw.size()));
  std::vector<double> values(grid.num_points);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = get_le(raw.data() + 8 * i);
  s.field = Field(grid, std::move(values));
  return s;
}

}  // namespace fkdv
