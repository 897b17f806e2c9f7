// Bit-packed policy export.
//
// Layout (all little-endian):
//   magic "TWCP" | u32 version | u8 ndims (=6)
//   per dim: u16 count, f32 values[count]            (grid descriptor)
//   u8 n_speeds, f32 speeds[...]
//   u8 n_bmeps,  f32 bmeps[...]
//   u8 n_sas,    f32 sas[...]
//   u32 entry_count
//   payload: ceil(12 * entry_count / 8) bytes; each entry is 12 bits with
//   the speed index in bits 0..3, BMEP index in bits 4..7 and spark-angle
//   index in bits 8..11, appended LSB-first into the byte stream.

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "twc/policy.hpp"

namespace twc {

namespace {

constexpr char kMagic[4] = {'T', 'W', 'C', 'P'};
constexpr std::uint32_t kVersion = 1;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  std::uint32_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(v));
  put_u32(out, bits);
}

void put_values(std::vector<std::uint8_t>& out,
                const std::vector<double>& values, bool u16_count) {
  if (u16_count)
    put_u16(out, static_cast<std::uint16_t>(values.size()));
  else
    out.push_back(static_cast<std::uint8_t>(values.size()));
  for (double v : values) put_f32(out, static_cast<float>(v));
}

struct Reader {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;

  std::uint8_t u8() {
    if (pos + 1 > bytes.size()) throw std::runtime_error("packed policy truncated");
    return bytes[pos++];
  }
  std::uint16_t u16() {
    const std::uint16_t lo = u8();
    return static_cast<std::uint16_t>(lo | (u8() << 8));
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  float f32() {
    const std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  std::vector<double> values(std::size_t count) {
    std::vector<double> out(count);
    for (auto& v : out) v = static_cast<double>(f32());
    return out;
  }
};

std::size_t index_of(const std::vector<double>& values, double v,
                     const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::abs(values[i] - v) < 1e-6) return i;
  throw std::runtime_error(std::string("packed policy: ") + what +
                           " value not in the setpoint list");
}

}  // namespace

std::size_t packed_payload_bytes(std::size_t entry_count) {
  return (12 * entry_count + 7) / 8;
}

std::vector<std::uint8_t> pack_policy(const CompressedPolicy& compressed,
                                      const EngineMap& map) {
  const std::vector<double> speeds = map.distinct_speeds();
  const std::vector<double> bmeps = map.distinct_bmeps();
  const std::vector<double> sas = map.distinct_spark_angles();
  if (speeds.size() > 16 || bmeps.size() > 16 || sas.size() > 16)
    throw std::runtime_error(
        "pack_policy: more than 16 distinct speeds, BMEPs or spark angles "
        "cannot be packed into 4-bit indices");

  // Resolve every entry to setpoint indices before emitting anything.
  std::vector<std::uint16_t> entries;
  entries.reserve(compressed.entry_count());
  for (std::uint16_t op : compressed.op_index) {
    if (op >= map.size())
      throw std::runtime_error("pack_policy: op index outside the engine map");
    const OperatingPoint& p = map.point(op);
    const std::size_t si = index_of(speeds, p.speed_rpm, "speed");
    const std::size_t bi = index_of(bmeps, p.bmep_bar, "bmep");
    const std::size_t ai = index_of(sas, p.spark_angle_CAbTDC, "spark angle");
    entries.push_back(static_cast<std::uint16_t>(si | (bi << 4) | (ai << 8)));
  }

  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, kVersion);
  out.push_back(6);
  for (const auto* axis :
       {&compressed.t1_values, &compressed.t2_values, &compressed.t3_values,
        &compressed.dt1_values, &compressed.t12_values, &compressed.dt2_values})
    put_values(out, *axis, /*u16_count=*/true);
  put_values(out, speeds, /*u16_count=*/false);
  put_values(out, bmeps, /*u16_count=*/false);
  put_values(out, sas, /*u16_count=*/false);
  put_u32(out, static_cast<std::uint32_t>(entries.size()));

  const std::size_t header = out.size();
  out.resize(header + packed_payload_bytes(entries.size()), 0);
  std::size_t bit = 0;
  for (std::uint16_t e : entries) {
    for (int b = 0; b < 12; ++b, ++bit) {
      if (e & (1u << b))
        out[header + bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
    }
  }
  return out;
}

std::size_t packed_header_bytes(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  char magic[4];
  for (auto& m : magic) m = static_cast<char>(r.u8());
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("packed policy: wrong magic");
  if (r.u32() != kVersion)
    throw std::runtime_error("packed policy: unsupported version");
  const std::uint8_t ndims = r.u8();
  for (std::uint8_t d = 0; d < ndims; ++d) {
    const std::uint16_t count = r.u16();
    r.values(count);
  }
  for (int list = 0; list < 3; ++list) {
    const std::uint8_t count = r.u8();
    r.values(count);
  }
  r.u32();  // entry count
  return r.pos;
}

PackedQueryResult query_packed(const std::vector<std::uint8_t>& bytes,
                               const std::array<double, 6>& state) {
  Reader r{bytes};
  char magic[4];
  for (auto& m : magic) m = static_cast<char>(r.u8());
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("packed policy: wrong magic");
  if (r.u32() != kVersion)
    throw std::runtime_error("packed policy: unsupported version");
  const std::uint8_t ndims = r.u8();
  if (ndims != 6)
    throw std::runtime_error("packed policy: expected 6 state dimensions");

  CompressedPolicy desc;
  std::array<std::vector<double>*, 6> axes = {
      &desc.t1_values, &desc.t2_values, &desc.t3_values,
      &desc.dt1_values, &desc.t12_values, &desc.dt2_values};
  for (auto* axis : axes) {
    const std::uint16_t count = r.u16();
    *axis = r.values(count);
  }
  const std::vector<double> speeds = r.values(r.u8());
  const std::vector<double> bmeps = r.values(r.u8());
  const std::vector<double> sas = r.values(r.u8());
  const std::uint32_t entry_count = r.u32();
  const std::size_t header = r.pos;
  if (bytes.size() < header + packed_payload_bytes(entry_count))
    throw std::runtime_error("packed policy: payload truncated");

  const std::size_t rank = desc.rank(state);
  if (rank >= entry_count)
    throw std::out_of_range("packed policy: state outside the enumeration");

  std::uint16_t entry = 0;
  std::size_t bit = rank * 12;
  for (int b = 0; b < 12; ++b, ++bit) {
    if (bytes[header + bit / 8] & (1u << (bit % 8)))
      entry |= static_cast<std::uint16_t>(1u << b);
  }
  PackedQueryResult out;
  out.speed_rpm = speeds.at(entry & 0xF);
  out.bmep_bar = bmeps.at((entry >> 4) & 0xF);
  out.spark_angle = sas.at((entry >> 8) & 0xF);
  return out;
}

}  // namespace twc
