#include "stmos/sparse/weight_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "stmos/version.hpp"

static_assert(std::endian::native == std::endian::little,
              "weight container assumes a little-endian host");

namespace stmos {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'S', 'T', 'W', 'B'};

template <class Scalar>
const char* dtype_name() {
  if constexpr (sizeof(Scalar) == 4)
    return "float32";
  else
    return "float64";
}

}  // namespace

template <class Scalar>
void write_weight_container(const std::filesystem::path& path,
                            std::span<const NamedTensorView<Scalar>> tensors) {
  json header;
  header["version"] = kWeightContainerVersion;
  header["offset_order"] = kOffsetOrderVersion;
  header["dtype"] = dtype_name<Scalar>();
  json table = json::array();
  std::uint64_t offset = 0;
  for (const auto& t : tensors) {
    table.push_back({{"name", t.name}, {"shape", t.shape}, {"offset", offset}});
    offset += static_cast<std::uint64_t>(t.size) * sizeof(Scalar);
  }
  header["tensors"] = std::move(table);
  const std::string header_str = header.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open weight container for writing: " + path.string());
  os.write(kMagic, 4);
  const std::uint32_t hlen = static_cast<std::uint32_t>(header_str.size());
  os.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  os.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
  for (const auto& t : tensors)
    os.write(reinterpret_cast<const char*>(t.data),
             static_cast<std::streamsize>(t.size * static_cast<std::int64_t>(sizeof(Scalar))));
  if (!os) throw IoError("short write on weight container: " + path.string());
}

template <class Scalar>
std::vector<LoadedTensor<Scalar>> read_weight_container(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open weight container: " + path.string());

  char magic[4];
  std::uint32_t hlen = 0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("not a weight container: " + path.string());
  std::string header_str(hlen, '\0');
  is.read(header_str.data(), hlen);
  if (!is) throw FormatError("truncated weight container header: " + path.string());

  json header;
  try {
    header = json::parse(header_str);
  } catch (const json::parse_error& e) {
    throw FormatError("bad weight container header: " + std::string(e.what()));
  }
  if (!header.contains("version")) throw VersionError("weight container missing version field");
  if (header["version"].get<int>() != kWeightContainerVersion)
    throw VersionError("unsupported weight container version " +
                       header["version"].dump());
  if (header.value("offset_order", "") != kOffsetOrderVersion)
    throw VersionError("weight container uses offset order '" +
                       header.value("offset_order", "") + "', expected '" +
                       kOffsetOrderVersion + "'");
  const std::string dtype = header.value("dtype", "");
  if (dtype != "float32" && dtype != "float64")
    throw FormatError("unknown weight container dtype: " + dtype);
  const std::size_t scalar_bytes = dtype == "float32" ? 4 : 8;

  // Payload follows the header; entries record byte offsets into it.
  const std::streamoff payload_start = static_cast<std::streamoff>(4 + sizeof(hlen) + hlen);
  std::vector<LoadedTensor<Scalar>> out;
  for (const auto& entry : header.at("tensors")) {
    LoadedTensor<Scalar> t;
    t.name = entry.at("name").get<std::string>();
    t.shape = entry.at("shape").get<std::vector<std::int64_t>>();
    std::int64_t size = 1;
    for (std::int64_t s : t.shape) size *= s;
    is.seekg(payload_start + static_cast<std::streamoff>(entry.at("offset").get<std::uint64_t>()));
    std::vector<char> raw(static_cast<std::size_t>(size) * scalar_bytes);
    is.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (!is) throw FormatError("truncated tensor '" + t.name + "' in " + path.string());
    t.data.resize(static_cast<std::size_t>(size));
    if (scalar_bytes == sizeof(Scalar)) {
      std::memcpy(t.data.data(), raw.data(), raw.size());
    } else if (scalar_bytes == 4) {
      const float* src = reinterpret_cast<const float*>(raw.data());
      for (std::int64_t i = 0; i < size; ++i) t.data[static_cast<std::size_t>(i)] = static_cast<Scalar>(src[i]);
    } else {
      const double* src = reinterpret_cast<const double*>(raw.data());
      for (std::int64_t i = 0; i < size; ++i) t.data[static_cast<std::size_t>(i)] = static_cast<Scalar>(src[i]);
    }
    out.push_back(std::move(t));
  }
  return out;
}

template void write_weight_container<float>(const std::filesystem::path&,
                                            std::span<const NamedTensorView<float>>);
template void write_weight_container<double>(const std::filesystem::path&,
                                             std::span<const NamedTensorView<double>>);
template std::vector<LoadedTensor<float>> read_weight_container<float>(
    const std::filesystem::path&);
template std::vector<LoadedTensor<double>> read_weight_container<double>(
    const std::filesystem::path&);

}  // namespace stmos
