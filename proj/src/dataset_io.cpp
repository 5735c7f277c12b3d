#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"
#include "spdecpt/common.hpp"
#include "spdecpt/simulator.hpp"

namespace spdecpt {
namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'S', 'P', 'D', 'E'};
constexpr std::uint16_t kFormatVersion = 1;

json meta_to_json(const FieldDataset& ds) {
    json j;
    j["format"] = "spde-dataset";
    j["params"] = {{"theta0", ds.params.theta0()},
                   {"theta1", ds.params.theta1()},
                   {"theta2", ds.params.theta2()}};
    j["noise"] = {{"alpha", ds.noise.alpha()},
                  {"gamma", to_string(ds.noise.rule())},
                  {"mu0", ds.noise.mu0()}};
    j["profile"] = {{"change_points", ds.profile.change_points()},
                    {"levels", ds.profile.levels()}};
    j["grid"] = {{"N", ds.grid.N}, {"M", ds.grid.M}};
    j["truncation"] = ds.truncation;
    j["seed"] = ds.seed.seed;
    j["replication"] = ds.seed.replication;
    j["initial_coefficient"] = ds.initial_coefficient;
    return j;
}

FieldDataset meta_from_json(const json& j) {
    OperatorParams params(j.at("params").at("theta0").get<double>(),
                          j.at("params").at("theta1").get<std::vector<double>>(),
                          j.at("params").at("theta2").get<double>());
    NoiseSpec noise(j.at("noise").at("alpha").get<double>(),
                    gamma_rule_from_string(j.at("noise").at("gamma").get<std::string>()),
                    j.at("noise").value("mu0", 0.0));
    VolatilityProfile profile(
        j.at("profile").at("change_points").get<std::vector<double>>(),
        j.at("profile").at("levels").get<std::vector<double>>());
    SpaceTimeGrid grid(j.at("grid").at("N").get<std::int64_t>(),
                       j.at("grid").at("M").get<std::vector<std::int64_t>>());
    FieldDataset ds{std::move(grid),
                    {},
                    std::move(params),
                    std::move(noise),
                    std::move(profile),
                    j.at("truncation").get<std::vector<std::int64_t>>(),
                    {j.at("seed").get<std::uint64_t>(),
                     j.at("replication").get<std::uint32_t>()},
                    j.value("initial_coefficient", 0.0)};
    return ds;
}

void append_u16(std::string& buf, std::uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xFF));
    buf.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void append_u64(std::string& buf, std::uint64_t v) {
    for (int b = 0; b < 8; ++b)
        buf.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

std::uint16_t read_u16(const char* p) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(p[0]) |
                                      (static_cast<unsigned char>(p[1]) << 8));
}

std::uint64_t read_u64(const char* p) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b)
        v = (v << 8) | static_cast<unsigned char>(p[b]);
    return v;
}

}  // namespace

void save_dataset(const FieldDataset& ds, const std::string& path) {
    const std::string meta = meta_to_json(ds).dump();
    std::string buf;
    buf.reserve(24 + meta.size() + ds.values.size() * sizeof(double) + 8);
    buf.append(kMagic, 4);
    append_u16(buf, kFormatVersion);
    append_u16(buf, 0);  // reserved
    append_u64(buf, meta.size());
    buf += meta;
    append_u64(buf, ds.values.size());
    const std::size_t tensor_off = buf.size();
    buf.resize(tensor_off + ds.values.size() * sizeof(double));
    std::memcpy(buf.data() + tensor_off, ds.values.data(),
                ds.values.size() * sizeof(double));
    append_u64(buf, fnv1a64(buf.data(), buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("save_dataset: cannot open " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw FormatError("save_dataset: write failed for " + path);
}

FieldDataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("load_dataset: cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());

    if (buf.size() < 24 + 8 || std::memcmp(buf.data(), kMagic, 4) != 0)
        throw FormatError("load_dataset: not a dataset file (bad magic)");
    const std::uint16_t version = read_u16(buf.data() + 4);
    if (version != kFormatVersion)
        throw FormatError("load_dataset: unsupported format version " +
                          std::to_string(version));

    const std::uint64_t stored_sum = read_u64(buf.data() + buf.size() - 8);
    if (fnv1a64(buf.data(), buf.size() - 8) != stored_sum)
        throw FormatError("load_dataset: checksum mismatch (file corrupt)");

    const std::uint64_t meta_len = read_u64(buf.data() + 8);
    if (16 + meta_len + 8 + 8 > buf.size())
        throw FormatError("load_dataset: truncated metadata block");
    json meta;
    try {
        meta = json::parse(buf.substr(16, meta_len));
    } catch (const json::exception& e) {
        throw FormatError(std::string("load_dataset: bad metadata: ") + e.what());
    }

    const std::size_t count_off = 16 + meta_len;
    const std::uint64_t count = read_u64(buf.data() + count_off);
    const std::size_t tensor_off = count_off + 8;
    if (tensor_off + count * sizeof(double) + 8 != buf.size())
        throw FormatError("load_dataset: truncated tensor block");

    FieldDataset ds = meta_from_json(meta);
    std::int64_t expected = ds.grid.N + 1;
    for (auto Mk : ds.grid.M) expected *= Mk + 1;
    if (static_cast<std::uint64_t>(expected) != count)
        throw FormatError("load_dataset: tensor extents do not match metadata");
    ds.values.resize(count);
    std::memcpy(ds.values.data(), buf.data() + tensor_off,
                count * sizeof(double));
    return ds;
}

void export_dataset_csv(const FieldDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("export_dataset_csv: cannot open " + path);
    out.precision(17);
    if (ds.dimension() == 1) {
        out << "i,j,t,y,value\n";
        for (std::int64_t i = 0; i <= ds.grid.N; ++i)
            for (std::int64_t j = 0; j <= ds.grid.M[0]; ++j)
                out << i << ',' << j << ',' << ds.grid.time_at(i) << ','
                    << ds.grid.space_at(0, j) << ',' << ds.at1(i, j) << '\n';
    } else {
        out << "i,j1,j2,t,y1,y2,value\n";
        for (std::int64_t i = 0; i <= ds.grid.N; ++i)
            for (std::int64_t j = 0; j <= ds.grid.M[0]; ++j)
                for (std::int64_t k = 0; k <= ds.grid.M[1]; ++k)
                    out << i << ',' << j << ',' << k << ','
                        << ds.grid.time_at(i) << ',' << ds.grid.space_at(0, j)
                        << ',' << ds.grid.space_at(1, k) << ','
                        << ds.at2(i, j, k) << '\n';
    }
    if (!out) throw FormatError("export_dataset_csv: write failed for " + path);
}

}  // namespace spdecpt
