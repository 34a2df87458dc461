#include "phasecon/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace phasecon {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string points_and_labels(const Constellation& c) {
    std::string s = "\"points\":[";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ',';
        s += '[' + format_double(c.point(i).real()) + ',' +
             format_double(c.point(i).imag()) + ']';
    }
    s += "],\"labels\":[";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(c.label(i));
    }
    s += ']';
    return s;
}

[[noreturn]] void malformed(const std::string& what) {
    throw Error(Errc::format_error, "malformed constellation file: " + what);
}

}  // namespace

std::string to_json(const Constellation& c, const std::optional<ConstellationMeta>& meta) {
    std::string s = "{\"version\":\"";
    s += kSchemaVersion;
    s += "\",\"m\":" + std::to_string(c.bits_per_symbol()) + ',';
    s += points_and_labels(c);
    if (meta) {
        s += ",\"meta\":{\"objective\":" + json(meta->objective).dump() +
             ",\"snr_db\":" + format_double(meta->snr_db) +
             ",\"pnsd_deg\":" + format_double(meta->pnsd_deg) +
             ",\"seed\":" + std::to_string(meta->seed) + '}';
    }
    s += "}\n";
    return s;
}

ConstellationFile from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        malformed(e.what());
    }
    if (!doc.is_object()) malformed("top level is not an object");
    if (doc.contains("version") &&
        (!doc["version"].is_string() || doc["version"] != kSchemaVersion)) {
        malformed("unsupported version");
    }
    if (!doc.contains("m") || !doc["m"].is_number_integer()) malformed("missing integer 'm'");
    if (!doc.contains("points") || !doc["points"].is_array()) malformed("missing 'points'");
    if (!doc.contains("labels") || !doc["labels"].is_array()) malformed("missing 'labels'");

    std::vector<cplx> points;
    for (const auto& p : doc["points"]) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            malformed("each point must be [re, im]");
        }
        points.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    std::vector<std::uint32_t> labels;
    for (const auto& l : doc["labels"]) {
        if (!l.is_number_integer() || l.get<long long>() < 0 || l.get<long long>() > 0xffffffffLL) {
            malformed("labels must be non-negative 32-bit integers");
        }
        labels.push_back(l.get<std::uint32_t>());
    }
    const long long m = doc["m"].get<long long>();
    if (m < 1 || m > 30 || points.size() != (std::size_t{1} << m)) {
        malformed("'m' does not match the number of points");
    }

    ConstellationFile out{Constellation::make(std::move(points), std::move(labels)), std::nullopt};
    if (doc.contains("meta")) {
        const auto& jm = doc["meta"];
        if (!jm.is_object()) malformed("'meta' is not an object");
        ConstellationMeta meta;
        try {
            meta.objective = jm.value("objective", std::string("AMI"));
            meta.snr_db = jm.value("snr_db", 0.0);
            meta.pnsd_deg = jm.value("pnsd_deg", 0.0);
            meta.seed = jm.value("seed", std::uint64_t{0});
        } catch (const json::exception& e) {
            malformed(e.what());
        }
        if (meta.objective != "AMI" && meta.objective != "PAMI") malformed("unknown objective");
        out.meta = meta;
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::format_error, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::format_error, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(Errc::format_error, "write failed for " + path.string());
}

ConstellationFile read_constellation(const std::filesystem::path& path) {
    return from_json(read_text_file(path));
}

void write_constellation(const std::filesystem::path& path, const Constellation& c,
                         const std::optional<ConstellationMeta>& meta) {
    write_text_file(path, to_json(c, meta));
}

std::string fingerprint(const Constellation& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : points_and_labels(c)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace phasecon
