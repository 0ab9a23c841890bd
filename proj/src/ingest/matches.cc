#include "mdepose/ingest/matches.h"

#include <cstdio>
#include <json.hpp>

#include "mdepose/util/bytes.h"
#include "mdepose/util/error.h"

namespace mdepose::ingest {

namespace {

using nlohmann::json;

std::string describe_bytes(std::string_view bytes) {
    std::string hex, text;
    for (unsigned char c : bytes) {
        char buf[4];
        std::snprintf(buf, sizeof(buf), "%02x", c);
        if (!hex.empty())
            hex += ' ';
        hex += buf;
        text += (c >= 0x20 && c < 0x7f) ? static_cast<char>(c) : '.';
    }
    return "'" + text + "' (" + hex + ")";
}

void names_from_path(const std::filesystem::path &path, MatchFile &m) {
    const std::string stem = path.stem().string();
    const auto sep = stem.find("__");
    if (sep == std::string::npos)
        return;
    auto restore = [](std::string s) {
        for (char &c : s)
            if (c == '#')
                c = '/';
        return s;
    };
    m.name1 = restore(stem.substr(0, sep));
    m.name2 = restore(stem.substr(sep + 2));
}

MatchFile read_d2pm(const std::string &data, const std::string &source) {
    ByteReader r(data, source);
    const auto magic = r.read_bytes(4);
    if (magic != "D2PM")
        throw FormatError(source, FormatError::ByteOffset{0}, "bad magic " + describe_bytes(magic) + ", expected 'D2PM'");
    const auto version = r.read<std::uint16_t>();
    if (version != kMatchFormatVersion)
        throw Error(ErrorCode::kVersionError,
                    source + ": match format version " + std::to_string(version) + ", supported 1");
    const auto count = r.read<std::uint32_t>();
    if (count > r.remaining() / 16)
        throw FormatError(r.source(), FormatError::ByteOffset{r.offset() + r.remaining()},
                          "match count " + std::to_string(count) + " exceeds file size");
    MatchFile m;
    m.kp1.resize(count);
    m.kp2.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        m.kp1[i].x() = r.read<float>();
        m.kp1[i].y() = r.read<float>();
        m.kp2[i].x() = r.read<float>();
        m.kp2[i].y() = r.read<float>();
    }
    const std::size_t conf_at = r.offset();
    const auto conf_count = r.read<std::uint32_t>();
    if (conf_count != kAbsentConfidence) {
        if (conf_count != count)
            throw FormatError(source, FormatError::ByteOffset{conf_at},
                              "confidence count " + std::to_string(conf_count) + " != match count " +
                                  std::to_string(count));
        std::vector<double> conf(count);
        for (auto &c : conf)
            c = r.read<float>();
        m.confidence = std::move(conf);
    }
    if (!r.at_end())
        r.fail("trailing bytes");
    return m;
}

double json_float(const json &obj, const char *key, const std::string &source, std::size_t index) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number())
        throw FormatError(source, "pairs[" + std::to_string(index) + "] lacks numeric '" + key + "'");
    return static_cast<double>(static_cast<float>(it->get<double>()));
}

MatchFile read_json(const std::string &data, const std::string &source) {
    json doc;
    try {
        doc = json::parse(data);
    } catch (const json::parse_error &e) {
        throw FormatError(source, FormatError::ByteOffset{e.byte}, e.what());
    }
    if (!doc.is_object() || !doc.contains("pairs") || !doc["pairs"].is_array())
        throw FormatError(source, "expected an object with a 'pairs' array");
    const auto &arr = doc["pairs"];
    MatchFile m;
    std::vector<double> conf;
    std::size_t with_conf = 0;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto &p = arr[i];
        if (!p.is_object())
            throw FormatError(source, "pairs[" + std::to_string(i) + "] is not an object");
        m.kp1.emplace_back(json_float(p, "x1", source, i), json_float(p, "y1", source, i));
        m.kp2.emplace_back(json_float(p, "x2", source, i), json_float(p, "y2", source, i));
        if (p.contains("conf")) {
            conf.push_back(json_float(p, "conf", source, i));
            ++with_conf;
        }
    }
    if (with_conf != 0 && with_conf != arr.size())
        throw FormatError(source, "'conf' must be given for all pairs or none");
    if (with_conf != 0)
        m.confidence = std::move(conf);
    return m;
}

} // namespace

MatchFile read_matches(const std::filesystem::path &path) {
    const std::string data = read_file(path);
    MatchFile m = path.extension() == ".json" ? read_json(data, path.string()) : read_d2pm(data, path.string());
    names_from_path(path, m);
    return m;
}

void write_matches_d2pm(const MatchFile &m, const std::filesystem::path &path) {
    if (m.kp2.size() != m.kp1.size() || (m.confidence && m.confidence->size() != m.kp1.size()))
        throw Error(ErrorCode::kInvalidArgument, "match arrays have different lengths");
    ByteWriter w;
    w.write_bytes("D2PM");
    w.write<std::uint16_t>(kMatchFormatVersion);
    w.write<std::uint32_t>(static_cast<std::uint32_t>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i) {
        w.write<float>(static_cast<float>(m.kp1[i].x()));
        w.write<float>(static_cast<float>(m.kp1[i].y()));
        w.write<float>(static_cast<float>(m.kp2[i].x()));
        w.write<float>(static_cast<float>(m.kp2[i].y()));
    }
    if (m.confidence) {
        w.write<std::uint32_t>(static_cast<std::uint32_t>(m.size()));
        for (double c : *m.confidence)
            w.write<float>(static_cast<float>(c));
    } else {
        w.write<std::uint32_t>(kAbsentConfidence);
    }
    write_file(path, w.data());
}

void write_matches_json(const MatchFile &m, const std::filesystem::path &path) {
    if (m.kp2.size() != m.kp1.size() || (m.confidence && m.confidence->size() != m.kp1.size()))
        throw Error(ErrorCode::kInvalidArgument, "match arrays have different lengths");
    json arr = json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        json p = {{"x1", static_cast<double>(static_cast<float>(m.kp1[i].x()))},
                  {"y1", static_cast<double>(static_cast<float>(m.kp1[i].y()))},
                  {"x2", static_cast<double>(static_cast<float>(m.kp2[i].x()))},
                  {"y2", static_cast<double>(static_cast<float>(m.kp2[i].y()))}};
        if (m.confidence)
            p["conf"] = static_cast<double>(static_cast<float>((*m.confidence)[i]));
        arr.push_back(std::move(p));
    }
    write_file(path, json{{"pairs", std::move(arr)}}.dump() + "\n");
}

std::string pair_key(const std::string &name1, const std::string &name2) {
    auto flat = [](std::string s) {
        for (char &c : s)
            if (c == '/')
                c = '#';
        return s;
    };
    return flat(name1) + "__" + flat(name2);
}

} // namespace mdepose::ingest
