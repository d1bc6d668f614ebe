// SPDX-License-Identifier: Apache-2.0
#include "semimesh/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "semimesh/errors.hpp"

namespace semimesh::io {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
    return out;
}

void put_le32(std::string& buf, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) buf.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
}

std::uint32_t get_le32(std::string_view bytes, std::size_t offset) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + k])) << (8 * k);
    return v;
}

bool parse_int(std::string_view token, long long& out) {
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool parse_double(std::string_view token, double& out) {
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

std::uint8_t quantize(double v) {
    if (!(v > 0.0)) return 0;
    const double q = std::floor(v * 255.0 + 0.5);
    return static_cast<std::uint8_t>(std::min(q, 255.0));
}

struct Pnm {
    std::string magic;
    int width = 0;
    int height = 0;
    std::string_view pixels;
};

/// Parses a binary PNM header (with '#' comments) and returns a view of the raster bytes.
Pnm parse_pnm(std::string_view bytes, const std::filesystem::path& path) {
    std::size_t pos = 0;
    auto skip = [&] {
        while (pos < bytes.size()) {
            if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
                ++pos;
            } else if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    };
    auto token = [&] {
        skip();
        const std::size_t start = pos;
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])) && bytes[pos] != '#') ++pos;
        return bytes.substr(start, pos - start);
    };
    Pnm out;
    out.magic = std::string(token());
    if (out.magic != "P5" && out.magic != "P6")
        throw FormatError("'" + path.string() + "': unsupported image magic '" + out.magic + "' (expected P5 or P6)");
    long long w = 0, h = 0, maxval = 0;
    if (!parse_int(token(), w) || !parse_int(token(), h) || w < 1 || h < 1)
        throw FormatError("'" + path.string() + "': malformed image dimensions");
    if (!parse_int(token(), maxval) || maxval != 255)
        throw FormatError("'" + path.string() + "': unsupported maxval (only 255 is supported)");
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
        throw FormatError("'" + path.string() + "': missing whitespace after header");
    ++pos;
    out.width = static_cast<int>(w);
    out.height = static_cast<int>(h);
    const std::size_t expected = static_cast<std::size_t>(w) * h * (out.magic == "P6" ? 3 : 1);
    if (bytes.size() - pos < expected)
        throw FormatError("'" + path.string() + "': truncated raster, expected " + std::to_string(expected) +
                          " bytes, got " + std::to_string(bytes.size() - pos));
    out.pixels = bytes.substr(pos, expected);
    return out;
}

}  // namespace

void write_vox(const std::filesystem::path& path, const VoxelGrid& grid) {
    std::string buf = "VOXL " + std::to_string(grid.resolution()) + " " + std::to_string(grid.channels()) + "\n";
    buf.reserve(buf.size() + grid.values().size() * 4);
    for (double v : grid.values()) put_le32(buf, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    auto out = open_for_write(path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

VoxelGrid read_vox(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    const auto newline = bytes.find('\n');
    if (newline == std::string::npos || newline > 64)
        throw FormatError("'" + path.string() + "': missing VOXL header line");
    const auto header = split_ws(std::string_view(bytes).substr(0, newline));
    if (header.empty() || header[0] != "VOXL")
        throw FormatError("'" + path.string() + "': bad magic '" + (header.empty() ? "" : std::string(header[0])) +
                          "' (expected VOXL)");
    long long r = 0, c = 0;
    if (header.size() != 3 || !parse_int(header[1], r) || !parse_int(header[2], c) || r < 1 || c < 1 || r > 4096 ||
        c > 4096)
        throw FormatError("'" + path.string() + "': malformed VOXL header, expected 'VOXL <R> <C>' with positive values");
    const std::size_t count = static_cast<std::size_t>(c) * r * r * r;
    const std::size_t expected = count * 4;
    const std::size_t actual = bytes.size() - newline - 1;
    if (actual < expected)
        throw FormatError("'" + path.string() + "': truncated payload, expected " + std::to_string(expected) +
                          " bytes, got " + std::to_string(actual));
    if (actual > expected)
        throw FormatError("'" + path.string() + "': " + std::to_string(actual - expected) +
                          " unexpected trailing bytes after payload");
    std::vector<double> values(count);
    const std::string_view payload = std::string_view(bytes).substr(newline + 1);
    for (std::size_t i = 0; i < count; ++i) values[i] = std::bit_cast<float>(get_le32(payload, 4 * i));
    if (r < 2) throw FormatError("'" + path.string() + "': grid resolution must be >= 2");
    return VoxelGrid(static_cast<int>(r), static_cast<int>(c), std::move(values));
}

OccupancyGrid read_occupancy(const std::filesystem::path& path) {
    VoxelGrid grid = read_vox(path);
    if (grid.channels() != 1)
        throw FormatError("'" + path.string() + "': occupancy file must have 1 channel, found " +
                          std::to_string(grid.channels()));
    const auto v = grid.values();
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!(v[i] >= 0.0 && v[i] <= 1.0)) {
            const int r = grid.resolution();
            throw FormatError("'" + path.string() + "': occupancy value " + std::to_string(v[i]) +
                              " out of range [0,1] at cell index " + std::to_string(i) + " (x=" +
                              std::to_string(i % r) + ", y=" + std::to_string((i / r) % r) +
                              ", z=" + std::to_string(i / (static_cast<std::size_t>(r) * r)) + ")");
        }
    return OccupancyGrid(std::move(grid));
}

void write_obj(const std::filesystem::path& path, const TexturedMesh& mesh) {
    mesh.validate();
    std::string buf;
    char line[256];
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& v = mesh.vertices[i];
        int n;
        if (mesh.colors.empty()) {
            n = std::snprintf(line, sizeof line, "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
        } else {
            const auto& c = mesh.colors[i];
            n = std::snprintf(line, sizeof line, "v %.9g %.9g %.9g %.9g %.9g %.9g\n", v.x(), v.y(), v.z(), c.x(), c.y(),
                              c.z());
        }
        buf.append(line, n);
    }
    for (const auto& f : mesh.faces) {
        const int n = std::snprintf(line, sizeof line, "f %d %d %d\n", f[0] + 1, f[1] + 1, f[2] + 1);
        buf.append(line, n);
    }
    auto out = open_for_write(path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

TexturedMesh read_obj(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    TexturedMesh mesh;
    std::vector<std::size_t> face_lines;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    const std::string where = "'" + path.string() + "' line ";
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string_view line = std::string_view(text).substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (tok[0] == "v") {
            if (tok.size() != 4 && tok.size() != 7)
                throw FormatError(where + std::to_string(line_no) + ": vertex line needs 3 or 6 numbers");
            double vals[6] = {0, 0, 0, 0.5, 0.5, 0.5};
            for (std::size_t k = 1; k < tok.size(); ++k)
                if (!parse_double(tok[k], vals[k - 1]))
                    throw FormatError(where + std::to_string(line_no) + ": malformed number '" + std::string(tok[k]) + "'");
            mesh.vertices.emplace_back(vals[0], vals[1], vals[2]);
            mesh.colors.emplace_back(vals[3], vals[4], vals[5]);
        } else if (tok[0] == "f") {
            if (tok.size() < 4) throw FormatError(where + std::to_string(line_no) + ": face needs at least 3 indices");
            std::vector<int> idx;
            for (std::size_t k = 1; k < tok.size(); ++k) {
                const auto field = tok[k].substr(0, tok[k].find('/'));
                long long v = 0;
                if (!parse_int(field, v))
                    throw FormatError(where + std::to_string(line_no) + ": malformed face index '" +
                                      std::string(tok[k]) + "'");
                if (v < 1) throw FormatError(where + std::to_string(line_no) + ": face index must be >=1, got " +
                                             std::to_string(v));
                idx.push_back(static_cast<int>(v - 1));
            }
            for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
                const Face f{idx[0], idx[k], idx[k + 1]};
                if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
                    throw FormatError(where + std::to_string(line_no) + ": degenerate face (repeated index)");
                mesh.faces.push_back(f);
                face_lines.push_back(line_no);
            }
        }
        // Other records (vn, vt, o, g, s, usemtl, ...) carry nothing this mesh model uses.
    }
    for (std::size_t i = 0; i < mesh.faces.size(); ++i)
        for (int v : mesh.faces[i])
            if (v >= static_cast<int>(mesh.vertices.size()))
                throw FormatError(where + std::to_string(face_lines[i]) + ": face index " + std::to_string(v + 1) +
                                  " out of range (" + std::to_string(mesh.vertices.size()) + " vertices)");
    return mesh;
}

void write_image(const std::filesystem::path& path, const Image& image) {
    std::string buf = "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
    for (double v : image.values()) buf.push_back(static_cast<char>(quantize(v)));
    auto out = open_for_write(path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

void write_mask(const std::filesystem::path& path, const Mask& mask) {
    std::string buf = "P5\n" + std::to_string(mask.width()) + " " + std::to_string(mask.height()) + "\n255\n";
    for (double v : mask.values()) buf.push_back(static_cast<char>(quantize(v)));
    auto out = open_for_write(path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

Image read_image(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    const auto pnm = parse_pnm(bytes, path);
    if (pnm.magic != "P6")
        throw FormatError("'" + path.string() + "': type error, expected a P6 color image but found " + pnm.magic);
    Image img(pnm.width, pnm.height);
    auto v = img.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<unsigned char>(pnm.pixels[i]) / 255.0;
    return img;
}

Mask read_mask(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    const auto pnm = parse_pnm(bytes, path);
    if (pnm.magic != "P5")
        throw FormatError("'" + path.string() + "': type error, expected a P5 graymap mask but found " + pnm.magic);
    Mask mask(pnm.width, pnm.height);
    auto v = mask.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<unsigned char>(pnm.pixels[i]) / 255.0;
    return mask;
}

}  // namespace semimesh::io
