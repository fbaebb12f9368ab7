#include "silt/pgm.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace silt {

namespace {

[[noreturn]] void fail(const std::string& path, std::streamoff offset, const std::string& why) {
    std::ostringstream os;
    os << path << ": " << why << " (byte offset " << offset << ")";
    throw Error(os.str());
}

// Skips whitespace and '#' comment lines between header tokens.
void skip_separators(std::istream& in) {
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (c != EOF && std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

long read_header_int(std::istream& in, const std::string& path, const std::string& what) {
    skip_separators(in);
    const std::streamoff at = in.tellg();
    long v = -1;
    if (!(in >> v) || v < 0) fail(path, at, "expected non-negative integer for " + what);
    return v;
}

}  // namespace

GrayMap load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(path + ": cannot open for reading");

    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in || m0 != 'P' || (m1 != '2' && m1 != '5')) {
        fail(path, 0, std::string("unsupported magic number '") + m0 + m1 + "', want P2 or P5");
    }
    const bool binary = (m1 == '5');

    const long w = read_header_int(in, path, "width");
    const long h = read_header_int(in, path, "height");
    const long maxval = read_header_int(in, path, "maxval");
    if (w < 1 || h < 1) fail(path, in.tellg(), "dimensions must be at least 1x1");
    if (maxval < 1 || maxval > 65535) fail(path, in.tellg(), "maxval out of range [1,65535]");

    GrayMap map(static_cast<int>(w), static_cast<int>(h));
    const std::size_t n = map.size();

    if (binary) {
        // Exactly one whitespace byte separates the header from the payload.
        if (in.get() == EOF) fail(path, in.tellg(), "missing payload");
        const int bytes_per = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> buf(n * bytes_per);
        const std::streamoff payload_at = in.tellg();
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
            fail(path, payload_at + in.gcount(), "truncated payload");
        }
        for (std::size_t i = 0; i < n; ++i) {
            long raw = bytes_per == 1 ? buf[i] : (buf[2 * i] << 8 | buf[2 * i + 1]);  // big-endian
            if (raw > maxval) fail(path, payload_at + static_cast<std::streamoff>(i * bytes_per),
                                   "sample exceeds maxval");
            map.values[i] = static_cast<double>(raw) / static_cast<double>(maxval);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            skip_separators(in);
            const std::streamoff at = in.tellg();
            long raw = -1;
            if (!(in >> raw) || raw < 0) fail(path, at, "truncated payload");
            if (raw > maxval) fail(path, at, "sample exceeds maxval");
            map.values[i] = static_cast<double>(raw) / static_cast<double>(maxval);
        }
    }
    return map;
}

namespace {

void write_p5(const std::vector<unsigned char>& bytes, int w, int h, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(path + ": cannot open for writing");
    out << "P5\n" << w << " " << h << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(path + ": write failed");
}

}  // namespace

void save_pgm(const GrayMap& map, const std::string& path) {
    std::vector<unsigned char> bytes(map.size());
    for (std::size_t i = 0; i < map.size(); ++i) {
        const double v = clamp(map.values[i], 0.0, 1.0);
        bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    write_p5(bytes, map.width, map.height, path);
}

void save_pgm(const BinaryMask& mask, const std::string& path) {
    std::vector<unsigned char> bytes(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        bytes[i] = mask.values[i] ? 255 : 0;
    }
    write_p5(bytes, mask.width, mask.height, path);
}

BinaryMask load_mask(const std::string& path) {
    return binarize(load_pgm(path), 0.5);
}

}  // namespace silt
