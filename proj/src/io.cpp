#include "tmnn/io.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace tmnn {

namespace {

constexpr char kMagic[4] = {'C', 'T', 'N', '3'};
constexpr std::uint8_t kVersion = 1;

void put_u64(std::ostream& os, std::uint64_t v) {
    std::array<unsigned char, 8> b;
    for (int k = 0; k < 8; ++k) b[size_t(k)] = (unsigned char)(v >> (8 * k));
    os.write(reinterpret_cast<const char*>(b.data()), 8);
}

void put_f64(std::ostream& os, double v) {
    static_assert(sizeof(double) == 8);
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(os, bits);
}

bool get_bytes(std::istream& is, void* dst, size_t n) {
    is.read(static_cast<char*>(dst), std::streamsize(n));
    return size_t(is.gcount()) == n;
}

std::uint64_t decode_u64(const unsigned char* b) {
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= std::uint64_t(b[k]) << (8 * k);
    return v;
}

}  // namespace

void save_tensor(const std::string& path, const ComplexTensor3& x) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw TensorIoError("save_tensor: cannot open " + path + " for writing");
    os.write(kMagic, 4);
    os.put(char(kVersion));
    put_u64(os, std::uint64_t(x.n1()));
    put_u64(os, std::uint64_t(x.n2()));
    put_u64(os, std::uint64_t(x.n3()));
    for (Index k = 0; k < x.size(); ++k) {
        put_f64(os, x.data()[k].real());
        put_f64(os, x.data()[k].imag());
    }
    os.flush();
    if (!os) throw TensorIoError("save_tensor: write failed for " + path);
}

ComplexTensor3 load_tensor(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw TensorIoError("load_tensor: cannot open " + path);

    char magic[4];
    if (!get_bytes(is, magic, 4) )
        throw CorruptFileError("load_tensor: " + path + ": file ends inside the magic bytes");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw BadMagicError("load_tensor: " + path + ": not a CTN3 tensor file");

    unsigned char version;
    if (!get_bytes(is, &version, 1))
        throw CorruptFileError("load_tensor: " + path + ": file ends before the version byte");
    if (version != kVersion)
        throw UnsupportedVersionError("load_tensor: " + path + ": unsupported CTN3 version " +
                                      std::to_string(int(version)));

    unsigned char hdr[24];
    if (!get_bytes(is, hdr, 24))
        throw CorruptFileError("load_tensor: " + path + ": file ends inside the shape header");
    const std::uint64_t n1 = decode_u64(hdr), n2 = decode_u64(hdr + 8), n3 = decode_u64(hdr + 16);
    // Refuse absurd shapes before allocating: each dim below 2^22 and at
    // most 2^28 entries (4 GiB payload).
    constexpr std::uint64_t dim_cap = std::uint64_t(1) << 22;
    constexpr std::uint64_t total_cap = std::uint64_t(1) << 28;
    if (n1 == 0 || n2 == 0 || n3 == 0 || n1 > dim_cap || n2 > dim_cap || n3 > dim_cap ||
        n1 * n2 > total_cap / n3)
        throw CorruptFileError("load_tensor: " + path + ": implausible shape header");

    ComplexTensor3 x(static_cast<Index>(n1), static_cast<Index>(n2), static_cast<Index>(n3));
    for (Index k = 0; k < x.size(); ++k) {
        unsigned char pair[16];
        if (!get_bytes(is, pair, 16))
            throw CorruptFileError("load_tensor: " + path + ": payload truncated at entry " +
                                   std::to_string(k));
        std::uint64_t re = decode_u64(pair), im = decode_u64(pair + 8);
        double red, imd;
        std::memcpy(&red, &re, 8);
        std::memcpy(&imd, &im, 8);
        x.data()[k] = Complex(red, imd);
    }
    char extra;
    if (is.read(&extra, 1), is.gcount() != 0)
        throw CorruptFileError("load_tensor: " + path + ": trailing bytes after payload");
    return x;
}

void save_mask(const std::string& path, const SamplingMask& mask) {
    save_tensor(path, mask.to_tensor());
}

SamplingMask load_mask(const std::string& path) {
    return SamplingMask::from_tensor(load_tensor(path));
}

void write_pgm(const std::string& path, const RealMatrix& image) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw TensorIoError("write_pgm: cannot open " + path + " for writing");
    os << "P5\n" << image.cols() << " " << image.rows() << "\n255\n";
    for (Index r = 0; r < image.rows(); ++r)
        for (Index c = 0; c < image.cols(); ++c) {
            const double v = std::min(255.0, std::max(0.0, image(r, c)));
            os.put(char((unsigned char)std::lround(v)));
        }
    os.flush();
    if (!os) throw TensorIoError("write_pgm: write failed for " + path);
}

RealMatrix quantize_for_pgm(const RealMatrix& image, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("quantize_for_pgm: scale must be positive");
    RealMatrix out(image.rows(), image.cols());
    for (Index c = 0; c < image.cols(); ++c)
        for (Index r = 0; r < image.rows(); ++r)
            out(r, c) = std::round(255.0 * image(r, c) / scale);
    return out;
}

}  // namespace tmnn
