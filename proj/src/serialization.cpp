#include "ptc/serialization.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace ptc {

namespace {

constexpr char kMagic[7] = {'P', 'T', 'M', 'P', 'O', '1', '\n'};

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

void write_complex(std::ostream& os, Complex c) {
    const double re = c.real(), im = c.imag();
    os.write(reinterpret_cast<const char*>(&re), sizeof re);
    os.write(reinterpret_cast<const char*>(&im), sizeof im);
}

Complex read_complex(std::istream& is) {
    double re = 0, im = 0;
    is.read(reinterpret_cast<char*>(&re), sizeof re);
    is.read(reinterpret_cast<char*>(&im), sizeof im);
    return {re, im};
}

}  // namespace

void save_ptmpo(const std::string& path, const ProcessTensor& pt) {
    pt.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_ptmpo: cannot open " + path);
    os.write(kMagic, sizeof kMagic);
    const std::uint8_t flags = 1;  // closures present
    os.write(reinterpret_cast<const char*>(&flags), 1);
    const Index n = pt.steps();
    write_u64(os, static_cast<std::uint64_t>(n));
    write_u64(os, static_cast<std::uint64_t>(pt.sys_dim));
    for (Index l = 0; l <= n; ++l) write_u64(os, static_cast<std::uint64_t>(pt.bond(l)));

    const Index liou = pt.sys_dim * pt.sys_dim;
    for (Index l = 1; l <= n; ++l) {
        const SiteTensor& t = pt.sites[l - 1];
        for (Index dout = 0; dout < t.bond_out; ++dout)
            for (Index din = 0; din < t.bond_in; ++din)
                for (Index a = 0; a < liou; ++a)
                    for (Index b = 0; b < liou; ++b)
                        write_complex(os, t.block(a, b)(dout, din));
    }
    for (Index l = 0; l <= n; ++l)
        for (Index k = 0; k < pt.bond(l); ++k) write_complex(os, pt.closures[l](k));
    if (!os) throw std::runtime_error("save_ptmpo: write failed for " + path);
}

ProcessTensor load_ptmpo(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_ptmpo: cannot open " + path);
    char magic[sizeof kMagic] = {};
    is.read(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error("load_ptmpo: bad magic in " + path);
    std::uint8_t flags = 0;
    is.read(reinterpret_cast<char*>(&flags), 1);
    const Index n = static_cast<Index>(read_u64(is));
    const Index d = static_cast<Index>(read_u64(is));
    std::vector<Index> bonds(n + 1);
    for (Index l = 0; l <= n; ++l) bonds[l] = static_cast<Index>(read_u64(is));

    ProcessTensor pt;
    pt.sys_dim = d;
    const Index liou = d * d;
    pt.sites.reserve(n);
    for (Index l = 1; l <= n; ++l) {
        SiteTensor t(liou, bonds[l], bonds[l - 1]);
        for (Index dout = 0; dout < t.bond_out; ++dout)
            for (Index din = 0; din < t.bond_in; ++din)
                for (Index a = 0; a < liou; ++a)
                    for (Index b = 0; b < liou; ++b)
                        t.block(a, b)(dout, din) = read_complex(is);
        pt.sites.push_back(std::move(t));
    }
    pt.closures.assign(n + 1, RowVector());
    for (Index l = 0; l <= n; ++l) {
        pt.closures[l] = RowVector::Zero(bonds[l]);
        if (flags & 1)
            for (Index k = 0; k < bonds[l]; ++k) pt.closures[l](k) = read_complex(is);
        else if (bonds[l] == 1)
            pt.closures[l](0) = 1.0;
    }
    if (!is) throw std::runtime_error("load_ptmpo: truncated file " + path);
    pt.validate();
    return pt;
}

}  // namespace ptc
