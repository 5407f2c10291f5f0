#include "srpband/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "srpband/errors.hpp"

namespace srpband {

namespace {

std::uint32_t read_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint16_t read_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void put_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(static_cast<std::uint8_t>(x));
    v.push_back(static_cast<std::uint8_t>(x >> 8));
    v.push_back(static_cast<std::uint8_t>(x >> 16));
    v.push_back(static_cast<std::uint8_t>(x >> 24));
}

void put_u16(std::vector<std::uint8_t>& v, std::uint16_t x) {
    v.push_back(static_cast<std::uint8_t>(x));
    v.push_back(static_cast<std::uint8_t>(x >> 8));
}

void put_tag(std::vector<std::uint8_t>& v, const char* tag) {
    v.insert(v.end(), tag, tag + 4);
}

} // namespace

Signal read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open WAV file: " + path);
    std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
    if (raw.size() < 12 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
        std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
        throw IoError("not a RIFF/WAVE file: " + path);

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const std::uint8_t* data = nullptr;
    std::size_t data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= raw.size()) {
        const std::uint32_t chunk_len = read_u32(raw.data() + pos + 4);
        const std::uint8_t* body = raw.data() + pos + 8;
        if (pos + 8 + chunk_len > raw.size()) throw IoError("truncated WAV chunk: " + path);
        if (std::memcmp(raw.data() + pos, "fmt ", 4) == 0) {
            if (chunk_len < 16) throw IoError("malformed fmt chunk: " + path);
            format = read_u16(body);
            channels = read_u16(body + 2);
            rate = read_u32(body + 4);
            bits = read_u16(body + 14);
        } else if (std::memcmp(raw.data() + pos, "data", 4) == 0) {
            data = body;
            data_len = chunk_len;
        }
        pos += 8 + chunk_len + (chunk_len & 1); // chunks are word-aligned
    }

    if (rate == 0 || channels == 0) throw IoError("missing fmt chunk: " + path);
    if (data == nullptr || data_len == 0) throw IoError("missing data chunk: " + path);

    Signal sig;
    sig.sample_rate = static_cast<double>(rate);
    const std::size_t stride = channels;
    if (format == 1 && bits == 16) {
        const std::size_t frames = data_len / (2 * stride);
        sig.samples.reserve(frames);
        for (std::size_t f = 0; f < frames; ++f) {
            std::int16_t s;
            std::memcpy(&s, data + 2 * stride * f, 2);
            sig.samples.push_back(static_cast<double>(s) / 32768.0);
        }
    } else if (format == 3 && bits == 32) {
        const std::size_t frames = data_len / (4 * stride);
        sig.samples.reserve(frames);
        for (std::size_t f = 0; f < frames; ++f) {
            float s;
            std::memcpy(&s, data + 4 * stride * f, 4);
            sig.samples.push_back(static_cast<double>(s));
        }
    } else {
        throw IoError("unsupported WAV encoding (want PCM16 or float32): " + path);
    }
    if (sig.samples.empty()) throw IoError("WAV holds no samples: " + path);
    return sig;
}

void write_wav_float32(const std::string& path, const Signal& signal) {
    signal.validate();
    const auto n = static_cast<std::uint32_t>(signal.samples.size());
    const std::uint32_t rate = static_cast<std::uint32_t>(signal.sample_rate);

    std::vector<std::uint8_t> out;
    out.reserve(44 + 4 * n);
    put_tag(out, "RIFF");
    put_u32(out, 36 + 4 * n);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, 3); // IEEE float
    put_u16(out, 1); // mono
    put_u32(out, rate);
    put_u32(out, rate * 4);
    put_u16(out, 4);
    put_u16(out, 32);
    put_tag(out, "data");
    put_u32(out, 4 * n);
    for (double s : signal.samples) {
        const float f = static_cast<float>(s);
        std::uint32_t bitsrep;
        std::memcpy(&bitsrep, &f, 4);
        put_u32(out, bitsrep);
    }

    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open output file: " + path);
    file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!file) throw IoError("failed writing WAV: " + path);
}

} // namespace srpband
