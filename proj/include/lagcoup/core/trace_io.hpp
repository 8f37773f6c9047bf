#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lagcoup/core/coupling.hpp"
#include "lagcoup/errors.hpp"

namespace lagcoup {

// Line-oriented trace format, one file per trace:
//   # lagcoup-trace v1 family=<name>
//   lag=<L> tau=<int|none> seed=<hex>
//   <t> <x_t enc> <y_t enc | ->
// State encodings are fixed per kernel family by the codec; doubles use
// shortest round-trip formatting so read(write(t)) reproduces states exactly.

inline void format_double(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

struct IntStateCodec {
    static constexpr const char* family = "discrete";
    static std::string encode(long s) { return std::to_string(s); }
    static long decode(const std::string& tok) { return std::stol(tok); }
};

struct VectorStateCodec {
    static constexpr const char* family = "vector";
    static std::string encode(const std::vector<double>& s) {
        std::string out;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) out.push_back(',');
            format_double(out, s[i]);
        }
        return out;
    }
    static std::vector<double> decode(const std::string& tok) {
        std::vector<double> s;
        std::size_t pos = 0;
        while (pos <= tok.size()) {
            const std::size_t next = tok.find(',', pos);
            const std::string piece = tok.substr(pos, next == std::string::npos ? next : next - pos);
            double v = 0.0;
            auto res = std::from_chars(piece.data(), piece.data() + piece.size(), v);
            if (res.ec != std::errc{}) throw std::runtime_error("bad vector token: " + piece);
            s.push_back(v);
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        return s;
    }
};

struct SpinStateCodec {
    static constexpr const char* family = "ising";
    static std::string encode(const std::vector<std::int8_t>& s) {
        std::string out;
        out.reserve(s.size());
        for (auto v : s) out.push_back(v > 0 ? '+' : '-');
        return out;
    }
    static std::vector<std::int8_t> decode(const std::string& tok) {
        std::vector<std::int8_t> s;
        s.reserve(tok.size());
        for (char c : tok) s.push_back(c == '+' ? std::int8_t{1} : std::int8_t{-1});
        return s;
    }
};

template <class Codec, class S>
void write_trace(std::ostream& os, const CoupledTrace<S>& trace, std::uint64_t seed) {
    os << "# lagcoup-trace v1 family=" << Codec::family << "\n";
    os << "lag=" << trace.lag << " tau=";
    if (trace.tau)
        os << *trace.tau;
    else
        os << "none";
    char hex[32];
    auto res = std::to_chars(hex, hex + sizeof(hex), seed, 16);
    os << " seed=0x" << std::string(hex, res.ptr) << "\n";
    for (long t = 0; t < trace.x_len(); ++t) {
        os << t << ' ' << Codec::encode(trace.x_path[static_cast<std::size_t>(t)]) << ' ';
        if (t < trace.y_len())
            os << Codec::encode(trace.y_path[static_cast<std::size_t>(t)]);
        else
            os << '-';
        os << "\n";
    }
}

template <class Codec, class S>
CoupledTrace<S> read_trace(std::istream& is, std::uint64_t* seed_out = nullptr) {
    CoupledTrace<S> trace;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# lagcoup-trace v1", 0) != 0)
        throw std::runtime_error("not a lagcoup trace file");
    if (!std::getline(is, line)) throw std::runtime_error("missing trace header");
    {
        std::istringstream hs(line);
        std::string tok;
        while (hs >> tok) {
            if (tok.rfind("lag=", 0) == 0) trace.lag = std::stol(tok.substr(4));
            else if (tok.rfind("tau=", 0) == 0) {
                const std::string v = tok.substr(4);
                if (v != "none") trace.tau = std::stol(v);
            } else if (tok.rfind("seed=0x", 0) == 0 && seed_out) {
                *seed_out = std::stoull(tok.substr(7), nullptr, 16);
            }
        }
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        long t = 0;
        std::string xs, ys;
        ls >> t >> xs >> ys;
        trace.x_path.push_back(Codec::decode(xs));
        if (ys != "-") trace.y_path.push_back(Codec::decode(ys));
    }
    return trace;
}

} // namespace lagcoup
