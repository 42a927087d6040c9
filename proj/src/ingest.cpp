#include "mcca/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>

#include <json.hpp>

#include "mcca/errors.hpp"
#include "mcca/serialize.hpp"

namespace mcca {

namespace fs = std::filesystem;

DatasetManifest read_manifest(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot open manifest: " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("manifest parse error: " + std::string(e.what()));
    }

    DatasetManifest m;
    if (j.value("version", 1) != 1) throw InvalidInput("manifest: unsupported version");
    m.root = j.contains("root") ? fs::path(j["root"].get<std::string>()) : fs::path(".");
    if (m.root.is_relative()) m.root = path.parent_path() / m.root;
    m.downsample_factor = j.value("downsample", 1u);
    if (m.downsample_factor == 0) throw InvalidInput("manifest: downsample factor must be >= 1");
    const std::string ch = j.value("channels", "keep");
    if (ch == "keep")
        m.channels = ChannelHandling::Keep;
    else if (ch == "grayscale-average")
        m.channels = ChannelHandling::GrayscaleAverage;
    else
        throw InvalidInput("manifest: unknown channel handling: " + ch);

    if (!j.contains("groups") || !j["groups"].is_array() || j["groups"].empty())
        throw InvalidInput("manifest: needs at least one group");
    for (const auto& jg : j["groups"]) {
        DatasetManifest::Group g;
        g.label = jg.value("label", "");
        if (!jg.contains("files") || !jg["files"].is_array() || jg["files"].empty())
            throw InvalidInput("manifest: every group needs at least one file entry");
        for (const auto& f : jg["files"]) g.patterns.push_back(f.get<std::string>());
        m.groups.push_back(std::move(g));
    }
    return m;
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest) {
    nlohmann::json j;
    j["version"] = 1;
    j["root"] = ".";
    j["downsample"] = manifest.downsample_factor;
    j["channels"] =
        manifest.channels == ChannelHandling::Keep ? "keep" : "grayscale-average";
    j["groups"] = nlohmann::json::array();
    for (const auto& g : manifest.groups)
        j["groups"].push_back({{"label", g.label}, {"files", g.patterns}});
    std::ofstream os(path);
    if (!os) throw InvalidInput("cannot write manifest: " + path.string());
    os << j.dump(2) << '\n';
}

namespace {

std::uint32_t read_be32(std::istream& is, const char* what) {
    unsigned char buf[4];
    if (!is.read(reinterpret_cast<char*>(buf), 4))
        throw InvalidInput(std::string("truncated IDX header: ") + what);
    return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
           (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

} // namespace

std::vector<DenseTensor> load_idx(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput("cannot open IDX file: " + path.string());

    const std::uint32_t magic = read_be32(is, "magic");
    if ((magic & 0xFFFF0000u) != 0) throw InvalidInput("IDX: bad magic");
    const std::uint32_t dtype = (magic >> 8) & 0xFF;
    const std::uint32_t ndims = magic & 0xFF;
    if (dtype != 0x08) throw InvalidInput("IDX: unsupported element type");
    if (ndims < 2) throw InvalidInput("IDX: need at least 2 dimensions");

    const std::uint32_t count = read_be32(is, "count");
    std::vector<std::size_t> shape(ndims - 1);
    for (auto& e : shape) {
        e = read_be32(is, "dimension");
        if (e == 0) throw InvalidInput("IDX: zero extent");
    }

    const std::size_t per_sample = shape_product(shape);
    std::vector<unsigned char> raw(per_sample);
    std::vector<DenseTensor> out;
    out.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        if (!is.read(reinterpret_cast<char*>(raw.data()),
                     static_cast<std::streamsize>(per_sample)))
            throw InvalidInput("IDX: truncated payload");
        DenseTensor t(shape);
        // IDX rasters are row-major (last index fastest); transpose into
        // the first-index-fastest layout.
        std::vector<std::size_t> idx(shape.size(), 0);
        for (std::size_t off = 0; off < per_sample; ++off) {
            t.at(idx) = static_cast<double>(raw[off]);
            for (std::size_t d = shape.size(); d-- > 0;) {
                if (++idx[d] < shape[d]) break;
                idx[d] = 0;
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

namespace {

// Next PNM header token, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& is) {
    std::string tok;
    int c;
    while ((c = is.get()) != EOF) {
        if (c == '#') {
            while ((c = is.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) throw InvalidInput("PNM: malformed header");
    return tok;
}

std::size_t pnm_number(std::istream& is, const char* what) {
    const std::string tok = pnm_token(is);
    for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw InvalidInput(std::string("PNM: bad ") + what + ": " + tok);
    return static_cast<std::size_t>(std::stoull(tok));
}

} // namespace

DenseTensor load_pnm(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput("cannot open PNM file: " + path.string());

    char magic[2];
    if (!is.read(magic, 2) || magic[0] != 'P')
        throw InvalidInput("PNM: malformed header");
    const bool color = magic[1] == '6';
    if (!color && magic[1] != '5')
        throw InvalidInput(std::string("PNM: unsupported variant P") + magic[1]);

    const std::size_t width = pnm_number(is, "width");
    const std::size_t height = pnm_number(is, "height");
    const std::size_t maxval = pnm_number(is, "maxval");
    if (width == 0 || height == 0) throw InvalidInput("PNM: zero dimension");
    if (maxval == 0 || maxval > 255) throw InvalidInput("PNM: unsupported maxval");
    // single whitespace byte after maxval already consumed by tokenizer

    const std::size_t channels = color ? 3 : 1;
    std::vector<unsigned char> raw(width * height * channels);
    if (!is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
        throw InvalidInput("PNM: truncated raster");

    std::vector<std::size_t> shape = color
                                         ? std::vector<std::size_t>{height, width, 3}
                                         : std::vector<std::size_t>{height, width};
    DenseTensor t(shape);
    for (std::size_t r = 0; r < height; ++r)
        for (std::size_t c = 0; c < width; ++c)
            for (std::size_t ch = 0; ch < channels; ++ch) {
                const double v = static_cast<double>(raw[(r * width + c) * channels + ch]);
                if (color)
                    t.at({r, c, ch}) = v;
                else
                    t.at({r, c}) = v;
            }
    return t;
}

DenseTensor downsample(const DenseTensor& t, std::size_t factor) {
    if (factor == 0) throw InvalidInput("downsample: factor must be >= 1");
    if (factor == 1) return t;
    if (t.order() < 2) throw InvalidInput("downsample: tensor needs at least 2 modes");
    if (factor > t.shape[0] || factor > t.shape[1])
        throw InvalidInput("downsample: factor larger than extent");

    std::vector<std::size_t> out_shape = t.shape;
    out_shape[0] = t.shape[0] / factor;
    out_shape[1] = t.shape[1] / factor;
    DenseTensor out(out_shape);

    const double inv = 1.0 / static_cast<double>(factor * factor);
    std::vector<std::size_t> idx(t.order(), 0);
    std::vector<std::size_t> src(t.order(), 0);
    const std::size_t total = out.size();
    for (std::size_t off = 0; off < total; ++off) {
        src = idx;
        double sum = 0.0;
        for (std::size_t dr = 0; dr < factor; ++dr)
            for (std::size_t dc = 0; dc < factor; ++dc) {
                src[0] = idx[0] * factor + dr;
                src[1] = idx[1] * factor + dc;
                sum += t.at(src);
            }
        out.data[out.offset(idx)] = sum * inv;
        for (std::size_t d = 0; d < idx.size(); ++d) {
            if (++idx[d] < out_shape[d]) break;
            idx[d] = 0;
        }
    }
    return out;
}

namespace {

bool wildcard_match(const std::string& pattern, const std::string& name) {
    // '*' matches any run of characters; no other metacharacters.
    std::size_t p = 0, n = 0, star = std::string::npos, mark = 0;
    while (n < name.size()) {
        if (p < pattern.size() && (pattern[p] == name[n])) {
            ++p;
            ++n;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = n;
        } else if (star != std::string::npos) {
            p = star + 1;
            n = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

std::vector<fs::path> expand_pattern(const fs::path& root, const std::string& pattern) {
    const fs::path full = root / pattern;
    if (pattern.find('*') == std::string::npos) {
        if (!fs::exists(full)) throw InvalidInput("missing file: " + full.string());
        return {full};
    }
    const fs::path dir = full.parent_path();
    const std::string name_pattern = full.filename().string();
    if (!fs::is_directory(dir)) throw InvalidInput("missing directory: " + dir.string());
    std::vector<fs::path> matches;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && wildcard_match(name_pattern, entry.path().filename().string()))
            matches.push_back(entry.path());
    std::sort(matches.begin(), matches.end(),
              [](const fs::path& a, const fs::path& b) { return a.string() < b.string(); });
    if (matches.empty()) throw InvalidInput("pattern matched no files: " + full.string());
    return matches;
}

std::vector<DenseTensor> load_samples(const fs::path& file) {
    const std::string name = file.filename().string();
    const std::string ext = file.extension().string();
    if (ext == ".mctn") return {read_tensor(file)};
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return {load_pnm(file)};
    if (ext == ".idx" || (name.size() > 6 && name.compare(name.size() - 6, 6, "-ubyte") == 0))
        return load_idx(file);
    throw InvalidInput("unsupported sample format: " + file.string());
}

DenseTensor grayscale_average(const DenseTensor& t) {
    if (t.order() != 3) return t;
    const std::size_t channels = t.shape[2];
    std::vector<std::size_t> shape{t.shape[0], t.shape[1]};
    DenseTensor out(shape);
    const double inv = 1.0 / static_cast<double>(channels);
    for (std::size_t c = 0; c < t.shape[1]; ++c)
        for (std::size_t r = 0; r < t.shape[0]; ++r) {
            double sum = 0.0;
            for (std::size_t ch = 0; ch < channels; ++ch) sum += t.at({r, c, ch});
            out.at({r, c}) = sum * inv;
        }
    return out;
}

} // namespace

GroupedDataset assemble(const DatasetManifest& manifest) {
    if (manifest.groups.empty()) throw InvalidInput("manifest: no groups");
    GroupedDataset data;
    data.groups.reserve(manifest.groups.size());
    for (const auto& group : manifest.groups) {
        std::vector<fs::path> files;
        for (const auto& pattern : group.patterns) {
            auto matched = expand_pattern(manifest.root, pattern);
            files.insert(files.end(), matched.begin(), matched.end());
        }
        std::vector<DenseTensor> samples;
        for (const auto& file : files)
            for (auto& t : load_samples(file)) {
                DenseTensor sample = std::move(t);
                if (manifest.channels == ChannelHandling::GrayscaleAverage)
                    sample = grayscale_average(sample);
                if (manifest.downsample_factor > 1)
                    sample = downsample(sample, manifest.downsample_factor);
                samples.push_back(std::move(sample));
            }
        if (samples.empty())
            throw InvalidInput("group has no samples: " + group.label);
        data.groups.push_back(std::move(samples));
    }
    data.validate(); // catches shape mismatches across samples
    return data;
}

} // namespace mcca
