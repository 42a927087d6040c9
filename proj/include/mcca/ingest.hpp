#pragma once

#include <filesystem>
#include <string>

#include "mcca/covariance.hpp"

namespace mcca {

enum class ChannelHandling { Keep, GrayscaleAverage };

/// Dataset description, read from a JSON manifest file:
///
///   {
///     "version": 1,
///     "root": ".",               // optional, default: manifest directory
///     "downsample": 1,           // optional block-mean pooling factor
///     "channels": "keep",        // or "grayscale-average"
///     "groups": [ {"label": "g0", "files": ["g0/*.mctn"]}, ... ]
///   }
///
/// File entries may contain '*' wildcards in the filename component;
/// matches are sorted lexicographically. Supported sample formats by
/// extension: .mctn (native), .pgm/.ppm/.pnm (binary PNM), .idx/*-ubyte
/// (IDX, yielding one sample per image).
struct DatasetManifest {
    std::filesystem::path root;
    std::size_t downsample_factor = 1;
    ChannelHandling channels = ChannelHandling::Keep;
    struct Group {
        std::string label;
        std::vector<std::string> patterns;
    };
    std::vector<Group> groups;
};

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// IDX container (big-endian): magic 0x00000803 style (u8 payload, first
/// dimension = image count). Each image becomes one tensor.
std::vector<DenseTensor> load_idx(const std::filesystem::path& path);

/// Binary PGM (P5) -> (rows, cols); binary PPM (P6) -> (rows, cols, 3).
/// Byte values map to reals verbatim; maxval must be <= 255.
DenseTensor load_pnm(const std::filesystem::path& path);

/// factor x factor mean pooling over the first two modes; trailing
/// rows/cols that do not fill a block are truncated.
DenseTensor downsample(const DenseTensor& t, std::size_t factor);

GroupedDataset assemble(const DatasetManifest& manifest);

} // namespace mcca
