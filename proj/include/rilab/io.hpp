#pragma once

#include "rilab/core.hpp"
#include "rilab/sensing.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rilab {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// RFC-4180 field quoting: fields holding a comma, quote, CR or LF are quoted, quotes doubled.
std::string csv_field(const std::string& field);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}
    void row(const std::vector<std::string>& fields);
    /// Comment line starting with '#', used for provenance ahead of the header row.
    void comment(const std::string& text);

private:
    std::ostream& out_;
};

/// Parses one CSV document into rows of fields; lines starting with '#' are skipped.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

// Sensing-matrix binary: 32-byte header (8-byte magic, u64 rows, u64 cols, u64 kind), then
// rows*cols interleaved (re, im) little-endian doubles in row-major order.
inline constexpr char kMatrixMagic[8] = {'R', 'I', 'L', 'A', 'B', 'M', 'A', 'T'};

struct StoredMatrix {
    CMatrix matrix;
    EnsembleKind kind = EnsembleKind::PointParaxial;
};

void write_matrix_binary(const std::filesystem::path& path, const CMatrix& matrix, EnsembleKind kind);
/// Throws IoError when unreadable and HeaderMismatchError when the magic or the payload size
/// disagrees with the header.
StoredMatrix read_matrix_binary(const std::filesystem::path& path);

void write_matrix_csv(std::ostream& out, const CMatrix& matrix);
/// Columns row,col,re,im.
CMatrix read_matrix_csv(std::istream& in);

/// Columns index,re,im with 0-based indices.
void write_vector_csv(std::ostream& out, const CVector& v);
CVector read_vector_csv(std::istream& in);

/// Reads plain (P2) or raw (P5) portable graymaps; pixel values scaled to [0, 1] by maxval.
GrayImage read_pgm(const std::filesystem::path& path);
GrayImage parse_pgm(std::istream& in);
/// Writes a raw (P5) graymap with maxval 255; values are mapped linearly from [lo, hi] and
/// a non-empty comment becomes a '#' line in the header.
void write_pgm(const std::filesystem::path& path, const GrayImage& image, double lo = 0.0, double hi = 1.0,
               const std::string& comment = {});

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

} // namespace rilab
