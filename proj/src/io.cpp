#include "rilab/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace rilab {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0; // drop the sign of negative zero
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
    std::string out = "\"";
    for (char c : f) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << csv_field(fields[i]);
    }
    out_ << '\n';
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << '\n'; }

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, at_line_start = true, skipping = false, any = false;
    char c;
    auto end_row = [&]() {
        row.push_back(field);
        rows.push_back(row);
        row.clear();
        field.clear();
        at_line_start = true;
        any = false;
    };
    while (in.get(c)) {
        if (skipping) {
            if (c == '\n') {
                skipping = false;
                at_line_start = true;
            }
            continue;
        }
        if (at_line_start && !quoted && c == '#') {
            skipping = true;
            continue;
        }
        at_line_start = false;
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get(c);
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        any = true;
        if (c == '"') quoted = true;
        else if (c == ',') {
            row.push_back(field);
            field.clear();
        } else if (c == '\r') {
            continue;
        } else if (c == '\n') {
            end_row();
        } else {
            field += c;
        }
    }
    if (quoted) throw IoError("unterminated quoted CSV field");
    if (any || !row.empty() || !field.empty()) end_row();
    return rows;
}

namespace {

void put_u64(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out += static_cast<char>((v >> (8 * b)) & 0xff);
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
    return v;
}

void put_double(std::string& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }

double parse_number(const std::string& s, const char* what) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && *first == ' ') ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) throw IoError(std::string("malformed ") + what + " '" + s + "'");
    return v;
}

Index parse_index(const std::string& s, const char* what) {
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 0)
        throw IoError(std::string("malformed ") + what + " '" + s + "'");
    return static_cast<Index>(v);
}

} // namespace

void write_matrix_binary(const std::filesystem::path& path, const CMatrix& m, EnsembleKind kind) {
    std::string buf(kMatrixMagic, 8);
    put_u64(buf, static_cast<std::uint64_t>(m.rows()));
    put_u64(buf, static_cast<std::uint64_t>(m.cols()));
    put_u64(buf, static_cast<std::uint64_t>(kind));
    buf.reserve(buf.size() + static_cast<std::size_t>(m.size()) * 16);
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) {
            put_double(buf, m(i, j).real());
            put_double(buf, m(i, j).imag());
        }
    write_file_atomic(path, buf);
}

StoredMatrix read_matrix_binary(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    if (data.size() < 32) throw HeaderMismatchError(path.string() + ": file shorter than the 32-byte header");
    if (std::memcmp(data.data(), kMatrixMagic, 8) != 0) throw HeaderMismatchError(path.string() + ": bad magic");
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    const std::uint64_t rows = get_u64(p + 8), cols = get_u64(p + 16), kind = get_u64(p + 24);
    if (kind > 3) throw HeaderMismatchError(path.string() + ": unknown ensemble kind " + std::to_string(kind));
    if (rows != 0 && cols > (data.size() - 32) / 16 / rows + 1)
        throw HeaderMismatchError(path.string() + ": header dimensions exceed the payload");
    const std::uint64_t expected = 32 + rows * cols * 16;
    if (data.size() != expected)
        throw HeaderMismatchError(path.string() + ": header says " + std::to_string(rows) + "x" + std::to_string(cols) +
                                  " (" + std::to_string(expected) + " bytes) but the file has " +
                                  std::to_string(data.size()) + " bytes");
    StoredMatrix out;
    out.kind = static_cast<EnsembleKind>(kind);
    out.matrix.resize(static_cast<Index>(rows), static_cast<Index>(cols));
    const unsigned char* q = p + 32;
    for (Index i = 0; i < out.matrix.rows(); ++i)
        for (Index j = 0; j < out.matrix.cols(); ++j, q += 16)
            out.matrix(i, j) = Complex(std::bit_cast<double>(get_u64(q)), std::bit_cast<double>(get_u64(q + 8)));
    return out;
}

void write_matrix_csv(std::ostream& out, const CMatrix& m) {
    CsvWriter w(out);
    w.row({"row", "col", "re", "im"});
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            w.row({std::to_string(i), std::to_string(j), format_double(m(i, j).real()), format_double(m(i, j).imag())});
}

CMatrix read_matrix_csv(std::istream& in) {
    const auto rows = read_csv(in);
    if (rows.empty() || rows[0] != std::vector<std::string>{"row", "col", "re", "im"})
        throw IoError("matrix CSV must start with the header row,col,re,im");
    Index nr = 0, nc = 0;
    std::vector<std::tuple<Index, Index, Complex>> entries;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (rows[k].size() != 4) throw IoError("matrix CSV line " + std::to_string(k + 1) + " needs 4 fields");
        const Index i = parse_index(rows[k][0], "row"), j = parse_index(rows[k][1], "col");
        entries.emplace_back(i, j, Complex(parse_number(rows[k][2], "re"), parse_number(rows[k][3], "im")));
        nr = std::max(nr, i + 1);
        nc = std::max(nc, j + 1);
    }
    CMatrix m = CMatrix::Zero(nr, nc);
    for (const auto& [i, j, v] : entries) m(i, j) = v;
    return m;
}

void write_vector_csv(std::ostream& out, const CVector& v) {
    CsvWriter w(out);
    w.row({"index", "re", "im"});
    for (Index j = 0; j < v.size(); ++j)
        w.row({std::to_string(j), format_double(v(j).real()), format_double(v(j).imag())});
}

CVector read_vector_csv(std::istream& in) {
    const auto rows = read_csv(in);
    if (rows.empty() || rows[0] != std::vector<std::string>{"index", "re", "im"})
        throw IoError("vector CSV must start with the header index,re,im");
    std::map<Index, Complex> values;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (rows[k].size() != 3) throw IoError("vector CSV line " + std::to_string(k + 1) + " needs 3 fields");
        values[parse_index(rows[k][0], "index")] = Complex(parse_number(rows[k][1], "re"), parse_number(rows[k][2], "im"));
    }
    const Index n = values.empty() ? 0 : values.rbegin()->first + 1;
    if (static_cast<Index>(values.size()) != n) throw IoError("vector CSV indices must cover 0..n-1");
    CVector v(n);
    for (const auto& [j, z] : values) v(j) = z;
    return v;
}

namespace {

std::string pgm_token(std::istream& in) {
    std::string tok;
    char c;
    while (in.get(c)) {
        if (c == '#') {
            std::string rest;
            std::getline(in, rest);
            if (!tok.empty()) break;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) break;
            continue;
        }
        tok += c;
    }
    return tok;
}

int pgm_int(std::istream& in, const char* what) {
    const std::string t = pgm_token(in);
    int v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ImageError(std::string("graymap: malformed ") + what);
    return v;
}

} // namespace

GrayImage parse_pgm(std::istream& in) {
    const std::string magic = pgm_token(in);
    if (magic != "P2" && magic != "P5") throw ImageError("graymap: expected P2 or P5 magic, got '" + magic + "'");
    GrayImage img;
    img.width = pgm_int(in, "width");
    img.height = pgm_int(in, "height");
    const int maxval = pgm_int(in, "maxval");
    if (img.width <= 0 || img.height <= 0) throw ImageError("graymap: empty image");
    if (maxval <= 0 || maxval > 65535) throw ImageError("graymap: maxval out of range");
    const std::size_t count = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
    img.pixels.resize(count);
    if (magic == "P2") {
        for (std::size_t k = 0; k < count; ++k) {
            const int v = pgm_int(in, "pixel");
            if (v < 0 || v > maxval) throw ImageError("graymap: pixel exceeds maxval");
            img.pixels[k] = static_cast<double>(v) / maxval;
        }
    } else {
        const int bytes = maxval < 256 ? 1 : 2;
        std::vector<unsigned char> raw(count * static_cast<std::size_t>(bytes));
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw ImageError("graymap: truncated raster");
        for (std::size_t k = 0; k < count; ++k) {
            const int v = bytes == 1 ? raw[k] : (raw[2 * k] << 8) | raw[2 * k + 1];
            if (v > maxval) throw ImageError("graymap: pixel exceeds maxval");
            img.pixels[k] = static_cast<double>(v) / maxval;
        }
    }
    return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageError("cannot open graymap " + path.string());
    return parse_pgm(in);
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img, double lo, double hi,
               const std::string& comment) {
    if (img.width <= 0 || img.height <= 0) throw ImageError("cannot write an empty graymap");
    std::string out = "P5\n";
    if (!comment.empty()) out += "# " + comment + "\n";
    out += std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    const double span = hi > lo ? hi - lo : 1.0;
    for (double v : img.pixels) {
        const double t = std::clamp((v - lo) / span, 0.0, 1.0);
        out += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t)));
    }
    write_file_atomic(path, out);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace rilab
