#include "l2v/tensor_store.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include "l2v/error.hpp"

namespace l2v::store {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t remaining() const { return bytes_.size() - pos_; }

    void need(std::size_t count, std::string_view field) const {
        if (remaining() < count) {
            fail(ErrorKind::format, "truncated header: " + std::string(field) + " needs " +
                                        std::to_string(count) + " bytes, " +
                                        std::to_string(remaining()) + " left");
        }
    }

    std::uint32_t u32(std::string_view field) {
        need(4, field);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_ + i]} << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64(std::string_view field) {
        need(8, field);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
        pos_ += 8;
        return v;
    }

    std::span<const std::uint8_t> take(std::size_t count, std::string_view field) {
        need(count, field);
        auto out = bytes_.subspan(pos_, count);
        pos_ += count;
        return out;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::size_t element_count(const std::vector<std::uint64_t>& dims) {
    std::uint64_t count = 1;
    for (auto dim : dims) {
        if (dim == 0) fail(ErrorKind::format, "tensor dimension of size 0");
        if (count > std::numeric_limits<std::uint64_t>::max() / dim) {
            fail(ErrorKind::format, "tensor dimensions overflow");
        }
        count *= dim;
    }
    return static_cast<std::size_t>(count);
}

}  // namespace

std::size_t dtype_width(DType dtype) {
    switch (dtype) {
        case DType::f64: return 8;
        case DType::f32: return 4;
    }
    fail(ErrorKind::format, "unsupported dtype_code " + std::to_string(static_cast<std::uint32_t>(dtype)));
}

std::string_view to_string(Role role) {
    switch (role) {
        case Role::positive: return "positive";
        case Role::negative: return "negative";
        case Role::direction: return "direction";
        case Role::pattern: return "pattern";
    }
    return "positive";
}

Role role_from_string(std::string_view name) {
    if (name == "positive") return Role::positive;
    if (name == "negative") return Role::negative;
    if (name == "direction") return Role::direction;
    if (name == "pattern") return Role::pattern;
    fail(ErrorKind::format, "unknown role tag '" + std::string(name) + "'");
}

std::vector<std::uint8_t> encode(const TensorFile& file) {
    if (file.dims.empty() || file.dims.size() > 2) {
        fail(ErrorKind::format, "rank must be 1 or 2, got " + std::to_string(file.dims.size()));
    }
    const std::size_t count = element_count(file.dims);
    if (count != file.values.size()) {
        fail(ErrorKind::dimension, "payload holds " + std::to_string(file.values.size()) +
                                       " values but dims imply " + std::to_string(count));
    }
    if (!file.meta.is_object()) fail(ErrorKind::format, "metadata must be a JSON object");
    const std::string meta = file.meta.dump();
    const std::size_t width = dtype_width(file.dtype);

    std::vector<std::uint8_t> out;
    out.reserve(24 + 8 * file.dims.size() + meta.size() + count * width);
    out.insert(out.end(), kMagic.begin(), kMagic.end());
    put_u32(out, kVersion);
    put_u32(out, file.rank());
    for (auto dim : file.dims) put_u64(out, dim);
    put_u32(out, static_cast<std::uint32_t>(file.dtype));
    put_u32(out, static_cast<std::uint32_t>(meta.size()));
    out.insert(out.end(), meta.begin(), meta.end());

    for (std::size_t i = 0; i < count; ++i) {
        const double v = file.values[i];
        if (file.dtype == DType::f64) {
            put_u64(out, std::bit_cast<std::uint64_t>(v));
        } else {
            const float f = static_cast<float>(v);
            if (!std::isfinite(f)) {
                fail(ErrorKind::format, "value at flat index " + std::to_string(i) +
                                            " overflows binary32");
            }
            put_u32(out, std::bit_cast<std::uint32_t>(f));
        }
    }
    return out;
}

TensorFile decode(std::span<const std::uint8_t> bytes) {
    Reader in(bytes);
    auto magic = in.take(4, "magic");
    if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
        fail(ErrorKind::format, "bad magic: expected \"LVT1\"");
    }
    const auto version = in.u32("version");
    if (version != kVersion) {
        fail(ErrorKind::format, "unsupported version " + std::to_string(version));
    }
    const auto rank = in.u32("rank");
    if (rank != 1 && rank != 2) {
        fail(ErrorKind::format, "rank must be 1 or 2, got " + std::to_string(rank));
    }
    TensorFile file;
    for (std::uint32_t i = 0; i < rank; ++i) file.dims.push_back(in.u64("dims"));
    const std::size_t count = element_count(file.dims);

    const auto code = in.u32("dtype_code");
    if (code > 1) fail(ErrorKind::format, "unsupported dtype_code " + std::to_string(code));
    file.dtype = static_cast<DType>(code);
    const std::size_t width = dtype_width(file.dtype);

    const auto meta_len = in.u32("meta_len");
    auto meta = in.take(meta_len, "meta");
    try {
        file.meta = nlohmann::json::parse(meta.begin(), meta.end());
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::format, std::string("malformed meta JSON: ") + e.what());
    }
    if (!file.meta.is_object()) fail(ErrorKind::format, "meta JSON is not an object");

    if (count > std::numeric_limits<std::size_t>::max() / width ||
        in.remaining() != count * width) {
        fail(ErrorKind::format, "payload length mismatch: expected " +
                                    std::to_string(count * width) + " bytes, found " +
                                    std::to_string(in.remaining()));
    }
    auto payload = in.take(count * width, "payload");
    file.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto* p = payload.data() + i * width;
        if (file.dtype == DType::f64) {
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b) bits |= std::uint64_t{p[b]} << (8 * b);
            file.values[i] = std::bit_cast<double>(bits);
        } else {
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b) bits |= std::uint32_t{p[b]} << (8 * b);
            file.values[i] = static_cast<double>(std::bit_cast<float>(bits));
        }
    }
    return file;
}

TensorFile read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) fail(ErrorKind::io, "read failure on " + path.string());
    try {
        return decode(bytes);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.message());
    }
}

void write_file(const std::filesystem::path& path, const TensorFile& file) {
    const auto bytes = encode(file);
    // Write beside the target and rename so readers never see a partial file.
    auto tmp = path;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::io, "cannot open " + tmp.string() + " for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            fail(ErrorKind::io, "write failure on " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorKind::io, "cannot move output into place at " + path.string());
    }
}

void require_finite(const Matrix& m, std::string_view what) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (!std::isfinite(m(r, c))) {
                fail(ErrorKind::format, std::string(what) + ": non-finite value at (row " +
                                            std::to_string(r) + ", col " + std::to_string(c) + ")");
            }
        }
    }
}

TensorFile to_file(const ActivationMatrix& matrix, DType precision) {
    if (matrix.n() == 0 || matrix.d() == 0) fail(ErrorKind::dimension, "empty activation matrix");
    require_finite(matrix.values, "write_tensor");
    TensorFile file;
    file.dims = {matrix.n(), matrix.d()};
    file.dtype = precision;
    file.meta = {{"model", matrix.source_tag},
                 {"layer", matrix.layer},
                 {"prompt_set", matrix.prompt_set},
                 {"role", to_string(matrix.role)}};
    file.values = matrix.values.data();
    return file;
}

ActivationMatrix from_file(const TensorFile& file) {
    ActivationMatrix m;
    const std::size_t rows = file.rank() == 1 ? 1 : static_cast<std::size_t>(file.dims[0]);
    const std::size_t cols = static_cast<std::size_t>(file.dims.back());
    m.values = Matrix(rows, cols, file.values);
    require_finite(m.values, "read_tensor");
    const auto& meta = file.meta;
    if (auto it = meta.find("role"); it != meta.end() && it->is_string()) {
        m.role = role_from_string(it->get<std::string>());
    } else if (file.rank() == 1) {
        m.role = Role::pattern;
    }
    if (auto it = meta.find("layer"); it != meta.end() && it->is_number_integer()) {
        m.layer = it->get<int>();
    }
    if (auto it = meta.find("model"); it != meta.end() && it->is_string()) {
        m.source_tag = it->get<std::string>();
    }
    if (auto it = meta.find("prompt_set"); it != meta.end() && it->is_string()) {
        m.prompt_set = it->get<std::string>();
    }
    return m;
}

void write_tensor(const std::filesystem::path& path, const ActivationMatrix& matrix, DType precision) {
    write_file(path, to_file(matrix, precision));
}

ActivationMatrix read_tensor(const std::filesystem::path& path) {
    const auto file = read_file(path);
    try {
        return from_file(file);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.message());
    }
}

}  // namespace l2v::store
