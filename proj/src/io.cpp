#include "ssae/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>

namespace ssae::io {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::string& out, T value) {
    static_assert(std::is_integral_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xffu));
}

template <typename T>
T get_le(std::string_view bytes, std::size_t offset) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
    return static_cast<T>(v);
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw DataError(where + ": " + what);
}

nlohmann::json parse_json(const std::string& text, const std::string& where) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(where, std::string("malformed JSON (") + e.what() + ")");
    }
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open for reading");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(path + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError(path + ": write failed");
}

ConceptDictionary read_concepts(const std::string& path) {
    const auto j = parse_json(read_file(path), path);
    if (!j.is_array()) fail(path, "concept file must be a JSON array of strings");
    if (j.empty()) fail(path, "concept list is empty");
    std::vector<std::string> names;
    for (const auto& e : j) {
        if (!e.is_string()) fail(path, "concept entries must be strings");
        names.push_back(e.get<std::string>());
    }
    try {
        return ConceptDictionary(std::move(names));
    } catch (const DataError& e) {
        fail(path, e.what());
    }
}

void write_concepts(const std::string& path, const ConceptDictionary& dict) {
    write_file(path, nlohmann::json(dict.names()).dump(2) + "\n");
}

RealizationSet read_realizations(const std::string& path, const ConceptDictionary& dict) {
    const std::string text = read_file(path);
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }

    std::vector<std::string> ids;
    std::vector<ConceptSet> sets;
    std::set<std::string> seen_ids;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const std::string where = path + ":" + std::to_string(ln + 1);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(lines[ln]);
        } catch (const nlohmann::json::parse_error&) {
            fail(where, "malformed line");
        }
        if (!j.is_object() || !j.contains("id") || !j.contains("concepts") || !j["id"].is_string() ||
            !j["concepts"].is_array())
            fail(where, "expected {\"id\": string, \"concepts\": [names]}");
        std::string id = j["id"].get<std::string>();
        if (!seen_ids.insert(id).second) fail(where, "duplicate sample id '" + id + "'");
        ConceptSet s;
        for (const auto& c : j["concepts"]) {
            if (!c.is_string()) fail(where, "concept names must be strings");
            const std::string name = c.get<std::string>();
            if (!dict.contains(name)) fail(where, "unknown concept '" + name + "'");
            const Index k = dict.index_of(name);
            if (std::find(s.begin(), s.end(), k) != s.end())
                fail(where, "concept '" + name + "' listed twice");
            s.push_back(k);
        }
        ids.push_back(std::move(id));
        sets.push_back(std::move(s));
    }
    if (ids.empty()) fail(path, "no samples");
    return RealizationSet(std::move(ids), std::move(sets));
}

void write_realizations(const std::string& path, const RealizationSet& real,
                        const ConceptDictionary& dict) {
    validate_realizations(SparseDesign(1, dict.size()), real);
    std::string out;
    for (Index i = 0; i < real.size(); ++i) {
        nlohmann::json j;
        j["id"] = real.sample_ids[static_cast<std::size_t>(i)];
        j["concepts"] = nlohmann::json::array();
        for (Index k : real.set(i)) j["concepts"].push_back(dict.name(k));
        out += j.dump() + "\n";
    }
    write_file(path, out);
}

std::string encode_matrix(const Matrix<double>& m, Dtype dtype) {
    std::string out(kMatrixMagic);
    put_le(out, static_cast<std::uint32_t>(dtype));
    put_le(out, static_cast<std::uint64_t>(m.rows()));
    put_le(out, static_cast<std::uint64_t>(m.cols()));
    const Index count = m.size();
    for (Index i = 0; i < count; ++i) {
        if (dtype == Dtype::f64)
            put_le(out, std::bit_cast<std::uint64_t>(m.data()[i]));
        else
            put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(m.data()[i])));
    }
    return out;
}

Matrix<double> decode_matrix(std::string_view bytes, std::size_t& offset, const std::string& where) {
    if (bytes.size() - offset < kMatrixHeaderBytes) fail(where, "truncated matrix header");
    if (bytes.substr(offset, 8) != kMatrixMagic) fail(where, "bad matrix magic");
    const auto dtype = get_le<std::uint32_t>(bytes, offset + 8);
    const auto rows = get_le<std::uint64_t>(bytes, offset + 12);
    const auto cols = get_le<std::uint64_t>(bytes, offset + 20);
    if (dtype != 1 && dtype != 2) fail(where, "unknown dtype code " + std::to_string(dtype));
    const std::uint64_t width = dtype == 1 ? 4 : 8;
    constexpr auto kMax = static_cast<std::uint64_t>(std::numeric_limits<Index>::max());
    if (rows > kMax || cols > kMax || (cols != 0 && rows > kMax / cols) ||
        (rows * cols) > kMax / width)
        fail(where, "matrix dimensions overflow");
    const std::uint64_t payload = rows * cols * width;
    offset += kMatrixHeaderBytes;
    if (bytes.size() - offset < payload)
        fail(where, "truncated payload: need " + std::to_string(payload) + " bytes, have " +
                        std::to_string(bytes.size() - offset));
    Matrix<double> m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (Index i = 0; i < m.size(); ++i) {
        const std::size_t at = offset + static_cast<std::size_t>(i) * width;
        m.data()[i] = dtype == 2 ? std::bit_cast<double>(get_le<std::uint64_t>(bytes, at))
                                 : double(std::bit_cast<float>(get_le<std::uint32_t>(bytes, at)));
    }
    offset += payload;
    if (!m.allFinite()) fail(where, "matrix holds non-finite values");
    return m;
}

Matrix<double> read_matrix(const std::string& path) {
    const std::string bytes = read_file(path);
    std::size_t offset = 0;
    Matrix<double> m = decode_matrix(bytes, offset, path);
    if (offset != bytes.size())
        fail(path, std::to_string(bytes.size() - offset) + " trailing bytes after matrix");
    return m;
}

void write_matrix(const std::string& path, const Matrix<double>& m, Dtype dtype) {
    write_file(path, encode_matrix(m, dtype));
}

std::string encode_checkpoint(const SsaeModel<double>& model, const ConceptDictionary& concepts) {
    model.validate();
    if (concepts.size() != model.design.K)
        throw DataError("checkpoint: " + std::to_string(concepts.size()) + " concept names for K = " +
                        std::to_string(model.design.K));
    nlohmann::json meta;
    meta["version"] = kCheckpointVersion;
    meta["K"] = model.design.K;
    meta["d"] = model.design.d;
    meta["N"] = model.N;
    meta["activation"] = to_string(model.activation);
    meta["concepts"] = concepts.names();
    meta["row_layout"] = "k*d+j";
    meta["has_encoder"] = model.has_encoder();
    const std::string text = meta.dump();

    std::string out(kCheckpointMagic);
    put_le(out, static_cast<std::uint64_t>(text.size()));
    out += text;
    out += encode_matrix(model.w2);
    out += encode_matrix(model.yc);
    if (model.w1) out += encode_matrix(*model.w1);
    return out;
}

Checkpoint decode_checkpoint(std::string_view bytes, const std::string& where) {
    if (bytes.size() < 16) fail(where, "truncated checkpoint header");
    if (bytes.substr(0, 8) != kCheckpointMagic) fail(where, "bad checkpoint magic");
    const auto meta_len = get_le<std::uint64_t>(bytes, 8);
    if (meta_len > bytes.size() - 16) fail(where, "metadata length exceeds file size");
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(bytes.substr(16, meta_len));
    } catch (const nlohmann::json::parse_error&) {
        fail(where, "malformed checkpoint metadata");
    }

    Checkpoint ck;
    try {
        if (meta.at("version").get<int>() != kCheckpointVersion)
            fail(where, "unsupported checkpoint version " + meta.at("version").dump());
        if (meta.at("row_layout").get<std::string>() != "k*d+j")
            fail(where, "unsupported row layout " + meta.at("row_layout").dump());
        const auto k = meta.at("K").get<Index>();
        const auto d = meta.at("d").get<Index>();
        const auto n_dim = meta.at("N").get<Index>();
        const auto act = meta.at("activation").get<std::string>();
        const auto names = meta.at("concepts").get<std::vector<std::string>>();
        const bool has_encoder = meta.at("has_encoder").get<bool>();
        if (static_cast<Index>(names.size()) != k)
            fail(where, "metadata lists " + std::to_string(names.size()) + " concepts for K = " +
                            std::to_string(k));
        if (act != "relu" && act != "identity") fail(where, "unknown activation '" + act + "'");
        if (n_dim < 1) fail(where, "metadata N must be >= 1");
        ck.concepts = ConceptDictionary(names);
        ck.model.design = SparseDesign(d, k);
        ck.model.N = n_dim;
        ck.model.activation = act == "relu" ? Activation::relu : Activation::identity;

        std::size_t offset = 16 + static_cast<std::size_t>(meta_len);
        ck.model.w2 = decode_matrix(bytes, offset, where + " (W2)");
        ck.model.yc = decode_matrix(bytes, offset, where + " (Yc)");
        if (has_encoder) ck.model.w1 = decode_matrix(bytes, offset, where + " (W1)");
        if (offset != bytes.size())
            fail(where, std::to_string(bytes.size() - offset) + " trailing bytes after tensors");
        ck.model.validate();
    } catch (const nlohmann::json::exception& e) {
        fail(where, std::string("invalid checkpoint metadata (") + e.what() + ")");
    } catch (const DataError& e) {
        if (std::string_view(e.what()).starts_with(where)) throw;
        fail(where, e.what());
    }
    return ck;
}

void save_checkpoint(const std::string& path, const SsaeModel<double>& model,
                     const ConceptDictionary& concepts) {
    write_file(path, encode_checkpoint(model, concepts));
}

Checkpoint load_checkpoint(const std::string& path) {
    return decode_checkpoint(read_file(path), path);
}

nlohmann::json to_json(const TrainReport& report) {
    nlohmann::json j;
    j["initial_loss"] = report.initial_loss;
    j["epoch_loss"] = report.epoch_loss;
    j["final_loss"] = report.epoch_loss.empty() ? report.initial_loss : report.epoch_loss.back();
    j["final_rmse"] = report.final_rmse;
    j["duration_seconds"] = report.duration_seconds;
    j["w2_norm"] = report.w2_norm;
    j["latent_norm"] = report.latent_norm;
    j["steps"] = report.steps;
    return j;
}

nlohmann::json to_json(const Matrix<double>& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json to_json(const ReconErrors& errors, const ConceptDictionary& dict) {
    nlohmann::json j;
    j["per_sample_rmse"] = errors.per_sample;
    j["per_group_rmse"] = nlohmann::json::array();
    for (const auto& g : errors.per_group) {
        nlohmann::json names = nlohmann::json::array();
        for (Index k : g.concepts) names.push_back(dict.name(k));
        j["per_group_rmse"].push_back({{"concepts", names}, {"members", g.members}, {"rmse", g.rmse}});
    }
    return j;
}

}  // namespace ssae::io
