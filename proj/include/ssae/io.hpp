#ifndef SSAE_IO_HPP
#define SSAE_IO_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ssae/diagnostics.hpp"
#include "ssae/model.hpp"

namespace ssae::io {

// MatrixFile: "SSAEMAT1" | u32 dtype | u64 rows | u64 cols | column-major payload.
// All integers and values little-endian.
inline constexpr std::string_view kMatrixMagic = "SSAEMAT1";
inline constexpr std::string_view kCheckpointMagic = "SSAECKP1";
inline constexpr std::size_t kMatrixHeaderBytes = 28;
inline constexpr int kCheckpointVersion = 1;

enum class Dtype : std::uint32_t { f32 = 1, f64 = 2 };

ConceptDictionary read_concepts(const std::string& path);
void write_concepts(const std::string& path, const ConceptDictionary& dict);

/// JSON lines of {"id": ..., "concepts": [names]}; line order is column order.
RealizationSet read_realizations(const std::string& path, const ConceptDictionary& dict);
void write_realizations(const std::string& path, const RealizationSet& real,
                        const ConceptDictionary& dict);

std::string encode_matrix(const Matrix<double>& m, Dtype dtype = Dtype::f64);
/// Decodes one matrix block starting at `offset`, advancing it past the block.
Matrix<double> decode_matrix(std::string_view bytes, std::size_t& offset, const std::string& where);

Matrix<double> read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Matrix<double>& m, Dtype dtype = Dtype::f64);

struct Checkpoint {
    SsaeModel<double> model;
    ConceptDictionary concepts;
};

std::string encode_checkpoint(const SsaeModel<double>& model, const ConceptDictionary& concepts);
Checkpoint decode_checkpoint(std::string_view bytes, const std::string& where = "checkpoint");

void save_checkpoint(const std::string& path, const SsaeModel<double>& model,
                     const ConceptDictionary& concepts);
Checkpoint load_checkpoint(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

nlohmann::json to_json(const TrainReport& report);
nlohmann::json to_json(const Matrix<double>& m);  // array of rows
nlohmann::json to_json(const ReconErrors& errors, const ConceptDictionary& dict);

}  // namespace ssae::io

#endif  // SSAE_IO_HPP
