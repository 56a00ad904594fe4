#pragma once

#include <string>

#include "ultragen/atomic_measure.hpp"
#include "ultragen/coalsim.hpp"
#include "ultragen/matrix_space.hpp"
#include "ultragen/merge_tree.hpp"
#include "ultragen/profile_path.hpp"

namespace ultragen {

inline constexpr const char* kSchemaTag = "ultragen/1";

// JSON interchange (schema "ultragen/1"). Serialization is deterministic:
// children appear in canonical order. Importers ignore unknown fields.
std::string tree_to_json(const MergeTree& t);
MergeTree tree_from_json(const std::string& text);

std::string path_to_json(const ProfilePath& p);
ProfilePath path_from_json(const std::string& text);

std::string measure_to_json(const AtomicMeasure1D& m);
AtomicMeasure1D measure_from_json(const std::string& text);

std::string partition_to_json(const PartitionPath& p);
PartitionPath partition_from_json(const std::string& text);

// CSV matrix form: first row labels, body distances, last row masses.
std::string matrix_to_csv(const UltrametricMatrixSpace& m);
UltrametricMatrixSpace matrix_from_csv(const std::string& text);

// One row per plateau: h_lo, h_hi (inf on the last row), then the profile
// entries zero-padded to a common width.
std::string path_plateaus_csv(const ProfilePath& p);

std::string experiment_rows_csv(const ConvergenceExperimentReport& r);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace ultragen
