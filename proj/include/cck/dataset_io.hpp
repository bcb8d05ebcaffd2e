#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cck/lifting.hpp"

namespace cck {

/// Binary container: magic, little-endian u64 header length, JSON header,
/// then row-major f64 payload arrays in header order. Round trips bit-exact.
struct BinaryContainer {
  nlohmann::json header;
  std::vector<std::pair<std::string, MatrixXd>> arrays;

  const MatrixXd& array(const std::string& name) const;
};

void write_container(const std::string& path, const BinaryContainer& c);
BinaryContainer read_container(const std::string& path);

nlohmann::json dictionary_header(const Dictionary& dict);
void append_dictionary_arrays(const Dictionary& dict, BinaryContainer& c);
Dictionary dictionary_from_container(const nlohmann::json& header,
                                     const BinaryContainer& c);

void save_dataset(const std::string& path, const SnapshotDataset& ds,
                  const Dictionary& dict);
/// Loads the dataset and its dictionary; checks the stored hash.
SnapshotDataset load_dataset(const std::string& path, Dictionary& dict);

}  // namespace cck
