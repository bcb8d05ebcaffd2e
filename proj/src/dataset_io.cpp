#include "cck/dataset_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace cck {

namespace {
constexpr char kMagic[8] = {'C', 'C', 'K', 'B', 'I', 'N', '1', '\n'};
}

const MatrixXd& BinaryContainer::array(const std::string& name) const {
  for (const auto& [n, m] : arrays) {
    if (n == name) return m;
  }
  throw std::runtime_error("container missing array: " + name);
}

void write_container(const std::string& path, const BinaryContainer& c) {
  nlohmann::json header = c.header;
  header["arrays"] = nlohmann::json::array();
  for (const auto& [name, m] : c.arrays) {
    header["arrays"].push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  }
  const std::string hs = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kMagic, sizeof kMagic);
  const std::uint64_t len = hs.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const auto& [name, m] : c.arrays) {
    // stored row-major
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    out.write(reinterpret_cast<const char*>(rm.data()),
              static_cast<std::streamsize>(sizeof(double) * rm.size()));
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

BinaryContainer read_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw std::runtime_error("bad container magic: " + path);
  }
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  std::string hs(len, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(len));
  BinaryContainer c;
  c.header = nlohmann::json::parse(hs);
  for (const auto& a : c.header.at("arrays")) {
    const long rows = a.at("rows"), cols = a.at("cols");
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
    in.read(reinterpret_cast<char*>(rm.data()),
            static_cast<std::streamsize>(sizeof(double) * rows * cols));
    if (!in) throw std::runtime_error("truncated container: " + path);
    c.arrays.emplace_back(a.at("name"), MatrixXd(rm));
  }
  c.header.erase("arrays");
  return c;
}

nlohmann::json dictionary_header(const Dictionary& dict) {
  nlohmann::json j;
  j["plant_id"] = dict.schema.id;
  j["state_dim"] = dict.schema.state_dim;
  j["input_dim"] = dict.schema.input_dim;
  j["actuator_idx"] = dict.schema.actuator_idx;
  j["actuator_offset_idx"] = dict.schema.actuator_offset_idx;
  j["plant_idx"] = dict.schema.plant_idx;
  j["state_names"] = dict.schema.state_names;
  j["include_plant_state"] = dict.include_plant_state;
  j["features"] = nlohmann::json::array();
  for (const auto& f : dict.schema.rbf_features) {
    nlohmann::json jf;
    jf["kind"] = static_cast<int>(f.kind);
    for (const auto& [idx, coef] : f.terms) jf["terms"].push_back({idx, coef});
    j["features"].push_back(jf);
  }
  j["hash"] = dict.hash();
  return j;
}

void append_dictionary_arrays(const Dictionary& dict, BinaryContainer& c) {
  c.arrays.emplace_back("dict_centers", dict.centers);
  c.arrays.emplace_back("dict_widths", MatrixXd(dict.widths));
}

Dictionary dictionary_from_container(const nlohmann::json& j, const BinaryContainer& c) {
  PlantSchema schema;
  schema.id = j.at("plant_id");
  schema.state_dim = j.at("state_dim");
  schema.input_dim = j.at("input_dim");
  schema.actuator_idx = j.at("actuator_idx").get<std::vector<int>>();
  if (j.contains("actuator_offset_idx")) {
    schema.actuator_offset_idx = j.at("actuator_offset_idx").get<std::vector<int>>();
  }
  schema.plant_idx = j.at("plant_idx").get<std::vector<int>>();
  schema.state_names = j.at("state_names").get<std::vector<std::string>>();
  for (const auto& jf : j.at("features")) {
    Feature f;
    f.kind = static_cast<Feature::Kind>(jf.at("kind").get<int>());
    if (jf.contains("terms")) {
      for (const auto& t : jf.at("terms")) f.terms.emplace_back(t[0], t[1]);
    }
    schema.rbf_features.push_back(f);
  }
  Dictionary dict;
  dict.schema = schema;
  dict.include_plant_state = j.at("include_plant_state");
  dict.centers = c.array("dict_centers");
  dict.widths = VectorXd(c.array("dict_widths").col(0));
  if (dict.hash() != j.at("hash").get<std::uint64_t>()) {
    throw std::runtime_error("dictionary hash mismatch");
  }
  return dict;
}

void save_dataset(const std::string& path, const SnapshotDataset& ds,
                  const Dictionary& dict) {
  BinaryContainer c;
  c.header["kind"] = "dataset";
  c.header["plant_id"] = ds.plant_id;
  c.header["dt"] = ds.dt;
  c.header["seed"] = ds.seed;
  c.header["dict_hash"] = ds.dict_hash;
  c.header["empty"] = ds.empty_flag;
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [mode, n] : ds.mode_histogram) hist[std::to_string(mode)] = n;
  c.header["mode_histogram"] = hist;
  c.header["dictionary"] = dictionary_header(dict);
  append_dictionary_arrays(dict, c);
  c.arrays.emplace_back("x0", ds.x0);
  c.arrays.emplace_back("x1", ds.x1);
  c.arrays.emplace_back("u", ds.u);
  c.arrays.emplace_back("z0", ds.z0);
  c.arrays.emplace_back("z1", ds.z1);
  MatrixXd ti(1, ds.traj_index.size());
  for (std::size_t i = 0; i < ds.traj_index.size(); ++i) ti(0, i) = ds.traj_index[i];
  c.arrays.emplace_back("traj_index", ti);
  write_container(path, c);
}

SnapshotDataset load_dataset(const std::string& path, Dictionary& dict) {
  BinaryContainer c = read_container(path);
  if (c.header.at("kind") != "dataset") throw std::runtime_error("not a dataset: " + path);
  dict = dictionary_from_container(c.header.at("dictionary"), c);
  SnapshotDataset ds;
  ds.plant_id = c.header.at("plant_id");
  ds.dt = c.header.at("dt");
  ds.seed = c.header.at("seed");
  ds.dict_hash = c.header.at("dict_hash");
  ds.empty_flag = c.header.at("empty");
  for (auto& [key, n] : c.header.at("mode_histogram").items()) {
    ds.mode_histogram[std::stoi(key)] = n.get<long>();
  }
  ds.x0 = c.array("x0");
  ds.x1 = c.array("x1");
  ds.u = c.array("u");
  ds.z0 = c.array("z0");
  ds.z1 = c.array("z1");
  const MatrixXd& ti = c.array("traj_index");
  ds.traj_index.resize(ti.cols());
  for (long i = 0; i < ti.cols(); ++i) ds.traj_index[i] = static_cast<int>(ti(0, i));
  if (ds.dict_hash != dict.hash()) throw std::runtime_error("dataset/dictionary hash mismatch");
  return ds;
}

}  // namespace cck
