#include "kelm/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "kelm/error.hpp"

namespace kelm {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  return json{{"rows", m.rows()},
              {"cols", m.cols()},
              {"data", std::vector<double>(m.values().begin(), m.values().end())}};
}

Matrix matrix_from_json(const json& j, const char* what) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) {
    throw DataError(std::string("model file: ") + what + " has " + std::to_string(data.size()) +
                    " values for shape " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  return Matrix(rows, cols, std::move(data));
}

}  // namespace

void save_model(std::ostream& out, const TrainedModel& model) {
  const json doc = {
      {"format", "kelm-model"},
      {"format_version", kModelFormatVersion},
      {"classifier", to_string(model.kind)},
      {"hyper",
       {{"c", model.hyper.c},
        {"lambda", model.hyper.lambda},
        {"delta", model.hyper.delta},
        {"laplacian", to_string(model.hyper.laplacian.mode)},
        {"k", model.hyper.laplacian.k},
        {"target_value", model.hyper.target_value}}},
      {"kernel", {{"kind", "rbf"}, {"sigma", model.kernel.sigma}}},
      {"norm", {{"mean", model.norm.mean}, {"std", model.norm.stddev}}},
      {"theta", model.theta},
      {"train_x", matrix_to_json(model.train_x)},
      {"beta", matrix_to_json(model.beta)},
  };
  out << doc.dump(1) << '\n';
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path.string());
  save_model(out, model);
  if (!out) throw DataError("failed writing model file " + path.string());
}

TrainedModel load_model(std::istream& in) {
  try {
    const json doc = json::parse(in);
    if (doc.at("format").get<std::string>() != "kelm-model") {
      throw DataError("not a kelm model file");
    }
    const int version = doc.at("format_version").get<int>();
    if (version > kModelFormatVersion || version < 1) {
      throw DataError("model format version " + std::to_string(version) +
                      " is not supported (this build reads up to " +
                      std::to_string(kModelFormatVersion) + ")");
    }
    TrainedModel model;
    model.kind = parse_classifier(doc.at("classifier").get<std::string>());
    const auto& h = doc.at("hyper");
    model.hyper.c = h.at("c").get<double>();
    model.hyper.lambda = h.at("lambda").get<double>();
    model.hyper.delta = h.at("delta").get<double>();
    model.hyper.laplacian.mode = parse_laplacian_mode(h.at("laplacian").get<std::string>());
    model.hyper.laplacian.k = h.at("k").get<std::size_t>();
    model.hyper.target_value = h.at("target_value").get<double>();
    if (doc.at("kernel").at("kind").get<std::string>() != "rbf") {
      throw DataError("model file: unsupported kernel");
    }
    model.kernel.sigma = doc.at("kernel").at("sigma").get<double>();
    model.norm.mean = doc.at("norm").at("mean").get<std::vector<double>>();
    model.norm.stddev = doc.at("norm").at("std").get<std::vector<double>>();
    model.theta = doc.at("theta").get<double>();
    model.train_x = matrix_from_json(doc.at("train_x"), "train_x");
    model.beta = matrix_from_json(doc.at("beta"), "beta");

    model.hyper.validate(model.kind);
    model.kernel.validate();
    const std::size_t d = model.train_x.cols();
    if (model.norm.mean.size() != d || model.norm.stddev.size() != d) {
      throw DataError("model file: normalization statistics do not match train_x");
    }
    if (model.beta.rows() != model.train_x.rows() ||
        model.beta.cols() != (is_reconstruction(model.kind) ? d : 1)) {
      throw DataError("model file: beta shape does not match train_x");
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("model file: parse error: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path.string());
  return load_model(in);
}

}  // namespace kelm
