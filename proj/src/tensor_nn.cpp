#include "lrgan/tensor_nn.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lrgan/checkpoint.hpp"

namespace lrgan {

using nlohmann::json;

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::SmoothLeaky: return "smooth-leaky";
    case Activation::Tanh: return "tanh";
    case Activation::Rectifier: return "rectifier";
  }
  return "smooth-leaky";
}

Activation activation_from_name(const std::string& name) {
  if (name == "smooth-leaky") return Activation::SmoothLeaky;
  if (name == "tanh") return Activation::Tanh;
  if (name == "rectifier" || name == "relu") return Activation::Rectifier;
  throw std::invalid_argument("unknown activation '" + name +
                              "' (expected smooth-leaky, tanh or rectifier)");
}

void NetSpec::validate() const {
  if (widths.size() < 2) throw ShapeError("network needs an input width and an output width");
  for (int w : widths)
    if (w < 1) throw ShapeError("layer widths must be >= 1");
}

std::string penalty_variant_name(PenaltyVariant v) {
  return v == PenaltyVariant::Max ? "max" : "mean";
}

PenaltyVariant penalty_variant_from_name(const std::string& name) {
  if (name == "max") return PenaltyVariant::Max;
  if (name == "mean") return PenaltyVariant::Mean;
  throw std::invalid_argument("unknown penalty variant '" + name + "' (expected max or mean)");
}

namespace {

json params_to_json(const Params& p) {
  json layers = json::array();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const auto& w = p.weights[l];
    const auto& b = p.biases[l];
    layers.push_back({{"rows", w.rows()},
                      {"cols", w.cols()},
                      {"weights", std::vector<double>(w.data(), w.data() + w.size())},
                      {"bias", std::vector<double>(b.data(), b.data() + b.size())}});
  }
  return layers;
}

Params params_from_json(const json& layers) {
  Params p;
  for (const auto& layer : layers) {
    const auto rows = layer.at("rows").get<Eigen::Index>();
    const auto cols = layer.at("cols").get<Eigen::Index>();
    const auto w = layer.at("weights").get<std::vector<double>>();
    const auto b = layer.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
        static_cast<Eigen::Index>(b.size()) != rows)
      throw ShapeError("checkpoint layer arrays do not match their declared shape");
    p.weights.push_back(Eigen::Map<const Eigen::MatrixXd>(w.data(), rows, cols));
    p.biases.push_back(Eigen::Map<const Eigen::VectorXd>(b.data(), rows));
  }
  return p;
}

}  // namespace

std::string checkpoint_to_string(const Net& net, const Adam* optimizer) {
  json doc;
  doc["format"] = "lrgan-checkpoint-1";
  doc["spec"] = {{"widths", net.spec.widths},
                 {"hidden", activation_name(net.spec.hidden)},
                 {"output", net.spec.output.name()},
                 {"seed", net.spec.seed}};
  doc["layers"] = params_to_json(net.params);
  if (optimizer) {
    doc["adam"] = {{"step", optimizer->step},
                   {"beta1", optimizer->beta1},
                   {"beta2", optimizer->beta2},
                   {"eps", optimizer->eps},
                   {"learning_rate", optimizer->learning_rate},
                   {"first_moment", params_to_json(optimizer->first_moment)},
                   {"second_moment", params_to_json(optimizer->second_moment)}};
  }
  return doc.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  const json doc = json::parse(text);
  if (doc.value("format", "") != "lrgan-checkpoint-1")
    throw std::invalid_argument("not an lrgan checkpoint");
  Checkpoint cp;
  const auto& spec = doc.at("spec");
  cp.net.spec.widths = spec.at("widths").get<std::vector<int>>();
  cp.net.spec.hidden = activation_from_name(spec.at("hidden").get<std::string>());
  cp.net.spec.output = squashing_from_name(spec.at("output").get<std::string>());
  cp.net.spec.seed = spec.at("seed").get<std::uint64_t>();
  cp.net.spec.validate();
  cp.net.params = params_from_json(doc.at("layers"));
  if (cp.net.params.weights.size() != cp.net.spec.layer_count())
    throw ShapeError("checkpoint layer count does not match its spec");
  for (std::size_t l = 0; l < cp.net.params.weights.size(); ++l) {
    if (cp.net.params.weights[l].rows() != cp.net.spec.widths[l + 1] ||
        cp.net.params.weights[l].cols() != cp.net.spec.widths[l])
      throw ShapeError("checkpoint layer " + std::to_string(l) + " does not chain");
  }
  if (doc.contains("adam")) {
    const auto& a = doc.at("adam");
    Adam s;
    s.step = a.at("step").get<long>();
    s.beta1 = a.at("beta1").get<double>();
    s.beta2 = a.at("beta2").get<double>();
    s.eps = a.at("eps").get<double>();
    s.learning_rate = a.at("learning_rate").get<double>();
    s.first_moment = params_from_json(a.at("first_moment"));
    s.second_moment = params_from_json(a.at("second_moment"));
    cp.optimizer = std::move(s);
  }
  return cp;
}

void write_checkpoint(const std::filesystem::path& path, const Net& net, const Adam* optimizer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << checkpoint_to_string(net, optimizer);
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_string(buf.str());
}

}  // namespace lrgan
