#include "eegclf/net/network.hpp"

#include <sstream>

namespace eegclf::net {

std::string net_kind_name(NetKind kind) {
    switch (kind) {
    case NetKind::ann: return "ANN";
    case NetKind::rnn: return "RNN";
    case NetKind::cnn: return "CNN";
    }
    return "?";
}

NetKind net_kind_from_name(const std::string& name) {
    if (name == "ANN" || name == "ANNV") return NetKind::ann;
    if (name == "RNN" || name == "RNNV") return NetKind::rnn;
    if (name == "CNN" || name == "CNNV") return NetKind::cnn;
    throw std::invalid_argument("unknown network kind: " + name);
}

std::string LayerSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
    case LayerKind::input: os << "Input"; break;
    case LayerKind::conv:
        os << "Conv(" << kernel_h << "x" << kernel_w << ", stride " << stride
           << ", filters " << units << ")";
        break;
    case LayerKind::elu: os << "ELU(alpha=" << alpha << ")"; break;
    case LayerKind::relu: os << "ReLU"; break;
    case LayerKind::maxpool: os << "MaxPool(" << kernel_h << "x" << kernel_w << ", stride " << stride << ")"; break;
    case LayerKind::dropout: os << "Dropout(" << rate << ")"; break;
    case LayerKind::dense: os << "Dense(" << units << ")"; break;
    case LayerKind::recurrent: os << "Recurrent(" << units << ")"; break;
    case LayerKind::vectorize:
        os << (vec_mode == VecMode::flatten ? "Vectorize(flatten)" : "Vectorize(sequence)");
        break;
    }
    return os.str();
}

namespace {

void conv_block(std::vector<LayerSpec>& layers, std::size_t stride, std::size_t filters) {
    layers.push_back(LayerSpec::Conv(3, 3, stride, filters));
    layers.push_back(LayerSpec::Elu());
    layers.push_back(LayerSpec::Conv(3, 3, stride, filters));
    layers.push_back(LayerSpec::Elu());
}

} // namespace

NetworkSpec table_network(NetKind kind, std::size_t input_channels, std::size_t input_width) {
    NetworkSpec spec;
    spec.kind = kind;
    spec.input_channels = input_channels;
    spec.input_width = input_width;
    auto& l = spec.layers;
    l.push_back(LayerSpec::Input());

    switch (kind) {
    case NetKind::cnn:
        conv_block(l, 2, 32);
        l.push_back(LayerSpec::MaxPool(2, 2)); // stride unlisted: stride = kernel
        l.push_back(LayerSpec::Dropout(0.25));
        conv_block(l, 1, 64);
        l.push_back(LayerSpec::MaxPool(2, 2));
        l.push_back(LayerSpec::Dropout(0.25));
        conv_block(l, 1, 64);
        l.push_back(LayerSpec::MaxPool(2, 2));
        l.push_back(LayerSpec::Dropout(0.25));
        l.push_back(LayerSpec::Vectorize(VecMode::flatten));
        l.push_back(LayerSpec::Dense(128));
        l.push_back(LayerSpec::Elu());
        l.push_back(LayerSpec::Dropout(0.5));
        l.push_back(LayerSpec::Dense(128));
        l.push_back(LayerSpec::Elu());
        l.push_back(LayerSpec::Dropout(0.5));
        l.push_back(LayerSpec::Dense(3));
        l.push_back(LayerSpec::Elu());
        l.push_back(LayerSpec::Dropout(0.5));
        break;
    case NetKind::ann:
        l.push_back(LayerSpec::Vectorize(VecMode::flatten));
        for (int block = 0; block < 3; ++block) {
            l.push_back(LayerSpec::Dense(512));
            l.push_back(LayerSpec::Relu());
            l.push_back(LayerSpec::Dropout(0.25));
        }
        l.push_back(LayerSpec::Dense(3));
        l.push_back(LayerSpec::Dropout(0.5));
        break;
    case NetKind::rnn:
        l.push_back(LayerSpec::Vectorize(VecMode::sequence));
        l.push_back(LayerSpec::Recurrent(100));
        l.push_back(LayerSpec::Dense(3));
        break;
    }
    return spec;
}

} // namespace eegclf::net
