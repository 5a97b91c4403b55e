#include "spin/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spin {

std::string to_string(ReadoutKind k) {
    switch (k) {
        case ReadoutKind::Sum: return "sum";
        case ReadoutKind::Mean: return "mean";
        case ReadoutKind::Max: return "max";
    }
    return "?";
}

ReadoutKind readout_from_string(const std::string& s) {
    if (s == "sum") return ReadoutKind::Sum;
    if (s == "mean") return ReadoutKind::Mean;
    if (s == "max") return ReadoutKind::Max;
    throw std::invalid_argument("unknown readout: " + s);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("expected boolean, got: " + v);
}

} // namespace

KeyValues parse_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line missing '=': " + line);
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kv;
}

KeyValues load_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_key_values(in);
}

void apply_key_values(SpinConfig& cfg, const KeyValues& kv) {
    for (const auto& [k, v] : kv) {
        if (k == "R") cfg.r_depth = std::stoul(v);
        else if (k == "operator") cfg.op = operator_kind_from_string(v);
        else if (k == "input_dim") cfg.input_dim = std::stoul(v);
        else if (k == "hidden_dim") cfg.hidden_dim = std::stoul(v);
        else if (k == "g_layers") cfg.g_layers = std::stoul(v);
        else if (k == "attention") cfg.attention = parse_bool(v);
        else if (k == "dropout") cfg.dropout_rate = std::stod(v);
        else if (k == "classifier_layers") cfg.classifier_layers = std::stoul(v);
        else if (k == "num_classes") cfg.num_classes = std::stoul(v);
        else if (k == "readout") cfg.readout = readout_from_string(v);
        // unknown keys may belong to the training config; ignored here
    }
}

void apply_key_values(TrainConfig& cfg, const KeyValues& kv) {
    for (const auto& [k, v] : kv) {
        if (k == "batch_size") cfg.batch_size = std::stoul(v);
        else if (k == "learning_rate") cfg.learning_rate = std::stod(v);
        else if (k == "max_epochs") cfg.max_epochs = std::stoul(v);
        else if (k == "patience") cfg.patience = std::stoul(v);
        else if (k == "l2") cfg.l2 = std::stod(v);
        else if (k == "seed") cfg.seed = std::stoull(v);
        else if (k == "repeats_per_fold") cfg.repeats_per_fold = std::stoul(v);
    }
}

std::string to_key_values(const SpinConfig& cfg) {
    std::ostringstream o;
    o << "R = " << cfg.r_depth << '\n'
      << "operator = " << to_string(cfg.op) << '\n'
      << "input_dim = " << cfg.input_dim << '\n'
      << "hidden_dim = " << cfg.hidden_dim << '\n'
      << "g_layers = " << cfg.g_layers << '\n'
      << "attention = " << (cfg.attention ? "on" : "off") << '\n'
      << "dropout = " << cfg.dropout_rate << '\n'
      << "classifier_layers = " << cfg.classifier_layers << '\n'
      << "num_classes = " << cfg.num_classes << '\n'
      << "readout = " << to_string(cfg.readout) << '\n';
    return o.str();
}

std::string to_key_values(const TrainConfig& cfg) {
    std::ostringstream o;
    o << "batch_size = " << cfg.batch_size << '\n'
      << "learning_rate = " << cfg.learning_rate << '\n'
      << "max_epochs = " << cfg.max_epochs << '\n'
      << "patience = " << cfg.patience << '\n'
      << "l2 = " << cfg.l2 << '\n'
      << "seed = " << cfg.seed << '\n'
      << "repeats_per_fold = " << cfg.repeats_per_fold << '\n';
    return o.str();
}

} // namespace spin
