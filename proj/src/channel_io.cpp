#include "trcexp/channel_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace trcexp {

namespace {

using nlohmann::json;

Matrix parse_matrix(const json& j, const std::string& key) {
    if (!j.is_array() || j.empty()) {
        throw std::runtime_error("field '" + key + "' must be a non-empty array of rows");
    }
    Matrix m;
    for (std::size_t x = 0; x < j.size(); ++x) {
        const auto& row = j[x];
        if (!row.is_array()) {
            throw std::runtime_error("field '" + key + "' row " + std::to_string(x) +
                                     " is not an array");
        }
        std::vector<double> r;
        for (std::size_t y = 0; y < row.size(); ++y) {
            if (!row[y].is_number()) {
                throw std::runtime_error("field '" + key + "' entry (" + std::to_string(x) + "," +
                                         std::to_string(y) + ") is not a number");
            }
            r.push_back(row[y].get<double>());
        }
        m.push_back(std::move(r));
    }
    return m;
}

std::vector<std::string> parse_labels(const json& j, const std::string& key) {
    std::vector<std::string> labels;
    if (!j.is_array()) throw std::runtime_error("field '" + key + "' must be an array of labels");
    for (const auto& v : j) {
        if (v.is_string()) {
            labels.push_back(v.get<std::string>());
        } else if (v.is_number()) {
            labels.push_back(v.dump());
        } else {
            throw std::runtime_error("field '" + key + "' entries must be strings or numbers");
        }
    }
    return labels;
}

std::vector<std::string> default_labels(std::size_t count) {
    std::vector<std::string> labels(count);
    for (std::size_t i = 0; i < count; ++i) labels[i] = std::to_string(i);
    return labels;
}

}  // namespace

ChannelFile parse_channel_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(origin + ": " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error(origin + ": top level must be a JSON object");
    if (!j.contains("W")) throw std::runtime_error(origin + ": missing required field 'W'");

    ChannelFile file;
    file.model.w = parse_matrix(j["W"], "W");
    const std::size_t nx = file.model.w.size();
    const std::size_t ny = file.model.w[0].size();

    if (j.contains("P")) {
        const auto& p = j["P"];
        if (!p.is_array()) throw std::runtime_error(origin + ": field 'P' must be an array");
        for (const auto& v : p) {
            if (!v.is_number()) throw std::runtime_error(origin + ": field 'P' must be numeric");
            file.model.p.push_back(v.get<double>());
        }
    } else {
        file.model.p.assign(nx, 1.0 / static_cast<double>(nx));
    }

    file.model.input_alphabet =
        j.contains("input_alphabet") ? parse_labels(j["input_alphabet"], "input_alphabet")
                                     : default_labels(nx);
    file.model.output_alphabet =
        j.contains("output_alphabet") ? parse_labels(j["output_alphabet"], "output_alphabet")
                                      : default_labels(ny);

    file.decoder.w_tilde = j.contains("W_tilde") ? parse_matrix(j["W_tilde"], "W_tilde")
                                                 : file.model.w;
    if (j.contains("beta")) {
        const auto& b = j["beta"];
        if (b.is_string()) {
            const auto s = b.get<std::string>();
            if (s == "inf" || s == "Inf" || s == "INF") {
                file.decoder.beta = kPosInf;
            } else {
                throw std::runtime_error(origin + ": field 'beta' string must be \"inf\"");
            }
        } else if (b.is_number()) {
            file.decoder.beta = b.get<double>();
        } else {
            throw std::runtime_error(origin + ": field 'beta' must be a number or \"inf\"");
        }
    }

    auto violations = validate_channel(file.model);
    auto decoder_violations = validate_decoder(file.model, file.decoder);
    violations.insert(violations.end(), decoder_violations.begin(), decoder_violations.end());
    if (!violations.empty()) {
        std::ostringstream os;
        os << origin << ": invalid channel:";
        for (const auto& v : violations) os << "\n  - " << v;
        throw std::invalid_argument(os.str());
    }
    file.warnings = decoder_warnings(file.decoder);
    return file;
}

ChannelFile parse_channel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_channel_json(buf.str(), path);
}

}  // namespace trcexp
