#include "flowroots/network_io.hpp"

#include <fstream>

namespace flowroots {

using nlohmann::json;

json network_to_json(const Network& net) {
    json j;
    j["version"] = kNetworkSchemaVersion;
    j["name"] = net.name;
    if (net.seed) j["seed"] = *net.seed;
    if (!net.generator.empty()) j["generator"] = net.generator;
    json buses = json::array();
    for (const auto& b : net.buses)
        buses.push_back({{"id", b.id},
                         {"kind", to_string(b.kind)},
                         {"p", b.p_inject},
                         {"q", b.q_inject},
                         {"vset", b.v_setpoint},
                         {"gs", b.shunt_g},
                         {"bs", b.shunt_b}});
    j["buses"] = std::move(buses);
    json branches = json::array();
    for (const auto& br : net.branches)
        branches.push_back({{"from", br.from_bus},
                            {"to", br.to_bus},
                            {"r", br.r},
                            {"x", br.x},
                            {"b", br.b_shunt},
                            {"tau", br.tau},
                            {"theta_deg", br.theta_deg}});
    j["branches"] = std::move(branches);
    return j;
}

Network network_from_json(const json& j) {
    try {
        if (!j.is_object()) throw ModelError("network JSON must be an object");
        const int version = j.value("version", 0);
        if (version != kNetworkSchemaVersion)
            throw ModelError("unsupported network schema version " + std::to_string(version));
        Network net;
        net.name = j.value("name", std::string{});
        if (j.contains("seed") && !j["seed"].is_null()) net.seed = j["seed"].get<std::uint64_t>();
        net.generator = j.value("generator", std::string{});
        for (const auto& jb : j.at("buses")) {
            Bus b;
            b.id = jb.at("id").get<int>();
            b.kind = bus_kind_from_string(jb.at("kind").get<std::string>());
            b.p_inject = jb.value("p", 0.0);
            b.q_inject = jb.value("q", 0.0);
            b.v_setpoint = jb.value("vset", 1.0);
            b.shunt_g = jb.value("gs", 0.0);
            b.shunt_b = jb.value("bs", 0.0);
            net.buses.push_back(b);
        }
        for (const auto& jb : j.at("branches")) {
            Branch br;
            br.from_bus = jb.at("from").get<int>();
            br.to_bus = jb.at("to").get<int>();
            br.r = jb.value("r", 0.0);
            br.x = jb.at("x").get<double>();
            br.b_shunt = jb.value("b", 0.0);
            br.tau = jb.value("tau", 1.0);
            br.theta_deg = jb.value("theta_deg", 0.0);
            net.branches.push_back(br);
        }
        validate(net);
        return net;
    } catch (const json::exception& e) {
        throw ModelError(std::string("malformed network JSON: ") + e.what());
    }
}

Network load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open network file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ModelError(path.string() + ": " + e.what());
    }
    return network_from_json(j);
}

void save_network(const Network& net, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write network file " + path.string());
    out << network_to_json(net).dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace flowroots
