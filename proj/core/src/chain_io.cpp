#include "spk/chain_io.hpp"

#include "spk/error.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

namespace spk {

using nlohmann::json;

json chain_to_json(const MarkovChain& chain) {
    const int n = chain.size();
    json kernel = json::array();
    for (int x = 0; x < n; ++x) {
        json row = json::array();
        for (int y = 0; y < n; ++y) row.push_back(chain.kernel()(x, y));
        kernel.push_back(std::move(row));
    }
    json j = {{"n", n}, {"kernel", std::move(kernel)}};
    if (!chain.labels().empty()) j["labels"] = chain.labels();
    return j;
}

MarkovChain chain_from_json(const json& j, const ChainOptions& opts) {
    try {
        if (!j.is_object()) throw Error(ErrorCode::ParseError, "chain JSON must be an object");
        const json& rows = j.at("kernel");
        if (!rows.is_array()) throw Error(ErrorCode::ParseError, "\"kernel\" must be an array of rows");
        const int n = static_cast<int>(rows.size());
        if (j.contains("n") && j.at("n").get<int>() != n)
            throw Error(ErrorCode::DimensionMismatch, "\"n\" disagrees with the kernel row count");
        Matrix k(n, n);
        for (int x = 0; x < n; ++x) {
            const json& row = rows[x];
            if (!row.is_array() || static_cast<int>(row.size()) != n)
                throw Error(ErrorCode::DimensionMismatch, "kernel row " + std::to_string(x) + " has wrong length");
            for (int y = 0; y < n; ++y) k(x, y) = row[y].get<double>();
        }
        std::vector<std::string> labels;
        if (j.contains("labels") && !j.at("labels").is_null()) labels = j.at("labels").get<std::vector<std::string>>();
        return MarkovChain::build(k, opts, std::move(labels));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

void write_chain_json(std::ostream& os, const MarkovChain& chain) { os << chain_to_json(chain).dump() << '\n'; }

MarkovChain read_chain_json(std::istream& is, const ChainOptions& opts) {
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return chain_from_json(j, opts);
}

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_int(const std::string& s, int& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && out >= 0;
}

bool parse_double(const std::string& s, double& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

MarkovChain read_edge_list_csv(std::istream& is, const ChainOptions& opts) {
    struct Row {
        std::string src, dst;
        double p;
    };
    std::vector<Row> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(trim(field));
        if (fields.size() != 3)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected src,dst,prob");
        double p;
        if (!parse_double(fields[2], p)) {
            if (rows.empty() && line_no == 1) continue;  // header
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad probability");
        }
        rows.push_back({fields[0], fields[1], p});
    }
    if (rows.empty()) throw Error(ErrorCode::ParseError, "edge list is empty");

    bool numeric = true;
    int max_index = -1;
    for (const Row& r : rows) {
        int a, b;
        if (!parse_int(r.src, a) || !parse_int(r.dst, b)) {
            numeric = false;
            break;
        }
        max_index = std::max({max_index, a, b});
    }

    std::map<std::string, int> ids;
    std::vector<std::string> labels;
    auto id_of = [&](const std::string& name) {
        if (numeric) {
            int v;
            parse_int(name, v);
            return v;
        }
        auto [it, inserted] = ids.emplace(name, static_cast<int>(labels.size()));
        if (inserted) labels.push_back(name);
        return it->second;
    };
    std::vector<std::tuple<int, int, double>> entries;
    for (const Row& r : rows) {
        const int a = id_of(r.src);
        const int b = id_of(r.dst);
        entries.emplace_back(a, b, r.p);
    }
    const int n = numeric ? max_index + 1 : static_cast<int>(labels.size());
    Matrix k = Matrix::Zero(n, n);
    for (auto [a, b, p] : entries) k(a, b) += p;
    return MarkovChain::build(k, opts, std::move(labels));
}

MarkovChain load_chain(const std::string& path, const ChainOptions& opts) {
    if (path == "-") return read_chain_json(std::cin, opts);
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return read_edge_list_csv(in, opts);
    return read_chain_json(in, opts);
}

}  // namespace spk
