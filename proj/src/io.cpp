#include "gclp/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "gclp/errors.hpp"

namespace gclp {

NodeIdMap::NodeIdMap(std::vector<std::string> tokens) {
    for (auto& t : tokens) {
        if (find(t)) { throw DataError("duplicate node token '" + t + "'"); }
        intern(t);
    }
}

Index NodeIdMap::intern(const std::string& token) {
    auto [it, inserted] = index_.try_emplace(token, tokens_.size());
    if (inserted) { tokens_.push_back(token); }
    return it->second;
}

std::optional<Index> NodeIdMap::find(const std::string& token) const {
    if (auto it = index_.find(token); it != index_.end()) { return it->second; }
    return std::nullopt;
}

Index NodeIdMap::at(const std::string& token) const {
    if (auto idx = find(token)) { return *idx; }
    throw DataError("unknown node token '" + token + "'");
}

namespace {

bool skip_line(const std::string& line) {
    const auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string::npos || line[pos] == '#';
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) { throw DataError("cannot open '" + path + "'"); }
    return in;
}

}  // namespace

LoadedGraph read_edge_list(std::istream& in, const std::string& source) {
    NodeIdMap ids;
    std::vector<NodePair> edges;
    std::map<NodePair, std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip_line(line)) { continue; }
        std::istringstream fields(line);
        std::string a;
        std::string b;
        std::string extra;
        if (!(fields >> a >> b) || (fields >> extra)) {
            throw DataError(source + ":" + std::to_string(line_no) + ": expected exactly two node tokens");
        }
        if (a == b) { throw DataError(source + ":" + std::to_string(line_no) + ": self-loop on '" + a + "'"); }
        const Index ia = ids.intern(a);
        const Index ib = ids.intern(b);
        const NodePair pair(ia, ib);
        if (auto [it, inserted] = seen.emplace(pair, line_no); !inserted) {
            throw DataError(source + ":" + std::to_string(line_no) + ": duplicate edge '" + a + " " + b +
                            "' (first seen on line " + std::to_string(it->second) + ")");
        }
        edges.push_back(pair);
    }
    const Index n = ids.size();
    return {std::move(ids), GraphDomain(n, std::move(edges))};
}

LoadedGraph read_edge_list_file(const std::string& path) {
    auto in = open_or_throw(path);
    return read_edge_list(in, path);
}

FeatureMatrix read_features(std::istream& in, const NodeIdMap& ids, const std::string& source) {
    Eigen::MatrixXd values;
    std::vector<bool> filled(ids.size(), false);
    Eigen::Index dim = -1;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip_line(line)) { continue; }
        const std::string where = source + ":" + std::to_string(line_no);
        std::istringstream fields(line);
        std::string token;
        fields >> token;
        std::vector<double> row;
        std::string cell;
        while (fields >> cell) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                if (used != cell.size()) { throw std::invalid_argument(cell); }
                if (!std::isfinite(v)) { throw DataError(where + ": non-finite feature value '" + cell + "'"); }
                row.push_back(v);
            } catch (const std::logic_error&) {
                throw DataError(where + ": cannot parse feature value '" + cell + "'");
            }
        }
        if (dim < 0) {
            dim = static_cast<Eigen::Index>(row.size());
            if (dim == 0) { throw DataError(where + ": feature line has no values"); }
            values.resize(static_cast<Eigen::Index>(ids.size()), dim);
        } else if (static_cast<Eigen::Index>(row.size()) != dim) {
            throw DataError(where + ": expected " + std::to_string(dim) + " feature values, got " +
                            std::to_string(row.size()));
        }
        const auto idx = ids.find(token);
        if (!idx) { throw DataError(where + ": node '" + token + "' does not appear in the graph"); }
        if (filled[*idx]) { throw DataError(where + ": duplicate features for node '" + token + "'"); }
        filled[*idx] = true;
        values.row(static_cast<Eigen::Index>(*idx)) = Eigen::Map<const Eigen::RowVectorXd>(row.data(), dim);
    }
    for (Index i = 0; i < ids.size(); ++i) {
        if (!filled[i]) { throw DataError(source + ": missing features for node '" + ids.token(i) + "'"); }
    }
    if (dim < 0) { throw DataError(source + ": no feature lines"); }
    return FeatureMatrix(std::move(values));
}

FeatureMatrix read_features_file(const std::string& path, const NodeIdMap& ids) {
    auto in = open_or_throw(path);
    return read_features(in, ids, path);
}

}  // namespace gclp
