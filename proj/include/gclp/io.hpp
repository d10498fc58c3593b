#pragma once

#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gclp/graph.hpp"
#include "gclp/node_kernels.hpp"

namespace gclp {

/// Maps external node tokens to dense indices in first-appearance order.
class NodeIdMap {
public:
    NodeIdMap() = default;
    explicit NodeIdMap(std::vector<std::string> tokens);

    Index intern(const std::string& token);
    [[nodiscard]] std::optional<Index> find(const std::string& token) const;
    [[nodiscard]] Index at(const std::string& token) const;  // throws DataError if unknown
    [[nodiscard]] const std::string& token(Index index) const { return tokens_.at(index); }
    [[nodiscard]] const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    [[nodiscard]] Index size() const noexcept { return tokens_.size(); }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, Index> index_;
};

struct LoadedGraph {
    NodeIdMap ids;
    GraphDomain graph;
};

/// Whitespace-separated token pairs, one edge per line, `#` comments.
/// Self-loops and duplicate edges raise DataError naming the line.
LoadedGraph read_edge_list(std::istream& in, const std::string& source = "<stream>");
LoadedGraph read_edge_list_file(const std::string& path);

/// One node per line: token followed by D floats. D comes from the first data line.
/// Every node known to `ids` must appear exactly once; unknown tokens are rejected.
FeatureMatrix read_features(std::istream& in, const NodeIdMap& ids, const std::string& source = "<stream>");
FeatureMatrix read_features_file(const std::string& path, const NodeIdMap& ids);

}  // namespace gclp
