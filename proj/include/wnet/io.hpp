#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "wnet/analysis.hpp"
#include "wnet/measures.hpp"
#include "wnet/multimarginal.hpp"
#include "wnet/network.hpp"
#include "wnet/topology.hpp"
#include "wnet/transport.hpp"
#include "wnet/uniqueness.hpp"

namespace wnet::io {

using json = nlohmann::json;
using AnyMeasure = std::variant<DiscreteMeasure, GridMeasure>;

// Parsers throw Error(Schema) with a JSON-pointer path to the offending value;
// `at` is the pointer of `j` itself inside the document.

AnyMeasure parse_measure(const json& j, const std::string& at = "");
DiscreteMeasure as_discrete(const AnyMeasure& m);

json to_json(const DiscreteMeasure& mu);
json to_json(const GridMeasure& mu);
json to_json(const AnyMeasure& mu);
json to_json(const TransportPlan& plan);
json to_json(const MultiPlan& plan);
json to_json(const Topology& t);
json to_json(const NetworkSolution& s);
json to_json(const MaxPrincipleReport& r);
json to_json(const AngleReport& r);
json to_json(const LinftyReport& r);
json to_json(const CounterexampleCertificate& c);
json to_json(const TTensorReport& r);

struct Instance {
  std::size_t dim = 0;
  std::vector<AnyMeasure> boundary;
  std::optional<Topology> topology;  // empty for "auto"

  bool all_grid() const;
  std::vector<DiscreteMeasure> discrete_boundary() const;
  std::vector<GridMeasure> grid_boundary() const;  // throws Schema unless all_grid()
};

/// `{"dim":n,"boundary":[measure...],"topology":{"vertices":v,"edges":[[i,j]...],"terminals":[..]} | "auto"}`
Instance parse_instance(const json& j);

struct MarginalsInput {
  std::vector<AnyMeasure> marginals;
  std::vector<double> sigmas;
};

/// `{"marginals":[measure...],"sigmas":[..]}`
MarginalsInput parse_marginals(const json& j);

json read_json_file(const std::string& path);

}  // namespace wnet::io
